#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "specfun/kummer_series.hpp"
#include "specfun/wide.hpp"
#include "tdheston/charfn.hpp"
#include "tdheston/errors.hpp"
#include "tdheston/specfun.hpp"

// Constant-eta closed form. With u = g1 tau + g2, z = -u^2 / (2 g1) and
// a = alpha gamma / (2 g1), D(tau) = A1 M(a, 1/2, z) + A2 U(a, 1/2, z) solves
// the linear equation behind B = -D' / (gamma D). D'(0) = 0 fixes A1 = A2 F / 2
// and gives
//   B = (alpha / g1) u (F M1 - U1) / (F M0 + 2 U0)
// where M0, U0 take (a, 1/2, z), M1, U1 take (a+1, 3/2, z) and F = U1(z0) / M1(z0).
// Multiplying through by M1(z0) removes F from the arithmetic.
//
// U is expanded on the b = 1/2 reflection formula, scaled by a common constant:
//   U0 ~ w1 M(a, 1/2, z) - 2 w2 r M(a+1/2, 3/2, z)
//   U1 ~ -(2 w1 M(a+1, 3/2, z) - (w2 / a) M(a+1/2, 1/2, z) / r)
// with (w1, w2) proportional to (1/Gamma(a+1/2), 1/Gamma(a)) and r = z^(1/2)
// continued along the tau path from the principal root at z0.
//
// The sums cancel catastrophically for large |omega|, so each evaluation
// measures its own cancellation and is repeated in a wider precision when the
// remaining bits would fall short of the target.

namespace tdh {
namespace {

using specfun::detail::kummer_m_sum_real_b;
using specfun::detail::log2_abs;
using specfun::detail::to_std;

// Bits that must survive cancellation: the double tier accepts a ~1e-12 result,
// the wide tiers aim for full double accuracy after rounding.
constexpr double kTargetBits = 40.0;
constexpr double kWideTargetBits = 58.0;
constexpr double kMarginBits = 16.0;
constexpr long kMaxBits = 8192;
constexpr int kMaxTermsDouble = 4000;
constexpr int kMaxTermsWide = 60000;

thread_local ClosedFormDiagnostics g_diag;

struct Inputs {
    Complex omega;
    double kappa1, kappa2, rho1, rho2, eta;
    Complex w1, w2;  // normalised Gamma weights
    double log_scale = 0.0;  // true weights = normalised * e^log_scale
    double sigma = 1.0;      // branch of r at z0
    bool g2_zero = false;
};

double cancel(double log2_term_max, double log2_result) {
    if (log2_result == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
    return std::max(0.0, log2_term_max - log2_result);
}

template <class C>
double cancel2(const C& t1, const C& t2, const C& result) {
    return cancel(std::max(log2_abs(t1), log2_abs(t2)), log2_abs(result));
}

struct TierResult {
    std::vector<Complex> B;
    Complex F_normalised;
    double loss = 0.0;
    double num_loss = 0.0;
    double den_loss = 0.0;
    int terms = 0;
};

template <class C>
TierResult evaluate(const Inputs& in, const std::vector<double>& taus, double log2_tol, int max_terms) {
    TierResult out;
    const C i(Complex(0.0, 1.0));
    const C w(in.omega);
    const C alpha = (w * w + i * w) * -0.5;
    const C eta(in.eta);
    const C gamma = eta * eta * 0.5;
    const C iw_eta = i * w * eta;
    const C g1 = C(in.kappa1) - iw_eta * in.rho1;
    const C g2 = C(in.kappa2) - iw_eta * in.rho2;
    const C two_g1 = g1 * 2.0;
    const C a = alpha * gamma / two_g1;
    const C q = specfun::detail::csqrt(-two_g1);
    const C w1(in.w1);
    const C w2(in.w2);
    const C w2_over_a = w2 / a;
    const double half = 0.5, three_half = 1.5;
    const C a_half = a + 0.5;
    const C a_one = a + 1.0;

    double series_loss = 0.0;
    auto M = [&](const C& aa, double bb, const C& zz) {
        auto s = kummer_m_sum_real_b(aa, bb, zz, log2_tol, max_terms);
        series_loss = std::max(series_loss, s.log2_cancellation);
        out.terms = std::max(out.terms, s.terms);
        return s.value;
    };

    double u_loss = 0.0;
    C M1z0, U1z0;
    if (!in.g2_zero) {
        const C z0 = -(g2 * g2) / two_g1;
        const C r0 = g2 / q * in.sigma;
        M1z0 = M(a_one, three_half, z0);
        const C t1 = w1 * M1z0 * 2.0;
        const C t2 = w2_over_a * M(a_half, half, z0) / r0;
        U1z0 = t2 - t1;
        u_loss = std::max(u_loss, cancel2(t1, t2, U1z0));
        out.F_normalised = to_std(U1z0) / to_std(M1z0);
    } else {
        out.F_normalised = std::numeric_limits<double>::infinity();
    }

    double num_loss = 0.0, den_loss = 0.0;
    for (double tau : taus) {
        if (tau == 0.0) {
            out.B.emplace_back(0.0, 0.0);
            continue;
        }
        const C u = g1 * tau + g2;
        const C z = -(u * u) / two_g1;
        const C M0 = M(a, half, z);
        const C M1 = M(a_one, three_half, z);
        C num, den;
        if (in.g2_zero) {
            // D = M0 alone satisfies D'(0) = 0 when z(0) = 0.
            num = M1;
            den = M0;
        } else {
            const C r = u / q * in.sigma;
            const C s0 = w1 * M0;
            const C s1 = w2 * r * M(a_half, three_half, z) * 2.0;
            const C U0 = s0 - s1;
            const C s2 = w1 * M1 * 2.0;
            const C s3 = w2_over_a * M(a_half, half, z) / r;
            const C U1 = s3 - s2;
            u_loss = std::max({u_loss, cancel2(s0, s1, U0), cancel2(s2, s3, U1)});

            const C n1 = U1z0 * M1;
            const C n2 = M1z0 * U1;
            num = n1 - n2;
            const C d1 = U1z0 * M0;
            const C d2 = M1z0 * U0 * 2.0;
            den = d1 + d2;
            num_loss = std::max(num_loss, cancel2(n1, n2, num));
            den_loss = std::max(den_loss, cancel2(d1, d2, den));
        }
        if (log2_abs(den) == -std::numeric_limits<double>::infinity()) {
            den_loss = std::numeric_limits<double>::infinity();
            out.B.emplace_back(std::numeric_limits<double>::quiet_NaN(), 0.0);
            continue;
        }
        const C B = alpha / g1 * u * num / den;
        out.B.push_back(to_std(B));
    }
    out.num_loss = num_loss;
    out.den_loss = den_loss;
    out.loss = series_loss + u_loss + std::max(num_loss, den_loss);
    return out;
}

bool near_nonpositive_integer(Complex z) {
    const double n = std::round(z.real());
    return n <= 0.0 && std::abs(z - n) < 1e-12;
}

Inputs make_inputs(const LinearParams& p, Complex omega) {
    Inputs in{omega, p.kappa1, p.kappa2, p.rho1, p.rho2, p.eta2, {}, {}, 0.0, 1.0, false};
    const Complex i(0.0, 1.0);
    const Complex alpha = riccati_alpha(omega);
    const double gamma = 0.5 * p.eta2 * p.eta2;
    const Complex g1 = p.kappa1 - i * p.rho1 * p.eta2 * omega;
    const Complex g2 = p.kappa2 - i * p.rho2 * p.eta2 * omega;
    const Complex a = alpha * gamma / (2.0 * g1);

    const bool pole_half = near_nonpositive_integer(a + 0.5);
    const bool pole_a = near_nonpositive_integer(a);
    if (pole_half) {
        in.w1 = 0.0;
        in.w2 = 1.0;
        in.log_scale = -specfun::complex_lgamma(a).real();
    } else if (pole_a) {
        in.w1 = 1.0;
        in.w2 = 0.0;
        in.log_scale = -specfun::complex_lgamma(a + 0.5).real();
    } else {
        const Complex l1 = -specfun::complex_lgamma(a + 0.5);
        const Complex l2 = -specfun::complex_lgamma(a);
        const double m = std::max(l1.real(), l2.real());
        in.w1 = std::exp(l1 - m);
        in.w2 = std::exp(l2 - m);
        in.log_scale = m;
    }

    in.g2_zero = g2 == Complex{};
    if (!in.g2_zero) {
        const Complex q = std::sqrt(-2.0 * g1);
        const Complex r0 = g2 / q;
        const Complex z0 = -(g2 * g2) / (2.0 * g1);
        const Complex principal = std::sqrt(z0);
        in.sigma = std::abs(r0 - principal) <= std::abs(r0 + principal) ? 1.0 : -1.0;
    }
    return in;
}

// Runs the double tier and then wider tiers until the measured loss fits.
TierResult evaluate_adaptive(const Inputs& in, const std::vector<double>& taus) {
    TierResult r;
    bool have = false;
    try {
        r = evaluate<Complex>(in, taus, -53.0, kMaxTermsDouble);
        have = true;
    } catch (const NoConvergence&) {
        // overflow or slow convergence in double; the wide tiers take over
    }
    if (have && std::isfinite(r.loss) && 53.0 - r.loss >= kTargetBits) {
        g_diag.precision_bits = 53;
        g_diag.estimated_loss_bits = r.loss;
        g_diag.series_terms = r.terms;
        return r;
    }
    long bits = 128;
    if (have && std::isfinite(r.loss)) bits = std::max<long>(bits, static_cast<long>(r.loss + kWideTargetBits + kMarginBits));
    for (;;) {
        bits = std::min(bits, kMaxBits);
        {
            wide::WorkingPrecision guard(bits);
            r = evaluate<wide::Complex>(in, taus, -static_cast<double>(bits) - 8.0, kMaxTermsWide);
        }
        const double remaining = static_cast<double>(bits) - r.loss;
        if (std::isfinite(r.loss) && remaining >= kWideTargetBits) {
            g_diag.precision_bits = bits;
            g_diag.estimated_loss_bits = r.loss;
            g_diag.series_terms = r.terms;
            return r;
        }
        if (bits >= kMaxBits) {
            std::ostringstream msg;
            msg << "b_closed_constant_eta: cancellation exceeds " << kMaxBits << " bits of working precision";
            if (r.den_loss >= r.num_loss) {
                throw DenominatorUnderflow(msg.str() + " in the denominator F M + 2U (D has a zero: Riccati blow-up)");
            }
            throw NoConvergence(msg.str());
        }
        const long need = std::isfinite(r.loss) ? static_cast<long>(r.loss + kWideTargetBits + kMarginBits) : 2 * bits;
        bits = std::max(need, bits + bits / 2);
    }
}

void check_constant_eta(const LinearParams& p) {
    if (p.eta1 != 0.0) throw RouteMismatch("b_closed_constant_eta requires eta1 = 0");
}

}  // namespace

const ClosedFormDiagnostics& last_closed_form_diagnostics() { return g_diag; }

std::vector<Complex> b_closed_constant_eta(const LinearParams& p, Complex omega, const std::vector<double>& taus) {
    check_constant_eta(p);
    for (double t : taus)
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("b_closed_constant_eta: tau must be finite and >= 0");
    g_diag = {};
    const Complex alpha = riccati_alpha(omega);
    if (std::abs(alpha) < 1e-14) return std::vector<Complex>(taus.size(), Complex{});

    const Complex i(0.0, 1.0);
    const Complex g1 = p.kappa1 - i * p.rho1 * p.eta2 * omega;
    if (std::abs(g1) < 1e-12) {
        // beta is constant: the classic constant-coefficient solution applies.
        g_diag.degenerate_g1 = true;
        std::vector<Complex> out;
        out.reserve(taus.size());
        for (double t : taus) out.push_back(heston_constant_cf(p.kappa2, 0.0, p.eta2, p.rho2, omega, t).B);
        return out;
    }
    const Inputs in = make_inputs(p, omega);
    return evaluate_adaptive(in, taus).B;
}

Complex b_closed_constant_eta(const LinearParams& p, Complex omega, double tau) {
    return b_closed_constant_eta(p, omega, std::vector<double>{tau}).front();
}

ConstantEtaAux constant_eta_aux(const LinearParams& p, Complex omega, double tau) {
    check_constant_eta(p);
    const Complex i(0.0, 1.0);
    ConstantEtaAux aux;
    aux.g1 = p.kappa1 - i * p.rho1 * p.eta2 * omega;
    aux.g2 = p.kappa2 - i * p.rho2 * p.eta2 * omega;
    const Complex u = aux.g1 * tau + aux.g2;
    aux.z = -(u * u) / (2.0 * aux.g1);
    if (std::abs(aux.g1) < 1e-12) throw DegenerateG1("constant_eta_aux: |g1| < 1e-12, z is undefined");
    const Inputs in = make_inputs(p, omega);
    const TierResult r = evaluate_adaptive(in, {});
    // Undo the common weight scale: U = sqrt(pi) e^log_scale * (normalised U).
    aux.F = r.F_normalised * std::sqrt(std::numbers::pi) * std::exp(in.log_scale);
    return aux;
}

}  // namespace tdh
