#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tdheston/charfn.hpp"
#include "tdheston/errors.hpp"
#include "tdheston/specfun.hpp"

// Linear eta: with beta(tau) = h1 tau^2 + h2 tau + h3 and alpha gamma(tau) =
// (k1 tau + k2)^2, the equation D'' + beta D' + alpha gamma D = 0 maps onto the
// triconfluent Heun form through tau = lambda z + mu, lambda^3 = 3 / h1,
// mu = -h2 / (2 h1). Two solutions are
//   D1 = e^f HeunT(ha, hb, hg, z),   D2 = e^(-tau k1^2 / h1) HeunT(ha, -hb, hg, -z).
// B = -D' / (gamma D) solves the Riccati equation only up to a -(gamma'/gamma) B
// term when gamma varies, so every value is checked against the Riccati
// residual before it is returned.

namespace tdh {
namespace {

constexpr double kResidualTol = 1e-6;
constexpr double kMaxLossBits = 22.0;
constexpr double kDegenerateH1 = 1e-14;

struct DValues {
    Complex d, d1, d2;  // D, D', D''
    double loss = 0.0;
};

double log2_ratio(double big, double small) {
    if (small == 0.0) return big == 0.0 ? 0.0 : 1e9;
    return std::max(0.0, std::log2(big / small));
}

DValues eval_d(const HeunAux& x, const Complex& A1, const Complex& A2, double tau) {
    const Complex z = (tau - x.mu) / x.lambda;
    const specfun::SeriesSolution w1 = specfun::heun_t(x.heun_alpha, x.heun_beta, x.heun_gamma, z);
    const specfun::SeriesSolution w2 = specfun::heun_t(x.heun_alpha, -x.heun_beta, x.heun_gamma, -z);
    const Complex h1 = x.h1, h2 = x.h2, h3 = x.h3, k1 = x.k1;
    const Complex lam = x.lambda;

    const Complex f = -tau * (2.0 * h1 * h1 * tau * tau + 3.0 * h1 * h2 * tau + 6.0 * h1 * h3 - 6.0 * k1 * k1) / (6.0 * h1);
    const Complex fp = -(h1 * tau * tau + h2 * tau + h3) + k1 * k1 / h1;
    const Complex fpp = -(2.0 * h1 * tau + h2);
    const Complex gp = -k1 * k1 / h1;
    const Complex g = gp * tau;

    const Complex ef = std::exp(f), eg = std::exp(g);
    const Complex D1 = ef * w1.w;
    const Complex D1p = ef * (fp * w1.w + w1.wprime / lam);
    const Complex D1pp = ef * ((fpp + fp * fp) * w1.w + 2.0 * fp * w1.wprime / lam + w1.wsecond / (lam * lam));
    const Complex D2 = eg * w2.w;
    const Complex D2p = eg * (gp * w2.w - w2.wprime / lam);
    const Complex D2pp = eg * (gp * gp * w2.w - 2.0 * gp * w2.wprime / lam + w2.wsecond / (lam * lam));

    DValues out;
    out.d = A1 * D1 + A2 * D2;
    out.d1 = A1 * D1p + A2 * D2p;
    out.d2 = A1 * D1pp + A2 * D2pp;
    const double comb = std::max({log2_ratio(std::max(std::abs(A1 * D1), std::abs(A2 * D2)), std::abs(out.d)),
                                  log2_ratio(std::max(std::abs(A1 * D1p), std::abs(A2 * D2p)), std::abs(out.d1))});
    out.loss = std::max(w1.log2_cancellation, w2.log2_cancellation) + comb;
    return out;
}

HeunResult fallback(const LinearParams& p, Complex omega, double tau, HeunResult r, const std::string& why) {
    r.B = riccati_solve_numeric(p, omega, tau).B;
    r.fallback_used = true;
    r.diagnostic = "FallbackUsed: " + why + "; numeric Riccati value returned";
    return r;
}

}  // namespace

HeunAux heun_aux(const LinearParams& p, Complex omega, double tau) {
    const Complex i(0.0, 1.0);
    const Complex iw = i * omega;
    const Complex alpha = riccati_alpha(omega);
    HeunAux x;
    x.h1 = -iw * p.rho1 * p.eta1;
    x.h2 = p.kappa1 - (p.rho1 * p.eta2 + p.rho2 * p.eta1) * iw;
    x.h3 = p.kappa2 - p.rho2 * p.eta2 * iw;
    const Complex s = std::sqrt(alpha) / std::sqrt(2.0);
    x.k1 = p.eta1 * s;
    x.k2 = p.eta2 * s;
    if (std::abs(x.h1) < kDegenerateH1) return x;

    const Complex h1 = x.h1, h2 = x.h2, h3 = x.h3, k1 = x.k1, k2 = x.k2;
    const Complex c = std::pow(h1, 1.0 / 3.0);  // principal cube root
    const Complex c4 = c * c * c * c;
    const Complex c8 = c4 * c4;
    const double cbrt3 = std::cbrt(3.0);
    x.lambda = cbrt3 / c;
    x.mu = -h2 / (2.0 * h1);
    x.f_prefactor = -tau * (2.0 * h1 * h1 * tau * tau + 3.0 * h1 * h2 * tau + 6.0 * h1 * h3 - 6.0 * k1 * k1) / (6.0 * h1);

    const Complex common = (h2 * k1) * (h2 * k1) - 2.0 * h1 * h2 * k2 * k1 - 2.0 * k1 * k1 * h1 * h3 + 2.0 * k1 * k1 * k1 * k1;
    x.heun_alpha = cbrt3 * cbrt3 / (2.0 * c8) * (common + 2.0 * (k2 * h1) * (k2 * h1));
    x.printed_alpha = cbrt3 * cbrt3 / (2.0 * c8) * (common + 2.0 * (k2 * k1) * (k2 * k1));
    x.heun_beta = -3.0 * (k1 * k1 * h2 + h1 * h1 - 2.0 * h1 * k2 * k1) / (h1 * h1);
    x.printed_beta = -3.0 * (k1 * k1 * h2 + k1 * k1 - 2.0 * h1 * k2 * k1) / (h1 * h1);
    x.heun_gamma = cbrt3 * (4.0 * h1 * h3 - h2 * h2 - 8.0 * k1 * k1) / (4.0 * c4);
    return x;
}

HeunResult b_heun_linear_eta(const LinearParams& p, Complex omega, double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("b_heun_linear_eta: tau must be finite and >= 0");
    HeunResult r;
    r.aux = heun_aux(p, omega, tau);
    if (tau == 0.0 || std::abs(riccati_alpha(omega)) < 1e-14) {
        r.B = 0.0;
        return r;
    }
    if (p.eta1 == 0.0) {
        r.B = b_closed_constant_eta(p, omega, tau);
        r.diagnostic = "eta1 = 0: constant-eta closed form used";
        return r;
    }
    if (std::abs(r.aux.h1) < kDegenerateH1) return fallback(p, omega, tau, r, "h1 = 0 (omega or rho1 vanishes)");

    const HeunAux& x = r.aux;
    try {
        // A1 = D2'(0), A2 = -D1'(0) makes D'(0) = 0.
        const DValues e1 = eval_d(x, 1.0, 0.0, 0.0);
        const DValues e2 = eval_d(x, 0.0, 1.0, 0.0);
        const Complex A1 = e2.d1, A2 = -e1.d1;

        const Complex alpha = riccati_alpha(omega);
        double worst = 0.0, loss = 0.0;
        Complex B_tau;
        for (double frac : {0.25, 0.5, 0.75, 1.0}) {
            const double t = frac * tau;
            const DValues dv = eval_d(x, A1, A2, t);
            loss = std::max(loss, dv.loss);
            const RiccatiCoeffs rc = riccati_coeffs(p, omega, t);
            const double gdot = p.eta1 * p.eta(t);  // d/dtau (eta^2 / 2)
            const Complex B = -dv.d1 / (rc.gamma * dv.d);
            const Complex Bp = -dv.d2 / (rc.gamma * dv.d) + dv.d1 * gdot / (rc.gamma * rc.gamma * dv.d) +
                               dv.d1 * dv.d1 / (rc.gamma * dv.d * dv.d);
            const Complex res = Bp - (alpha - rc.beta * B + rc.gamma * B * B);
            double m = std::abs(res);
            if (!std::isfinite(m) || !std::isfinite(std::abs(B))) m = std::numeric_limits<double>::infinity();
            worst = std::max(worst, m);
            if (frac == 1.0) B_tau = B;
        }
        r.residual = worst;
        if (loss > kMaxLossBits) {
            std::ostringstream why;
            why << "series cancellation of " << loss << " bits leaves too few digits";
            return fallback(p, omega, tau, r, why.str());
        }
        if (!(worst <= kResidualTol)) {
            std::ostringstream why;
            why << "Riccati residual " << worst << " exceeds " << kResidualTol;
            return fallback(p, omega, tau, r, why.str());
        }
        r.B = B_tau;
        r.diagnostic = "Heun construction accepted by the residual test";
        return r;
    } catch (const NoConvergence& e) {
        return fallback(p, omega, tau, r, std::string("HeunT series: ") + e.what());
    }
}

}  // namespace tdh
