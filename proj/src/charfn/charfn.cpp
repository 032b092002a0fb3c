#include <algorithm>
#include <cmath>
#include <map>

#include "tdheston/charfn.hpp"
#include "tdheston/errors.hpp"
#include "tdheston/quadrature.hpp"

namespace tdh {
namespace {

CharFnValue make_value(Complex omega, Complex A, Complex B, bool fallback) {
    return {A, B, Complex(0.0, 1.0) * omega, std::exp(A), fallback};
}

CharFnValue numeric_value(const LinearParams& p, Complex omega, double tau, bool fallback) {
    CharFnValue v = riccati_solve_numeric(p, omega, tau);
    v.fallback_used = fallback;
    return v;
}

CharFnValue closed_value(const LinearParams& p, Complex omega, double tau, const CfAccuracy& acc) {
    const Complex B = b_closed_constant_eta(p, omega, tau);
    const Complex g1 = p.kappa1 - Complex(0.0, 1.0) * p.rho1 * p.eta2 * omega;
    if (std::abs(g1) < 1e-12 && p.kappa1 == 0.0 && p.theta1 == 0.0) {
        // beta and kappa theta are both constant: A is elementary as well.
        const CharFnValue c = heston_constant_cf(p.kappa2, p.theta2, p.eta2, p.rho2, omega, tau);
        return make_value(omega, c.A, B, false);
    }
    // Every sweep of nodes goes through one multi-tau evaluation, which shares the
    // tau-independent Kummer sums and the precision search.
    auto batch = [&](const std::vector<double>& s) {
        std::vector<double> sorted(s);
        std::sort(sorted.begin(), sorted.end());
        const std::vector<Complex> b = b_closed_constant_eta(p, omega, sorted);
        std::vector<Complex> out(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) {
            const auto it = std::lower_bound(sorted.begin(), sorted.end(), s[k]);
            const double sk = s[k];
            out[k] = p.kappa(sk) * p.theta(sk) * b[static_cast<std::size_t>(it - sorted.begin())];
        }
        return out;
    };
    quad::Options opts;
    opts.abs_tol = 1e-10;
    if (acc.f_abs_tol > 0.0) {
        opts.tol_from_estimate = [&](const Complex& a_est) {
            const double mag = std::abs(std::exp(a_est + B * acc.v));
            return std::min(0.1, acc.f_abs_tol / std::max(mag, 1e-300));
        };
    }
    const Complex A = quad::integrate_batched(batch, 0.0, tau, opts).value;
    return make_value(omega, A, B, false);
}

struct HeunNodeFallback {};

CharFnValue heun_value(const LinearParams& p, Complex omega, double tau) {
    const HeunResult r = b_heun_linear_eta(p, omega, tau);
    if (r.fallback_used) return numeric_value(p, omega, tau, true);
    try {
        const Complex A = a_from_b(p, omega, tau, [&](double s) {
            const HeunResult node = b_heun_linear_eta(p, omega, s);
            if (node.fallback_used) throw HeunNodeFallback{};
            return node.B;
        });
        return make_value(omega, A, r.B, false);
    } catch (const HeunNodeFallback&) {
        return numeric_value(p, omega, tau, true);
    }
}

}  // namespace

Complex a_from_b(const LinearParams& p, Complex omega, double tau, const std::function<Complex(double)>& b_eval) {
    (void)omega;
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("a_from_b: tau must be finite and >= 0");
    if (tau == 0.0) return 0.0;
    std::map<double, Complex> memo;
    auto integrand = [&](double s) -> Complex {
        auto it = memo.find(s);
        Complex b;
        if (it != memo.end()) {
            b = it->second;
        } else {
            b = b_eval(s);
            memo.emplace(s, b);
        }
        return p.kappa(s) * p.theta(s) * b;
    };
    quad::Options opts;
    opts.abs_tol = 1e-10;
    return quad::integrate(integrand, 0.0, tau, opts).value;
}

CharFnValue char_fn_value(const LinearParams& p, Complex omega, double tau, Route route, const CfAccuracy& acc) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("char_fn: tau must be finite and >= 0");
    p.validate(tau);
    if (route == Route::Closed && p.eta1 != 0.0)
        throw RouteMismatch("route 'closed' needs constant eta (eta1 = 0); use heun or numeric");
    if (route == Route::Heun && p.eta1 == 0.0)
        throw RouteMismatch("route 'heun' needs linear eta (eta1 != 0); use closed or numeric");
    if (tau == 0.0 || std::abs(riccati_alpha(omega)) < 1e-14) return make_value(omega, 0.0, 0.0, false);

    switch (route) {
        case Route::Numeric: return numeric_value(p, omega, tau, false);
        case Route::Closed: return closed_value(p, omega, tau, acc);
        case Route::Heun: return heun_value(p, omega, tau);
        case Route::Auto:
            if (p.eta1 != 0.0) return heun_value(p, omega, tau);
            try {
                return closed_value(p, omega, tau, acc);
            } catch (const NoConvergence&) {
                return numeric_value(p, omega, tau, true);
            }
    }
    return numeric_value(p, omega, tau, false);
}

Complex char_fn(const LinearParams& p, double x, double v, double tau, Complex omega, Route route) {
    if (!(v >= 0.0)) throw InvalidArgument("char_fn: V must be >= 0");
    return char_fn_value(p, omega, tau, route).assemble(x, v);
}

}  // namespace tdh
