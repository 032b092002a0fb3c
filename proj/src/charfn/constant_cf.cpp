#include <cmath>

#include "charfn/complex_util.hpp"
#include "tdheston/charfn.hpp"
#include "tdheston/errors.hpp"

namespace tdh {

// With d = sqrt(beta^2 - 4 alpha gamma), Re d >= 0, and E = exp(-d tau):
//   B = 2 alpha / (beta + d) * (1 - E) / (1 - g E),   g = 4 alpha gamma / (beta + d)^2
//   A = a [2 alpha tau / (beta + d) - log1p(g (1 - E) / (1 - g)) / gamma]
// which is the usual (beta - d) / (2 gamma) form with the small-gamma cancellation removed.
CharFnValue heston_constant_cf(double kappa, double theta, double eta, double rho, Complex omega, double tau) {
    if (!(tau >= 0.0)) throw InvalidArgument("heston_constant_cf: tau must be >= 0");
    const Complex i(0.0, 1.0);
    const Complex alpha = riccati_alpha(omega);
    CharFnValue out{0.0, 0.0, i * omega, 1.0, false};
    if (std::abs(alpha) < 1e-14 || tau == 0.0) return out;

    const double gamma = 0.5 * eta * eta;
    const double a = kappa * theta;
    const Complex beta = kappa - rho * eta * i * omega;
    Complex d = std::sqrt(beta * beta - 4.0 * alpha * gamma);
    if (d.real() < 0.0) d = -d;
    const Complex bd = beta + d;
    const Complex one_minus_e = -detail::cexpm1(-d * tau);
    const Complex e = 1.0 - one_minus_e;
    const Complex g = 4.0 * alpha * gamma / (bd * bd);

    out.B = 2.0 * alpha / bd * one_minus_e / (1.0 - g * e);
    Complex log_term;
    if (gamma > 0.0) {
        log_term = detail::clog1p(g * one_minus_e / (1.0 - g)) / gamma;
    } else {
        // gamma -> 0 limit of the log term
        log_term = 4.0 * alpha / (bd * bd) * one_minus_e;
    }
    out.A = a * (2.0 * alpha * tau / bd - log_term);
    out.f = std::exp(out.A);
    return out;
}

}  // namespace tdh
