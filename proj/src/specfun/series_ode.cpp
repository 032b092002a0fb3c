#include <algorithm>
#include <cmath>
#include <string>

#include "tdheston/errors.hpp"
#include "tdheston/specfun.hpp"

namespace tdh::specfun {

Complex Polynomial::operator()(Complex z) const {
    Complex acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

SeriesSolution series_solve_poly_ode(const PolyCoeffODE& ode, Complex w0, Complex w0prime, Complex z,
                                     const SeriesPolicy& policy) {
    policy.validate();
    const Complex lead0 = ode.leading.coefficient(0);
    if (lead0 == Complex{}) throw IrregularPoint("series_solve_poly_ode: leading coefficient vanishes at 0");

    const std::size_t deg = std::max({ode.leading.size(), ode.p.size(), ode.q.size(), std::size_t{1}}) - 1;
    // A run of vanishing coefficients can be as long as the recurrence reach, so
    // convergence needs more than that many consecutive small terms.
    const int needed = 3 + static_cast<int>(deg) + 1;

    std::vector<Complex> c;
    c.reserve(static_cast<std::size_t>(policy.max_terms) + 2);
    c.push_back(w0);
    c.push_back(w0prime);

    auto coeff_at = [&c](long k) -> Complex { return k >= 0 ? c[static_cast<std::size_t>(k)] : Complex{}; };

    SeriesSolution out;
    out.w = w0 + w0prime * z;
    out.wprime = w0prime;
    out.wsecond = {};
    double log2_max = std::log2(std::max({std::abs(w0), std::abs(w0prime * z), 1e-300}));

    Complex zpow_nm2 = 1.0;  // z^(n-2) for the current n
    int small = 0;
    const double tol = policy.rel_tol;

    // Terms n = 0, 1 are the initial data; the loop produces c_{n} for n >= 2.
    Complex zpow_n = z * z;     // z^n
    Complex zpow_nm1 = z;       // z^(n-1)
    for (int n = 2; n < policy.max_terms; ++n) {
        // Coefficient of z^(m) with m = n - 2 fixes c_n.
        const long m = n - 2;
        Complex rhs{};
        for (std::size_t j = 1; j < ode.leading.size(); ++j) {
            const long k = m - static_cast<long>(j) + 2;
            rhs += ode.leading.coefficient(j) * static_cast<double>(k * (k - 1)) * coeff_at(k);
        }
        for (std::size_t j = 0; j < ode.p.size(); ++j) {
            const long k = m - static_cast<long>(j) + 1;
            rhs += ode.p.coefficient(j) * static_cast<double>(k) * coeff_at(k);
        }
        for (std::size_t j = 0; j < ode.q.size(); ++j) {
            const long k = m - static_cast<long>(j);
            rhs += ode.q.coefficient(j) * coeff_at(k);
        }
        const Complex cn = -rhs / (lead0 * static_cast<double>(n * (n - 1)));
        c.push_back(cn);

        const Complex t0 = cn * zpow_n;
        const Complex t1 = static_cast<double>(n) * cn * zpow_nm1;
        const Complex t2 = static_cast<double>(n * (n - 1)) * cn * zpow_nm2;
        out.w += t0;
        out.wprime += t1;
        out.wsecond += t2;
        if (std::abs(t0) > 0.0) log2_max = std::max(log2_max, std::log2(std::abs(t0)));
        if (!std::isfinite(std::abs(out.w)) || !std::isfinite(std::abs(out.wsecond)))
            throw NoConvergence("series_solve_poly_ode: series diverged (outside convergence disc?)");

        const bool small_now = std::abs(t0) <= tol * std::abs(out.w) &&
                               std::abs(t1) <= tol * std::abs(out.wprime) &&
                               std::abs(t2) <= tol * std::abs(out.wsecond);
        if (small_now) {
            if (++small >= needed) {
                out.terms = n + 1;
                const double lw = std::abs(out.w) > 0.0 ? std::log2(std::abs(out.w)) : log2_max;
                out.log2_cancellation = std::max(0.0, log2_max - lw);
                return out;
            }
        } else {
            small = 0;
        }
        zpow_nm2 = zpow_nm1;
        zpow_nm1 = zpow_n;
        zpow_n *= z;
    }
    throw NoConvergence("series_solve_poly_ode: no convergence within " + std::to_string(policy.max_terms) +
                        " terms");
}

PolyCoeffODE triconfluent_heun_ode(Complex alpha, Complex beta, Complex gamma) {
    PolyCoeffODE ode;
    ode.leading = Polynomial{1.0};
    ode.p = Polynomial{-gamma, 0.0, -3.0};
    ode.q = Polynomial{alpha, beta - 3.0};
    return ode;
}

SeriesSolution heun_t(Complex alpha, Complex beta, Complex gamma, Complex z, const SeriesPolicy& policy) {
    return series_solve_poly_ode(triconfluent_heun_ode(alpha, beta, gamma), 1.0, 0.0, z, policy);
}

}  // namespace tdh::specfun
