#pragma once

// Generic Kummer M series shared by the double-precision public functions and
// the wide-precision closed-form evaluator.

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "specfun/wide.hpp"
#include "tdheston/errors.hpp"

namespace tdh::specfun::detail {

inline double log2_abs(const std::complex<double>& z) {
    const double m = std::abs(z);
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(m);
}

inline std::complex<double> to_std(const std::complex<double>& z) { return z; }

inline std::complex<double> cexp(const std::complex<double>& z) { return std::exp(z); }
inline wide::Complex cexp(const wide::Complex& z) { return wide::exp(z); }

inline std::complex<double> csqrt(const std::complex<double>& z) { return std::sqrt(z); }
inline wide::Complex csqrt(const wide::Complex& z) { return wide::sqrt(z); }

/// Sum with a running estimate of how many bits were lost to cancellation.
template <class C>
struct SeriesSum {
    C value;
    double log2_cancellation = 0.0;
    int terms = 0;
};

/// Plain series sum_n (a)_n z^n / ((b)_n n!). Stops after three consecutive
/// terms below 2^log2_tol relative to the partial sum.
template <class C>
SeriesSum<C> hyp1f1_series(const C& a, const C& b, const C& z, double log2_tol, int max_terms) {
    C term(1.0);
    C sum(1.0);
    double log2_max = 0.0;
    int small = 0;
    for (int n = 0; n < max_terms; ++n) {
        const double nn = static_cast<double>(n);
        C factor = (a + nn) * z;
        factor /= (b + nn) * (nn + 1.0);
        term *= factor;
        sum += term;
        const double lt = log2_abs(term);
        const double ls = log2_abs(sum);
        if (!std::isfinite(ls) && ls > 0.0) throw NoConvergence("kummer_m: series overflow");
        if (lt > log2_max) log2_max = lt;
        if (lt < ls + log2_tol || lt == -std::numeric_limits<double>::infinity()) {
            if (++small == 3) {
                const double cancel = std::isfinite(ls) ? std::max(0.0, log2_max - ls) : 0.0;
                return {std::move(sum), cancel, n + 2};
            }
        } else {
            small = 0;
        }
    }
    throw NoConvergence("kummer_m: series did not converge within " + std::to_string(max_terms) +
                        " terms");
}

/// Threshold on |z| above which Re z < 0 triggers the Kummer transformation.
inline constexpr double kKummerTransformRadius = 30.0;

/// M(a, b, z) with M(a,b,z) = e^z M(b-a, b, -z) applied when Re z < 0 and |z| > 30.
template <class C>
SeriesSum<C> kummer_m_sum(const C& a, const C& b, const C& z, double log2_tol, int max_terms) {
    const std::complex<double> zd = to_std(z);
    if (zd.real() < 0.0 && std::abs(zd) > kKummerTransformRadius) {
        SeriesSum<C> s = hyp1f1_series(C(b - a), b, C(-z), log2_tol, max_terms);
        s.value *= cexp(z);
        return s;
    }
    return hyp1f1_series(a, b, z, log2_tol, max_terms);
}

inline SeriesSum<std::complex<double>> hyp1f1_series_real_b(const std::complex<double>& a, double b,
                                                           const std::complex<double>& z, double log2_tol,
                                                           int max_terms) {
    return hyp1f1_series(a, std::complex<double>(b), z, log2_tol, max_terms);
}

inline SeriesSum<wide::Complex> hyp1f1_series_real_b(const wide::Complex& a, double b, const wide::Complex& z,
                                                     double log2_tol, int max_terms) {
    SeriesSum<wide::Complex> s;
    s.value = wide::hyp1f1_series_real_b(a, b, z, log2_tol, max_terms, s.log2_cancellation, s.terms);
    return s;
}

/// kummer_m_sum for real b, the only case the closed form needs.
template <class C>
SeriesSum<C> kummer_m_sum_real_b(const C& a, double b, const C& z, double log2_tol, int max_terms) {
    const std::complex<double> zd = to_std(z);
    if (zd.real() < 0.0 && std::abs(zd) > kKummerTransformRadius) {
        SeriesSum<C> s = hyp1f1_series_real_b(C(C(b) - a), b, C(-z), log2_tol, max_terms);
        s.value *= cexp(z);
        return s;
    }
    return hyp1f1_series_real_b(a, b, z, log2_tol, max_terms);
}

}  // namespace tdh::specfun::detail
