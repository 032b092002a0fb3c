#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

#include <complex>
#include <functional>
#include <vector>

namespace tdh::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 500;
    // Batched variant only: if set, the tolerance is recomputed from the running
    // estimate after every sweep (and never drops below abs_tol).
    std::function<double(const std::complex<double>&)> tol_from_estimate;
};

template <class T>
struct Result {
    T value;
    double error = 0.0;
    int evaluations = 0;
};

/// f(x, out) writes dim values at x. The error norm is the largest component error.
/// Throws QuadratureFailure when max_intervals is exhausted before the tolerance is met.
Result<std::vector<double>> integrate(const std::function<void(double, std::vector<double>&)>& f,
                                      std::size_t dim, double a, double b, const Options& opts = {});

Result<std::complex<double>> integrate(const std::function<std::complex<double>(double)>& f, double a,
                                       double b, const Options& opts = {});

/// Batched variant: f receives every node of one refinement sweep at once, so an
/// integrand with expensive shared set-up can amortise it. Panels whose error
/// exceeds their share of the tolerance are all bisected in the same sweep.
Result<std::complex<double>> integrate_batched(
    const std::function<std::vector<std::complex<double>>(const std::vector<double>&)>& f, double a, double b,
    const Options& opts = {});

}  // namespace tdh::quad
