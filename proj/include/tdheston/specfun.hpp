#pragma once

// Complex-argument special functions: gamma, Kummer M and U with their
// z-derivatives, and a power-series solver for second-order linear ODEs with
// polynomial coefficients (used for the triconfluent Heun function).

#include <complex>
#include <initializer_list>
#include <vector>

namespace tdh::specfun {

using Complex = std::complex<double>;

struct SeriesPolicy {
    double rel_tol = 1e-14;
    int max_terms = 1000;

    /// Throws InvalidArgument unless rel_tol > 0 and max_terms >= 10.
    void validate() const;
};

/// Polynomial in z with complex coefficients, lowest degree first.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<Complex> coeffs) : coeffs_(coeffs) {}
    explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {}

    Complex operator()(Complex z) const;
    Complex coefficient(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Complex{}; }
    std::size_t size() const { return coeffs_.size(); }
    const std::vector<Complex>& coefficients() const { return coeffs_; }

private:
    std::vector<Complex> coeffs_;
};

/// leading(z) w'' + p(z) w' + q(z) w = 0
struct PolyCoeffODE {
    Polynomial leading{1.0};
    Polynomial p;
    Polynomial q;
};

struct SeriesSolution {
    Complex w;
    Complex wprime;
    Complex wsecond;        // summed from the same coefficient sequence
    int terms = 0;
    double log2_cancellation = 0.0;  // log2(max |term| / |w|), a loss-of-digits estimate
};

/// Gamma(z) by Lanczos approximation, reflection for Re z < 1/2.
/// Throws PoleError within 1e-12 of a non-positive integer.
Complex complex_gamma(Complex z);

/// Principal-sheet log Gamma(z) (continuous for Re z > 0, reflection otherwise).
Complex complex_lgamma(Complex z);

/// 1/Gamma(z); exactly zero at the poles of Gamma.
Complex reciprocal_gamma(Complex z);

/// Kummer M(a, b, z) = sum (a)_n z^n / ((b)_n n!).
Complex kummer_m(Complex a, Complex b, Complex z, const SeriesPolicy& policy = {});

/// Tricomi U(a, b, z) through the reflection formula, principal branch of z^(1-b).
/// b must keep at least 1e-8 away from any integer.
Complex kummer_u(Complex a, Complex b, Complex z, const SeriesPolicy& policy = {});

/// dM/dz = (a/b) M(a+1, b+1, z)
Complex kummer_m_prime(Complex a, Complex b, Complex z, const SeriesPolicy& policy = {});

/// dU/dz = -a U(a+1, b+1, z)
Complex kummer_u_prime(Complex a, Complex b, Complex z, const SeriesPolicy& policy = {});

/// Evaluates the series solution about the origin with w(0) = w0, w'(0) = w0prime at z.
/// Throws IrregularPoint if leading(0) == 0 and NoConvergence if the terms do not
/// settle within policy.max_terms.
SeriesSolution series_solve_poly_ode(const PolyCoeffODE& ode, Complex w0, Complex w0prime,
                                     Complex z, const SeriesPolicy& policy = {});

/// The triconfluent Heun equation in the form
///   w'' - (3 z^2 + gamma) w' + ((beta - 3) z + alpha) w = 0
PolyCoeffODE triconfluent_heun_ode(Complex alpha, Complex beta, Complex gamma);

/// HeunT(alpha, beta, gamma, z) normalised to w(0) = 1, w'(0) = 0.
SeriesSolution heun_t(Complex alpha, Complex beta, Complex gamma, Complex z,
                      const SeriesPolicy& policy = {});

}  // namespace tdh::specfun
