#pragma once

// Wide floating point for the internal Kummer evaluations that need more than
// double precision. Precision is taken from a thread-local working precision so
// that generic code can construct values from doubles without threading a
// precision argument through every expression.

#include <mpfr.h>

#include <complex>

namespace tdh::wide {

long working_bits();

/// Sets the thread's working precision for newly constructed values.
class WorkingPrecision {
public:
    explicit WorkingPrecision(long bits);
    ~WorkingPrecision();
    WorkingPrecision(const WorkingPrecision&) = delete;
    WorkingPrecision& operator=(const WorkingPrecision&) = delete;

private:
    long previous_;
};

class Real {
public:
    Real();
    Real(double x);  // NOLINT(google-explicit-constructor)
    Real(const Real& other);
    Real(Real&& other) noexcept;
    Real& operator=(const Real& other);
    Real& operator=(Real&& other) noexcept;
    ~Real();

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    /// log2 |x|, -inf for zero.
    double log2_abs() const;
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }

    Real& operator+=(const Real& o);
    Real& operator-=(const Real& o);
    Real& operator*=(const Real& o);
    Real& operator/=(const Real& o);
    Real& operator*=(double o);
    Real& operator/=(double o);

    friend Real operator-(const Real& x);

private:
    mpfr_t v_;
};

inline Real operator+(Real a, const Real& b) { return a += b; }
inline Real operator-(Real a, const Real& b) { return a -= b; }
inline Real operator*(Real a, const Real& b) { return a *= b; }
inline Real operator/(Real a, const Real& b) { return a /= b; }

Real sqrt(const Real& x);

class Complex {
public:
    Complex() = default;
    Complex(double re) : re_(re), im_(0.0) {}  // NOLINT(google-explicit-constructor)
    Complex(std::complex<double> z) : re_(z.real()), im_(z.imag()) {}  // NOLINT
    Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}

    const Real& real() const { return re_; }
    const Real& imag() const { return im_; }

    std::complex<double> to_std() const { return {re_.to_double(), im_.to_double()}; }
    double log2_abs() const;
    bool is_finite() const { return re_.is_finite() && im_.is_finite(); }

    Complex& operator+=(const Complex& o);
    Complex& operator-=(const Complex& o);
    Complex& operator*=(const Complex& o);
    Complex& operator/=(const Complex& o);
    Complex& operator*=(double o);
    Complex& operator/=(double o);
    Complex& operator+=(double o);

    friend Complex operator-(const Complex& z) { return {-z.re_, -z.im_}; }

private:
    Real re_;
    Real im_;
};

inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
inline Complex operator*(Complex a, const Complex& b) { return a *= b; }
inline Complex operator/(Complex a, const Complex& b) { return a /= b; }
inline Complex operator*(Complex a, double b) { return a *= b; }
inline Complex operator*(double b, Complex a) { return a *= b; }
inline Complex operator/(Complex a, double b) { return a /= b; }
inline Complex operator+(Complex a, double b) { return a += b; }

Complex exp(const Complex& z);
/// Principal square root.
Complex sqrt(const Complex& z);

inline double log2_abs(const Complex& z) { return z.log2_abs(); }

/// Kummer series sum_n (a)_n z^n / ((b)_n n!) for real b, computed in place without
/// temporaries. Same stopping rule as the generic series; reports log2 of the
/// largest term over the sum (bits lost to cancellation) and the term count.
Complex hyp1f1_series_real_b(const Complex& a, double b, const Complex& z, double log2_tol, int max_terms,
                             double& log2_cancellation, int& terms);
inline std::complex<double> to_std(const Complex& z) { return z.to_std(); }
inline bool is_finite(const Complex& z) { return z.is_finite(); }

}  // namespace tdh::wide
