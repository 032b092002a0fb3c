#include "specfun/wide.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <utility>

#include "tdheston/errors.hpp"

namespace tdh::wide {
namespace {

__attribute__((tls_model("initial-exec"))) thread_local long g_working_bits = 128;

}  // namespace

long working_bits() { return g_working_bits; }

WorkingPrecision::WorkingPrecision(long bits) : previous_(g_working_bits) {
    g_working_bits = std::max<long>(bits, MPFR_PREC_MIN);
}

WorkingPrecision::~WorkingPrecision() { g_working_bits = previous_; }

Real::Real() {
    mpfr_init2(v_, g_working_bits);
    mpfr_set_zero(v_, 1);
}

Real::Real(double x) {
    mpfr_init2(v_, g_working_bits);
    mpfr_set_d(v_, x, MPFR_RNDN);
}

Real::Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
    std::memcpy(static_cast<void*>(v_), static_cast<const void*>(other.v_), sizeof(mpfr_t));
    other.v_->_mpfr_d = nullptr;
}

Real& Real::operator=(const Real& other) {
    if (this != &other) {
        if (v_->_mpfr_d == nullptr) mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
}

Real& Real::operator=(Real&& other) noexcept {
    if (this != &other) {
        if (v_->_mpfr_d == nullptr) {
            std::memcpy(static_cast<void*>(v_), static_cast<const void*>(other.v_), sizeof(mpfr_t));
            other.v_->_mpfr_d = nullptr;
        } else if (other.v_->_mpfr_d != nullptr) {
            mpfr_swap(v_, other.v_);
        }
    }
    return *this;
}

Real::~Real() {
    if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
}

double Real::log2_abs() const {
    if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
    if (!mpfr_number_p(v_)) return std::numeric_limits<double>::infinity();
    long e = 0;
    const double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
    return static_cast<double>(e) + std::log2(std::fabs(m));
}

Real& Real::operator+=(const Real& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
Real& Real::operator-=(const Real& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
Real& Real::operator*=(const Real& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
Real& Real::operator/=(const Real& o) {
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
Real& Real::operator*=(double o) {
    mpfr_mul_d(v_, v_, o, MPFR_RNDN);
    return *this;
}
Real& Real::operator/=(double o) {
    mpfr_div_d(v_, v_, o, MPFR_RNDN);
    return *this;
}

Real operator-(const Real& x) {
    Real r(x);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
}

Real sqrt(const Real& x) {
    Real r(x);
    mpfr_sqrt(r.get(), r.get(), MPFR_RNDN);
    return r;
}

double Complex::log2_abs() const {
    const double lr = re_.log2_abs();
    const double li = im_.log2_abs();
    const double hi = std::max(lr, li);
    const double lo = std::min(lr, li);
    if (!std::isfinite(hi)) return hi;
    if (!std::isfinite(lo)) return hi;
    return hi + 0.5 * std::log2(1.0 + std::exp2(2.0 * (lo - hi)));
}

Complex& Complex::operator+=(const Complex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

Complex& Complex::operator-=(const Complex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

Complex& Complex::operator*=(const Complex& o) {
    Real re;
    mpfr_fmms(re.get(), re_.get(), o.re_.get(), im_.get(), o.im_.get(), MPFR_RNDN);
    mpfr_fmma(im_.get(), re_.get(), o.im_.get(), im_.get(), o.re_.get(), MPFR_RNDN);
    re_ = std::move(re);
    return *this;
}

Complex& Complex::operator/=(const Complex& o) {
    Real den;
    mpfr_fmma(den.get(), o.re_.get(), o.re_.get(), o.im_.get(), o.im_.get(), MPFR_RNDN);
    Real re;
    mpfr_fmma(re.get(), re_.get(), o.re_.get(), im_.get(), o.im_.get(), MPFR_RNDN);
    mpfr_fmms(im_.get(), im_.get(), o.re_.get(), re_.get(), o.im_.get(), MPFR_RNDN);
    mpfr_div(re.get(), re.get(), den.get(), MPFR_RNDN);
    mpfr_div(im_.get(), im_.get(), den.get(), MPFR_RNDN);
    re_ = std::move(re);
    return *this;
}

Complex& Complex::operator*=(double o) {
    re_ *= o;
    im_ *= o;
    return *this;
}

Complex& Complex::operator/=(double o) {
    re_ /= o;
    im_ /= o;
    return *this;
}

Complex& Complex::operator+=(double o) {
    mpfr_add_d(re_.get(), re_.get(), o, MPFR_RNDN);
    return *this;
}

Complex exp(const Complex& z) {
    Real mag(z.real());
    mpfr_exp(mag.get(), mag.get(), MPFR_RNDN);
    Real s, c;
    mpfr_sin_cos(s.get(), c.get(), z.imag().get(), MPFR_RNDN);
    c *= mag;
    s *= mag;
    return {std::move(c), std::move(s)};
}

Complex sqrt(const Complex& z) {
    // sqrt((|z| + x)/2) + i sign(y) sqrt((|z| - x)/2)
    Real modulus;
    mpfr_hypot(modulus.get(), z.real().get(), z.imag().get(), MPFR_RNDN);
    if (modulus.is_zero()) return {};
    Real re = modulus + z.real();
    re /= 2.0;
    mpfr_sqrt(re.get(), re.get(), MPFR_RNDN);
    Real im = modulus - z.real();
    im /= 2.0;
    mpfr_sqrt(im.get(), im.get(), MPFR_RNDN);
    if (mpfr_signbit(z.imag().get())) im = -im;
    return {std::move(re), std::move(im)};
}

namespace {

// Coarse log2 |x| from the binary exponent; one bit of slack is plenty for
// cancellation bookkeeping.
double coarse_log2(mpfr_srcptr x) {
    if (mpfr_zero_p(x)) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(mpfr_get_exp(x));
}

double coarse_log2(mpfr_srcptr re, mpfr_srcptr im) { return std::max(coarse_log2(re), coarse_log2(im)); }

struct Scratch {
    mpfr_t v[12];
    explicit Scratch(long bits) {
        for (auto& x : v) mpfr_init2(x, bits);
    }
    ~Scratch() {
        for (auto& x : v) mpfr_clear(x);
    }
    Scratch(const Scratch&) = delete;
    Scratch& operator=(const Scratch&) = delete;
};

}  // namespace

Complex hyp1f1_series_real_b(const Complex& a, double b, const Complex& z, double log2_tol, int max_terms,
                             double& log2_cancellation, int& terms) {
    const long bits = g_working_bits;
    Scratch s(bits);
    mpfr_ptr azr = s.v[0], azi = s.v[1], zr = s.v[2], zi = s.v[3], tr = s.v[4], ti = s.v[5], sr = s.v[6],
             si = s.v[7], fr = s.v[8], fi = s.v[9], tmp = s.v[10], tmp2 = s.v[11];
    mpfr_set(zr, z.real().get(), MPFR_RNDN);
    mpfr_set(zi, z.imag().get(), MPFR_RNDN);
    mpfr_fmms(azr, a.real().get(), zr, a.imag().get(), zi, MPFR_RNDN);
    mpfr_fmma(azi, a.real().get(), zi, a.imag().get(), zr, MPFR_RNDN);
    mpfr_set_d(tr, 1.0, MPFR_RNDN);
    mpfr_set_zero(ti, 1);
    mpfr_set_d(sr, 1.0, MPFR_RNDN);
    mpfr_set_zero(si, 1);

    double log2_max = 0.0;
    int small = 0;
    for (int n = 0; n < max_terms; ++n) {
        const double nn = static_cast<double>(n);
        // factor = (a + n) z = a z + n z
        mpfr_mul_d(fr, zr, nn, MPFR_RNDN);
        mpfr_add(fr, fr, azr, MPFR_RNDN);
        mpfr_mul_d(fi, zi, nn, MPFR_RNDN);
        mpfr_add(fi, fi, azi, MPFR_RNDN);
        // term *= factor (plain products: fmma's exact intermediates cost more than
        // the half-ulp they save)
        mpfr_mul(tmp, tr, fr, MPFR_RNDN);
        mpfr_mul(tmp2, ti, fi, MPFR_RNDN);
        mpfr_sub(tmp, tmp, tmp2, MPFR_RNDN);
        mpfr_mul(tmp2, tr, fi, MPFR_RNDN);
        mpfr_mul(ti, ti, fr, MPFR_RNDN);
        mpfr_add(ti, ti, tmp2, MPFR_RNDN);
        mpfr_swap(tr, tmp);
        const double den = (b + nn) * (nn + 1.0);
        mpfr_div_d(tr, tr, den, MPFR_RNDN);
        mpfr_div_d(ti, ti, den, MPFR_RNDN);
        mpfr_add(sr, sr, tr, MPFR_RNDN);
        mpfr_add(si, si, ti, MPFR_RNDN);
        if (!mpfr_number_p(sr) || !mpfr_number_p(si)) throw NoConvergence("kummer_m: series overflow");
        const double lt = coarse_log2(tr, ti);
        const double ls = coarse_log2(sr, si);
        if (lt > log2_max) log2_max = lt;
        if (lt < ls + log2_tol || lt == -std::numeric_limits<double>::infinity()) {
            if (++small == 3) {
                log2_cancellation = std::isfinite(ls) ? std::max(0.0, log2_max - ls) : 0.0;
                terms = n + 2;
                Real re, im;
                mpfr_set(re.get(), sr, MPFR_RNDN);
                mpfr_set(im.get(), si, MPFR_RNDN);
                return {std::move(re), std::move(im)};
            }
        } else {
            small = 0;
        }
    }
    throw NoConvergence("kummer_m: series did not converge within " + std::to_string(max_terms) + " terms");
}

}  // namespace tdh::wide
