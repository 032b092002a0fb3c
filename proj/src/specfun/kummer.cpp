#include <cmath>
#include <numbers>

#include "specfun/kummer_series.hpp"
#include "tdheston/errors.hpp"
#include "tdheston/specfun.hpp"

namespace tdh::specfun {
namespace {

bool is_nonpositive_integer(Complex b, double tol) {
    const double n = std::round(b.real());
    return n <= 0.0 && std::abs(b - Complex(n, 0.0)) < tol;
}

bool near_integer(Complex b, double tol) {
    const double n = std::round(b.real());
    return std::abs(b - Complex(n, 0.0)) < tol;
}

}  // namespace

void SeriesPolicy::validate() const {
    if (!(rel_tol > 0.0)) throw InvalidArgument("SeriesPolicy: rel_tol must be positive");
    if (max_terms < 10) throw InvalidArgument("SeriesPolicy: max_terms must be at least 10");
}

Complex kummer_m(Complex a, Complex b, Complex z, const SeriesPolicy& policy) {
    policy.validate();
    if (is_nonpositive_integer(b, 1e-12)) throw PoleError("kummer_m: b is a non-positive integer");
    const double log2_tol = std::log2(policy.rel_tol);
    const auto s = detail::kummer_m_sum(a, b, z, log2_tol, policy.max_terms);
    // Cancellation eats into the 53 bits; redo the sum wide enough to absorb it.
    if (s.log2_cancellation <= 4.0) return s.value;
    wide::WorkingPrecision guard(64 + static_cast<long>(std::ceil(s.log2_cancellation)));
    return detail::kummer_m_sum(wide::Complex(a), wide::Complex(b), wide::Complex(z), log2_tol, policy.max_terms)
        .value.to_std();
}

Complex kummer_m_prime(Complex a, Complex b, Complex z, const SeriesPolicy& policy) {
    policy.validate();
    if (is_nonpositive_integer(b, 1e-12)) throw PoleError("kummer_m_prime: b is a non-positive integer");
    if (a == Complex{}) return {};
    return a / b * kummer_m(a + 1.0, b + 1.0, z, policy);
}

Complex kummer_u(Complex a, Complex b, Complex z, const SeriesPolicy& policy) {
    using std::numbers::pi;
    policy.validate();
    if (near_integer(b, 1e-8)) throw DegenerateB("kummer_u: b within 1e-8 of an integer");
    const Complex first = kummer_m(a, b, z, policy) * reciprocal_gamma(1.0 + a - b) * reciprocal_gamma(b);
    const Complex rga = reciprocal_gamma(a);
    Complex second{};
    if (rga != Complex{} && !(z == Complex{} && (1.0 - b).real() > 0.0)) {
        second = std::pow(z, 1.0 - b) * kummer_m(1.0 + a - b, 2.0 - b, z, policy) * rga *
                 reciprocal_gamma(2.0 - b);
    }
    return pi / std::sin(pi * b) * (first - second);
}

Complex kummer_u_prime(Complex a, Complex b, Complex z, const SeriesPolicy& policy) {
    if (a == Complex{}) {
        policy.validate();
        if (near_integer(b, 1e-8)) throw DegenerateB("kummer_u_prime: b within 1e-8 of an integer");
        return {};
    }
    return -a * kummer_u(a + 1.0, b + 1.0, z, policy);
}

}  // namespace tdh::specfun
