#include "tdheston/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "tdheston/errors.hpp"

namespace tdh::specfun {
namespace {

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

constexpr double kPoleDistance = 1e-12;

bool near_pole(Complex z) {
    if (z.real() > 0.5) return false;
    const double n = std::round(z.real());
    return n <= 0.0 && std::abs(z - Complex(n, 0.0)) < kPoleDistance;
}

Complex lanczos_sum(Complex zm1) {
    Complex x = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (zm1 + static_cast<double>(i));
    return x;
}

// log Gamma(z) for Re z >= 1/2.
Complex lgamma_right(Complex z) {
    const Complex zm1 = z - 1.0;
    const Complex t = zm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (zm1 + 0.5) * std::log(t) - t +
           std::log(lanczos_sum(zm1));
}

// log sin(pi z) without overflow for large |Im z|.
Complex log_sin_pi(Complex z) {
    using std::numbers::pi;
    const Complex i(0.0, 1.0);
    if (z.imag() > 10.0) {
        // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i), dominated by e^{-i pi z}
        return -i * pi * z - std::log(2.0 * i) + std::log(1.0 - std::exp(2.0 * i * pi * z));
    }
    if (z.imag() < -10.0) {
        return i * pi * z - std::log(-2.0 * i) + std::log(1.0 - std::exp(-2.0 * i * pi * z));
    }
    return std::log(std::sin(pi * z));
}

}  // namespace

Complex complex_gamma(Complex z) {
    using std::numbers::pi;
    if (near_pole(z)) throw PoleError("complex_gamma: argument at a pole of Gamma");
    if (z.real() < 0.5) return pi / (std::sin(pi * z) * complex_gamma(1.0 - z));
    const Complex zm1 = z - 1.0;
    const Complex t = zm1 + kLanczosG + 0.5;
    return std::sqrt(2.0 * pi) * std::exp((zm1 + 0.5) * std::log(t) - t) * lanczos_sum(zm1);
}

Complex complex_lgamma(Complex z) {
    if (near_pole(z)) throw PoleError("complex_lgamma: argument at a pole of Gamma");
    if (z.real() < 0.5) return std::log(std::numbers::pi) - log_sin_pi(z) - lgamma_right(1.0 - z);
    return lgamma_right(z);
}

Complex reciprocal_gamma(Complex z) {
    if (near_pole(z)) return Complex{};
    if (std::abs(z) < 20.0) return 1.0 / complex_gamma(z);
    return std::exp(-complex_lgamma(z));
}

}  // namespace tdh::specfun
