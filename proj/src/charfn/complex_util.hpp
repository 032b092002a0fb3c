#pragma once

#include <cmath>
#include <complex>

namespace tdh::detail {

/// e^w - 1 without cancellation for small |w|.
inline std::complex<double> cexpm1(std::complex<double> w) {
    const double x = w.real();
    const double y = w.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

/// log(1 + w) without cancellation for small |w|.
inline std::complex<double> clog1p(std::complex<double> w) {
    const double x = w.real();
    const double y = w.imag();
    if (std::abs(w) > 0.5) return std::log(1.0 + w);
    return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
}

}  // namespace tdh::detail
