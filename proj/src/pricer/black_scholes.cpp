#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tdheston/errors.hpp"
#include "tdheston/pricer.hpp"

namespace tdh {
namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double black_scholes_call(double spot, double strike, double rate, double maturity, double sigma) {
    const double df = std::exp(-rate * maturity);
    const double sd = sigma * std::sqrt(maturity);
    if (sd <= 0.0) return std::max(spot - strike * df, 0.0);
    const double d1 = (std::log(spot / strike) + rate * maturity) / sd + 0.5 * sd;
    return spot * norm_cdf(d1) - strike * df * norm_cdf(d1 - sd);
}

double black_scholes_put(double spot, double strike, double rate, double maturity, double sigma) {
    return black_scholes_call(spot, strike, rate, maturity, sigma) - spot + strike * std::exp(-rate * maturity);
}

double black_scholes_vega(double spot, double strike, double rate, double maturity, double sigma) {
    const double sd = sigma * std::sqrt(maturity);
    if (sd <= 0.0) return 0.0;
    const double d1 = (std::log(spot / strike) + rate * maturity) / sd + 0.5 * sd;
    return spot * std::sqrt(maturity) * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * std::numbers::pi);
}

double implied_vol(double call_price, double spot, double strike, double rate, double maturity) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(maturity > 0.0))
        throw InvalidArgument("implied_vol: spot, strike and maturity must be positive");
    const double lower = std::max(spot - strike * std::exp(-rate * maturity), 0.0);
    if (!(call_price > lower) || !(call_price < spot)) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "implied_vol: price " << call_price << " outside the no-arbitrage interval (" << lower << ", "
            << spot << ") for strike " << strike;
        throw NoImpliedVol(msg.str());
    }
    auto f = [&](double s) { return black_scholes_call(spot, strike, rate, maturity, s) - call_price; };
    double lo = 0.0, hi = 1.0;
    while (f(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e3) throw NoImpliedVol("implied_vol: no volatility below 1000 reproduces the price");
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        const double v = f(s);
        if (v > 0.0) hi = s; else lo = s;
        const double vega = black_scholes_vega(spot, strike, rate, maturity, s);
        double next = vega > 0.0 ? s - v / vega : -1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - s);
        s = next;
        if (step < 1e-12 || hi - lo < 1e-10) return s;
    }
    return s;
}

}  // namespace tdh
