#pragma once

// European options from the characteristic function by Gil-Pelaez inversion,
// in the forward log-moneyness x = log(S e^{rT} / K).

#include <vector>

#include "tdheston/charfn.hpp"

namespace tdh {

struct MarketContext {
    double spot = 100.0;
    double rate = 0.0;
    double maturity = 1.0;
    double strike = 100.0;
    double v0 = 0.04;

    /// Throws InvalidArgument unless spot, strike, maturity > 0 and v0 >= 0.
    void validate() const;
};

struct PriceResult {
    double call = 0.0;
    double put = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double quad_error_estimate = 0.0;
    double omega_max = 0.0;     // end of the last panel integrated
    bool cap_reached = false;   // the omega cap stopped the panel doubling
    bool fallback_used = false; // some CF value came from the numeric fallback
};

struct PricerOptions {
    double abs_tol = 1e-9;      // per-panel quadrature tolerance on P1, P2
    double first_panel = 25.0;  // [omega_min, first_panel], then doubling widths
    double omega_cap = 400.0;
    double panel_tol = 1e-12;   // stop once a panel contributes less than this
    double omega_min = 1e-10;
};

struct Instrument {
    double strike;
    double maturity;
};

PriceResult price_european(const MarketContext& ctx, const LinearParams& params, Route route = Route::Auto,
                           const PricerOptions& opts = {});

/// Prices several instruments with one quadrature. The CF values at each omega are
/// shared by every strike of a maturity; the numeric route also shares one
/// Riccati integration across maturities.
std::vector<PriceResult> price_many(double spot, double rate, double v0, const LinearParams& params,
                                    const std::vector<Instrument>& instruments, Route route = Route::Auto,
                                    const PricerOptions& opts = {});

struct SmilePoint {
    double strike;
    double maturity;
    double call;
    double put;
    double implied_vol;
};

/// Strikes must be positive and ascending. Throws NoImpliedVol when a price leaves
/// the static no-arbitrage bounds.
std::vector<SmilePoint> smile(const MarketContext& ctx_base, const LinearParams& params,
                              const std::vector<double>& strikes, Route route = Route::Auto,
                              const PricerOptions& opts = {});

double black_scholes_call(double spot, double strike, double rate, double maturity, double sigma);
double black_scholes_put(double spot, double strike, double rate, double maturity, double sigma);
double black_scholes_vega(double spot, double strike, double rate, double maturity, double sigma);

/// Black-Scholes implied volatility of a call price by safeguarded Newton-bisection
/// (tolerance 1e-10 in vol). Throws NoImpliedVol outside (max(S - K e^{-rT}, 0), S).
double implied_vol(double call_price, double spot, double strike, double rate, double maturity);

}  // namespace tdh
