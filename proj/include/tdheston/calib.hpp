#pragma once

// Least-squares fit of the eight linear coefficients (and v0) to option prices.

#include <vector>

#include "tdheston/charfn.hpp"
#include "tdheston/pricer.hpp"

namespace tdh {

struct Quote {
    double strike = 0.0;
    double maturity = 0.0;
    double price = 0.0;  // call price
    double weight = 1.0;
};

struct QuoteGrid {
    double spot = 100.0;
    double rate = 0.0;
    std::vector<Quote> quotes;

    double max_maturity() const;
    /// Throws Infeasible for an empty grid, weights <= 0, or a price outside
    /// max(S - K e^{-rT}, 0) <= C <= S.
    void validate() const;
};

struct CalibOptions {
    Route route = Route::Numeric;
    bool fit_v0 = true;
    int max_iterations = 5000;
    double diameter_tol = 1e-8;     // simplex diameter, scaled by max(1, |x|)
    double improvement_tol = 1e-12; // drop of the simplex-mean objective over stall_window iterations
    int stall_window = 20;
    double objective_target = 1e-20;  // stop as soon as the objective is <= this
    double penalty = 1e4;           // weight on the distance to the feasible box
    double eta_floor = 1e-4;        // eta(tau) >= eta_floor keeps the CF routes defined
    bool throw_on_max_iterations = true;
    PricerOptions pricer{};
};

struct CalibResult {
    LinearParams params;
    double v0 = 0.0;
    double objective = 0.0;
    double rmse = 0.0;  // unweighted price RMSE at the result
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::vector<double> history;  // best objective after each iteration
};

/// Weighted sum of squared price errors for (params, v0).
double calibration_objective(const QuoteGrid& grid, const LinearParams& params, double v0,
                             const CalibOptions& opts = {});

/// Nelder-Mead on sum w (model - quote)^2. Points outside the feasible set are
/// priced at their projection onto it plus an exact L1 penalty on the distance.
/// Throws Infeasible if the grid is invalid or the start cannot be projected,
/// MaxIterations if the cap is hit (unless throw_on_max_iterations is false).
CalibResult calibrate(const QuoteGrid& grid, const LinearParams& initial, double v0_init,
                      const CalibOptions& opts = {});

}  // namespace tdh
