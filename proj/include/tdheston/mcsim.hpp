#pragma once

// Monte Carlo for the time-dependent Heston SDEs: full-truncation Euler on
// (log S, V), risk-neutral drift, per-step correlation rho.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tdheston/charfn.hpp"
#include "tdheston/pricer.hpp"

namespace tdh {

enum class Scheme { FullTruncationEuler };

struct SimConfig {
    std::uint64_t n_paths = 100'000;
    int n_steps = 250;
    std::uint64_t seed = 42;
    bool antithetic = true;
    Scheme scheme = Scheme::FullTruncationEuler;

    /// Throws InvalidArgument: n_paths >= 2 (even when antithetic), n_steps >= 1.
    void validate() const;
};

struct PathSample {
    std::uint64_t path_id = 0;
    std::vector<double> times;  // calendar time t, from 0 to T
    std::vector<double> s;
    std::vector<double> v;
};

/// 64-bit generator with 2^256 - 1 period. Streams are keyed by (seed, index)
/// through splitmix64, so path i does not depend on how many paths are drawn.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;
    Xoshiro256(std::uint64_t seed, std::uint64_t stream);
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()();

private:
    std::uint64_t s_[4];
};

/// Parameters are read at tau = T - t_n, the left end of each step in calendar
/// time. Each path goes to the sink as soon as it is complete. mcsim accepts
/// eta = 0 (deterministic variance), unlike the CF routes.
void simulate_paths(const MarketContext& ctx, const LinearParams& params, const SimConfig& cfg,
                    const std::function<void(const PathSample&)>& sink);

std::vector<PathSample> simulate_paths(const MarketContext& ctx, const LinearParams& params, const SimConfig& cfg);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Discounted call payoff mean and its standard error (pair means when antithetic).
McEstimate mc_price(const MarketContext& ctx, const LinearParams& params, const SimConfig& cfg);

struct McStrikeResult {
    std::vector<McEstimate> calls;
    McEstimate discounted_spot;  // e^{-rT} mean(S_T), should be S0
};

/// One set of paths shared across strikes (ctx.strike is ignored).
McStrikeResult mc_price_strikes(const MarketContext& ctx, const LinearParams& params,
                                const std::vector<double>& strikes, const SimConfig& cfg);

}  // namespace tdh
