#include "tdheston/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tdheston/errors.hpp"

namespace tdh {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Neumaier summation.
class Sum {
public:
    void add(double x) {
        const double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

class Moments {
public:
    void add(double x) {
        sum_.add(x);
        sq_.add(x * x);
        ++n_;
    }
    McEstimate estimate(double scale) const {
        const double n = static_cast<double>(n_);
        const double mean = sum_.value() / n;
        const double var = std::max(0.0, (sq_.value() - n * mean * mean) / (n - 1.0));
        return {scale * mean, scale * std::sqrt(var / n)};
    }

private:
    Sum sum_, sq_;
    std::uint64_t n_ = 0;
};

// Per-step coefficients; step n runs from t_n to t_{n+1} with parameters at tau = T - t_n.
struct Grid {
    double dt = 0.0, sqdt = 0.0, drift_r = 0.0;
    std::vector<double> kappa, theta, eta, rho, rho_bar;
};

void check_params(const LinearParams& p, double T) {
    for (double tau : {0.0, T}) {
        const double r = p.rho(tau);
        if (!(std::abs(r) <= 1.0)) {
            std::ostringstream msg;
            msg << "mcsim: |rho(" << tau << ")| = " << std::abs(r) << " exceeds 1";
            throw InvalidCorrelation(msg.str());
        }
    }
    for (double tau : {0.0, T}) {
        if (!(p.kappa(tau) >= 0.0) || !(p.theta(tau) >= 0.0) || !(p.eta(tau) >= 0.0)) {
            std::ostringstream msg;
            msg << "mcsim: kappa, theta and eta must be >= 0 at tau = " << tau;
            throw InvalidParams(msg.str());
        }
    }
}

Grid make_grid(const MarketContext& ctx, const LinearParams& p, const SimConfig& cfg) {
    ctx.validate();
    cfg.validate();
    check_params(p, ctx.maturity);
    Grid g;
    const int n = cfg.n_steps;
    g.dt = ctx.maturity / n;
    g.sqdt = std::sqrt(g.dt);
    g.drift_r = ctx.rate * g.dt;
    for (int k = 0; k < n; ++k) {
        const double tau = ctx.maturity - k * g.dt;
        const double r = std::clamp(p.rho(tau), -1.0, 1.0);
        g.kappa.push_back(p.kappa(tau));
        g.theta.push_back(p.theta(tau));
        g.eta.push_back(p.eta(tau));
        g.rho.push_back(r);
        g.rho_bar.push_back(std::sqrt(1.0 - r * r));
    }
    return g;
}

struct State {
    double x, v;  // log S, V
};

inline void step(const Grid& g, int k, State& st, double z1, double z2) {
    const double vp = std::max(st.v, 0.0);
    const double sv = std::sqrt(vp) * g.sqdt;
    const double w2 = g.rho[k] * z1 + g.rho_bar[k] * z2;
    st.x += g.drift_r - 0.5 * vp * g.dt + sv * z1;
    st.v += g.kappa[k] * (g.theta[k] - vp) * g.dt + g.eta[k] * sv * w2;
}

// Calls visit(unit, s_terminal_a, s_terminal_b_or_nan) for each simulation unit
// (an antithetic pair or a single path), in path order.
template <class Visit>
void run_terminal(const MarketContext& ctx, const Grid& g, const SimConfig& cfg, Visit visit) {
    const double x0 = std::log(ctx.spot);
    const std::uint64_t units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    const int n = cfg.n_steps;
    for (std::uint64_t u = 0; u < units; ++u) {
        Xoshiro256 rng(cfg.seed, u);
        std::normal_distribution<double> normal;
        State a{x0, ctx.v0}, b{x0, ctx.v0};
        for (int k = 0; k < n; ++k) {
            const double z1 = normal(rng), z2 = normal(rng);
            step(g, k, a, z1, z2);
            if (cfg.antithetic) step(g, k, b, -z1, -z2);
        }
        visit(std::exp(a.x), cfg.antithetic ? std::exp(b.x) : std::nan(""));
    }
}

}  // namespace

void SimConfig::validate() const {
    if (n_paths < 2) throw InvalidArgument("mcsim: n_paths must be >= 2");
    if (antithetic && n_paths % 2 != 0) throw InvalidArgument("mcsim: n_paths must be even with antithetic pairs");
    if (n_steps < 1) throw InvalidArgument("mcsim: n_steps must be >= 1");
}

Xoshiro256::Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed;
    const std::uint64_t key = splitmix64(x);
    std::uint64_t y = key ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    for (auto& w : s_) w = splitmix64(y);
}

Xoshiro256::result_type Xoshiro256::operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

void simulate_paths(const MarketContext& ctx, const LinearParams& params, const SimConfig& cfg,
                    const std::function<void(const PathSample&)>& sink) {
    const Grid g = make_grid(ctx, params, cfg);
    const int n = cfg.n_steps;
    const std::uint64_t units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    const int per_unit = cfg.antithetic ? 2 : 1;
    std::vector<double> times(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) times[static_cast<std::size_t>(k)] = k == n ? ctx.maturity : k * g.dt;

    PathSample ps[2];
    for (std::uint64_t u = 0; u < units; ++u) {
        Xoshiro256 rng(cfg.seed, u);
        std::normal_distribution<double> normal;
        State st[2] = {{std::log(ctx.spot), ctx.v0}, {std::log(ctx.spot), ctx.v0}};
        for (int j = 0; j < per_unit; ++j) {
            ps[j].path_id = u * per_unit + j;
            ps[j].times = times;
            ps[j].s.assign(1, ctx.spot);
            ps[j].v.assign(1, ctx.v0);
        }
        for (int k = 0; k < n; ++k) {
            const double z1 = normal(rng), z2 = normal(rng);
            for (int j = 0; j < per_unit; ++j) {
                const double sign = j == 0 ? 1.0 : -1.0;
                step(g, k, st[j], sign * z1, sign * z2);
                ps[j].s.push_back(std::exp(st[j].x));
                ps[j].v.push_back(std::max(st[j].v, 0.0));
            }
        }
        for (int j = 0; j < per_unit; ++j) sink(ps[j]);
    }
}

std::vector<PathSample> simulate_paths(const MarketContext& ctx, const LinearParams& params, const SimConfig& cfg) {
    std::vector<PathSample> out;
    simulate_paths(ctx, params, cfg, [&](const PathSample& p) { out.push_back(p); });
    return out;
}

McStrikeResult mc_price_strikes(const MarketContext& ctx, const LinearParams& params,
                                const std::vector<double>& strikes, const SimConfig& cfg) {
    for (double k : strikes)
        if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("mcsim: strikes must be positive");
    const Grid g = make_grid(ctx, params, cfg);
    std::vector<Moments> calls(strikes.size());
    Moments spot;
    run_terminal(ctx, g, cfg, [&](double sa, double sb) {
        const bool pair = !std::isnan(sb);
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            const double pa = std::max(sa - strikes[i], 0.0);
            calls[i].add(pair ? 0.5 * (pa + std::max(sb - strikes[i], 0.0)) : pa);
        }
        spot.add(pair ? 0.5 * (sa + sb) : sa);
    });
    const double df = std::exp(-ctx.rate * ctx.maturity);
    McStrikeResult out;
    for (const Moments& m : calls) out.calls.push_back(m.estimate(df));
    out.discounted_spot = spot.estimate(df);
    return out;
}

McEstimate mc_price(const MarketContext& ctx, const LinearParams& params, const SimConfig& cfg) {
    return mc_price_strikes(ctx, params, {ctx.strike}, cfg).calls.front();
}

}  // namespace tdh
