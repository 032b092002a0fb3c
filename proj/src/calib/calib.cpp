#include "tdheston/calib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tdheston/errors.hpp"

namespace tdh {
namespace {

using Vec = std::vector<double>;

constexpr double kFailedObjective = 1e30;

struct Box {
    double lo, hi;
};

// Coefficient order: kappa1, kappa2, theta1, theta2, eta1, eta2, rho1, rho2 [, v0].
Vec pack(const LinearParams& p, double v0, bool fit_v0) {
    Vec x{p.kappa1, p.kappa2, p.theta1, p.theta2, p.eta1, p.eta2, p.rho1, p.rho2};
    if (fit_v0) x.push_back(v0);
    return x;
}

LinearParams unpack(const Vec& x) {
    LinearParams p;
    p.kappa1 = x[0];
    p.kappa2 = x[1];
    p.theta1 = x[2];
    p.theta2 = x[3];
    p.eta1 = x[4];
    p.eta2 = x[5];
    p.rho1 = x[6];
    p.rho2 = x[7];
    return p;
}

// A linear path c1 tau + c2 lies in a box on [0, T] iff both endpoint values do,
// so projecting means clipping the two endpoint values.
double project(Vec& x, double T, double eta_floor) {
    const Box boxes[4] = {{0.0, std::numeric_limits<double>::infinity()},
                          {0.0, std::numeric_limits<double>::infinity()},
                          {eta_floor, std::numeric_limits<double>::infinity()},
                          {-1.0, 1.0}};
    double dist = 0.0;
    for (int k = 0; k < 4; ++k) {
        double& c1 = x[2 * k];
        double& c2 = x[2 * k + 1];
        const double e0 = std::clamp(c2, boxes[k].lo, boxes[k].hi);
        const double end = c1 * T + c2;
        const double eT = std::clamp(end, boxes[k].lo, boxes[k].hi);
        if (e0 == c2 && eT == end) continue;
        const double n1 = (eT - e0) / T, n2 = e0;
        dist += std::abs(n1 - c1) + std::abs(n2 - c2);
        c1 = n1;
        c2 = n2;
    }
    if (x.size() > 8 && x[8] < 0.0) {
        dist += -x[8];
        x[8] = 0.0;
    }
    return dist;
}

std::vector<Instrument> instruments_of(const QuoteGrid& grid) {
    std::vector<Instrument> ins;
    for (const Quote& q : grid.quotes) ins.push_back({q.strike, q.maturity});
    return ins;
}

double sse(const QuoteGrid& grid, const std::vector<Instrument>& ins, const LinearParams& p, double v0,
           const CalibOptions& opts, double* rmse = nullptr) {
    const auto prices = price_many(grid.spot, grid.rate, v0, p, ins, opts.route, opts.pricer);
    double s = 0.0, plain = 0.0;
    for (std::size_t k = 0; k < prices.size(); ++k) {
        const double d = prices[k].call - grid.quotes[k].price;
        s += grid.quotes[k].weight * d * d;
        plain += d * d;
    }
    if (rmse) *rmse = std::sqrt(plain / static_cast<double>(prices.size()));
    return s;
}

}  // namespace

double QuoteGrid::max_maturity() const {
    double t = 0.0;
    for (const Quote& q : quotes) t = std::max(t, q.maturity);
    return t;
}

void QuoteGrid::validate() const {
    if (quotes.empty()) throw Infeasible("calibrate: empty quote grid");
    if (!(spot > 0.0) || !std::isfinite(spot) || !std::isfinite(rate))
        throw Infeasible("calibrate: spot must be positive and rate finite");
    for (std::size_t k = 0; k < quotes.size(); ++k) {
        const Quote& q = quotes[k];
        std::ostringstream where;
        where << "calibrate: quote " << k << " (K=" << q.strike << ", T=" << q.maturity << ")";
        if (!(q.strike > 0.0) || !(q.maturity > 0.0) || !std::isfinite(q.strike) || !std::isfinite(q.maturity))
            throw Infeasible(where.str() + ": strike and maturity must be positive");
        if (!(q.weight > 0.0) || !std::isfinite(q.weight)) throw Infeasible(where.str() + ": weight must be > 0");
        const double lower = std::max(spot - q.strike * std::exp(-rate * q.maturity), 0.0);
        if (!(q.price >= lower && q.price <= spot)) {
            std::ostringstream msg;
            msg << where.str() << ": price " << q.price << " outside no-arbitrage bounds [" << lower << ", " << spot
                << "]";
            throw Infeasible(msg.str());
        }
    }
}

double calibration_objective(const QuoteGrid& grid, const LinearParams& params, double v0, const CalibOptions& opts) {
    grid.validate();
    return sse(grid, instruments_of(grid), params, v0, opts);
}

CalibResult calibrate(const QuoteGrid& grid, const LinearParams& initial, double v0_init, const CalibOptions& opts) {
    grid.validate();
    if (opts.max_iterations < 1 || opts.stall_window < 1) throw InvalidArgument("calibrate: bad iteration limits");
    const double T = grid.max_maturity();
    const std::vector<Instrument> ins = instruments_of(grid);

    Vec x0 = pack(initial, v0_init, opts.fit_v0);
    for (double c : x0)
        if (!std::isfinite(c)) throw Infeasible("calibrate: initial parameters are not finite");
    project(x0, T, opts.eta_floor);
    if (!unpack(x0).is_valid(T) || (opts.fit_v0 && !(x0[8] >= 0.0)))
        throw Infeasible("calibrate: initial parameters cannot be projected onto the feasible set");

    CalibResult res;
    auto f = [&](const Vec& x) {
        Vec y = x;
        const double dist = project(y, T, opts.eta_floor);
        ++res.evaluations;
        double val;
        try {
            val = sse(grid, ins, unpack(y), opts.fit_v0 ? y[8] : v0_init, opts);
        } catch (const Error&) {
            val = kFailedObjective;
        }
        if (!std::isfinite(val)) val = kFailedObjective;
        return val + opts.penalty * dist;
    };

    const std::size_t n = x0.size();
    const double dn = static_cast<double>(n);
    // Dimension-adapted coefficients (Gao and Han); plain NM stalls in 9 dimensions.
    const double kExpand = 1.0 + 2.0 / dn, kContract = 0.75 - 0.5 / dn, kShrink = 1.0 - 1.0 / dn;

    std::vector<Vec> simplex;
    std::vector<double> fv;
    auto build = [&](const Vec& base, double fbase) {
        simplex.assign(1, base);
        fv.assign(1, fbase);
        for (std::size_t i = 0; i < n; ++i) {
            Vec v = base;
            v[i] += std::abs(v[i]) > 1e-3 ? 0.1 * v[i] : 0.01;
            simplex.push_back(v);
            fv.push_back(f(v));
        }
    };
    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<Vec> s2;
        std::vector<double> f2;
        for (std::size_t k : order) {
            s2.push_back(simplex[k]);
            f2.push_back(fv[k]);
        }
        simplex = std::move(s2);
        fv = std::move(f2);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                d = std::max(d, std::abs(simplex[k][i] - simplex[0][i]) / std::max(1.0, std::abs(simplex[0][i])));
        return d;
    };
    auto lerp = [&](const Vec& c, const Vec& w, double t) {
        Vec out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = c[i] + t * (w[i] - c[i]);
        return out;
    };

    build(x0, f(x0));
    sort_simplex();
    // A collapsed simplex is rebuilt around the best vertex; the search ends when
    // a fresh simplex converges without improving on the previous one.
    double restart_best = std::numeric_limits<double>::infinity();
    int since_restart = 0;
    std::vector<double> mean_history;
    while (true) {
        // The best vertex can sit still for many iterations while the others
        // move, so progress is measured on the simplex mean.
        const std::size_t h = mean_history.size();
        const bool stalled = since_restart > opts.stall_window &&
                             mean_history[h - 1 - static_cast<std::size_t>(opts.stall_window)] - mean_history.back() <
                                 opts.improvement_tol;
        if (fv[0] <= opts.objective_target) {
            res.converged = true;
            break;
        }
        if (diameter() < opts.diameter_tol || stalled) {
            if (!(restart_best - fv[0] > opts.improvement_tol)) {
                res.converged = true;
                break;
            }
            restart_best = fv[0];
            const Vec base = simplex[0];
            build(base, fv[0]);
            sort_simplex();
            since_restart = 0;
            mean_history.clear();
            continue;
        }
        if (res.iterations >= opts.max_iterations) break;
        ++res.iterations;
        ++since_restart;

        Vec c(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) c[i] += simplex[k][i] / dn;
        const Vec xr = lerp(c, simplex[n], -1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const Vec xe = lerp(c, simplex[n], -kExpand);
            const double fe = f(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            const bool outside = fr < fv[n];
            const Vec xc = lerp(c, simplex[n], outside ? -kContract : kContract);
            const double fc = f(xc);
            if (fc < (outside ? fr : fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    simplex[k] = lerp(simplex[0], simplex[k], kShrink);
                    fv[k] = f(simplex[k]);
                }
            }
        }
        sort_simplex();
        res.history.push_back(fv[0]);
        mean_history.push_back(std::accumulate(fv.begin(), fv.end(), 0.0) / (dn + 1.0));
    }

    Vec best = simplex[0];
    project(best, T, opts.eta_floor);
    res.params = unpack(best);
    res.v0 = opts.fit_v0 ? best[8] : v0_init;
    res.params.validate(T);
    res.objective = sse(grid, ins, res.params, res.v0, opts, &res.rmse);
    if (!res.converged && opts.throw_on_max_iterations) {
        std::ostringstream msg;
        msg << "calibrate: no convergence after " << opts.max_iterations << " iterations (objective "
            << res.objective << ")";
        throw MaxIterations(msg.str());
    }
    return res;
}

}  // namespace tdh
