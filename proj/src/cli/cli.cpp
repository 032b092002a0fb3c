#include "tdheston/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "tdheston/calib.hpp"
#include "tdheston/charfn.hpp"
#include "tdheston/errors.hpp"
#include "tdheston/io.hpp"
#include "tdheston/mcsim.hpp"
#include "tdheston/pricer.hpp"

namespace tdh::cli {
namespace {

struct Inputs {
    std::string params_path, market_path, quotes_path, out_path;
    std::string route = "auto";
    std::uint64_t seed = 42;
    std::uint64_t paths = 0;
    int steps = 0;
    int max_iter = 5000;
    bool antithetic = false;
    std::vector<double> strikes;
};

struct Loaded {
    LinearParams params;
    MarketContext ctx;
};

// The params file carries the model (and optionally v0, T); the market file
// carries spot, rate and strike, and its v0 / maturity win when both are set.
Loaded load(const Inputs& in, bool market_required) {
    Loaded l;
    io::ParamsFile pf;
    if (!in.params_path.empty()) {
        pf = io::read_params(in.params_path);
    } else {
        pf.params = LinearParams::constant(2.0, 0.04, 0.3, -0.5);
        pf.v0 = 0.04;
    }
    l.params = pf.params;
    if (!in.market_path.empty()) {
        const io::MarketFile mf = io::read_market(in.market_path);
        l.ctx = mf.ctx;
        if (!mf.has_v0) l.ctx.v0 = pf.v0;
        if (!mf.has_maturity) l.ctx.maturity = pf.maturity;
    } else {
        if (market_required) throw InputError("--market is required");
        l.ctx = MarketContext{100.0, 0.01, pf.maturity, 100.0, pf.v0};
    }
    l.ctx.validate();
    return l;
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            os_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw InputError("cannot write '" + path + "'");
            os_ = file_.get();
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

int cmd_price(const Inputs& in, std::ostream& out) {
    const Loaded l = load(in, true);
    const Route route = parse_route(in.route);
    const PriceResult r = price_european(l.ctx, l.params, route);
    Output o(in.out_path, out);
    *o << io::price_json(l.ctx, r, route);
    return 0;
}

int cmd_smile(const Inputs& in, std::ostream& out) {
    const Loaded l = load(in, true);
    if (in.strikes.empty()) throw InputError("smile: --strikes is required");
    const auto pts = smile(l.ctx, l.params, in.strikes, parse_route(in.route));
    Output o(in.out_path, out);
    *o << io::smile_csv(pts);
    return 0;
}

int cmd_calibrate(const Inputs& in, std::ostream& out) {
    if (in.params_path.empty()) throw InputError("calibrate: --params (the starting point) is required");
    if (in.quotes_path.empty()) throw InputError("calibrate: --quotes is required");
    const Loaded l = load(in, true);
    QuoteGrid grid;
    grid.spot = l.ctx.spot;
    grid.rate = l.ctx.rate;
    grid.quotes = io::read_quotes(in.quotes_path);
    CalibOptions opts;
    // Numeric unless a route is asked for: the closed route is much slower per price.
    opts.route = in.route == "auto" ? Route::Numeric : parse_route(in.route);
    opts.max_iterations = in.max_iter;
    const CalibResult r = calibrate(grid, l.params, l.ctx.v0, opts);
    Output o(in.out_path, out);
    *o << io::calib_json(r, grid.max_maturity());
    return 0;
}

SimConfig sim_config(const Inputs& in, double maturity, std::uint64_t default_paths, bool antithetic) {
    SimConfig cfg;
    cfg.n_paths = in.paths ? in.paths : default_paths;
    cfg.n_steps = in.steps ? in.steps : std::max(1, static_cast<int>(std::lround(250.0 * maturity)));
    cfg.seed = in.seed;
    cfg.antithetic = antithetic;
    return cfg;
}

int cmd_simulate(const Inputs& in, std::ostream& out) {
    const Loaded l = load(in, true);
    const SimConfig cfg = sim_config(in, l.ctx.maturity, 10, in.antithetic);
    cfg.validate();
    Output o(in.out_path, out);
    io::write_paths_header(*o);
    simulate_paths(l.ctx, l.params, cfg, [&](const PathSample& p) { io::write_path_rows(*o, p); });
    return 0;
}

class Table {
public:
    explicit Table(std::ostream& out) : out_(out) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-44s %-14s %-12s %s\n", "check", "measured", "limit", "result");
        out_ << buf;
    }
    void row(const std::string& name, double measured, double limit, bool applicable = true) {
        char buf[200];
        if (!applicable) {
            std::snprintf(buf, sizeof buf, "%-44s %-14s %-12s %s\n", name.c_str(), "-", "-", "SKIP");
        } else {
            const bool ok = measured <= limit;
            failed_ = failed_ || !ok;
            std::snprintf(buf, sizeof buf, "%-44s %-14.6g %-12.6g %s\n", name.c_str(), measured, limit,
                          ok ? "PASS" : "FAIL");
        }
        out_ << buf;
    }
    void error(const std::string& name, const std::string& what) {
        failed_ = true;
        out_ << name << ": FAIL (" << what << ")\n";
    }
    bool failed() const { return failed_; }

private:
    std::ostream& out_;
    bool failed_ = false;
};

template <class F>
void guarded(Table& t, const std::string& name, F f) {
    try {
        f();
    } catch (const Error& e) {
        t.error(name, e.what());
    }
}

int cmd_validate(const Inputs& in, std::ostream& out) {
    const Loaded l = load(in, false);
    const LinearParams& p = l.params;
    const MarketContext& ctx = l.ctx;
    const double T = ctx.maturity;
    p.validate(T);
    std::ostringstream report;
    Table t(report);
    const bool const_eta = p.eta1 == 0.0;
    const bool constant = const_eta && p.kappa1 == 0.0 && p.theta1 == 0.0 && p.rho1 == 0.0;
    const std::vector<double> omegas{-80.0, -35.0, -7.5, -1.0, 0.5, 2.0, 10.0, 40.0, 80.0};
    const std::vector<double> taus{0.25 * T, 0.5 * T, T};

    guarded(t, "closed B vs numeric Riccati", [&] {
        double worst = 0.0;
        if (const_eta)
            for (double w : omegas)
                for (double tau : taus) {
                    const Complex b = b_closed_constant_eta(p, w, tau);
                    const Complex r = riccati_solve_numeric(p, w, tau).B;
                    worst = std::max(worst, std::abs(b - r) / (1.0 + std::abs(r)));
                }
        t.row("closed B vs numeric Riccati (rel)", worst, 1e-6, const_eta);
    });
    guarded(t, "Heun B vs numeric Riccati or fallback", [&] {
        double worst = 0.0;
        if (!const_eta)
            for (double w : omegas)
                for (double tau : taus) {
                    const HeunResult h = b_heun_linear_eta(p, w, tau);
                    if (h.fallback_used) continue;
                    const Complex r = riccati_solve_numeric(p, w, tau).B;
                    worst = std::max(worst, std::abs(h.B - r));
                }
        t.row("Heun B vs numeric Riccati, else fallback", worst, 1e-6, !const_eta);
    });
    guarded(t, "constant-parameter CF vs numeric Riccati", [&] {
        double worst = 0.0;
        if (constant)
            for (double w : omegas)
                for (double tau : taus) {
                    const CharFnValue c = heston_constant_cf(p.kappa2, p.theta2, p.eta2, p.rho2, w, tau);
                    const CharFnValue r = riccati_solve_numeric(p, w, tau, 1e-12);
                    worst = std::max({worst, std::abs(c.A - r.A), std::abs(c.B - r.B)});
                }
        t.row("constant-parameter CF vs numeric Riccati", worst, 1e-8, constant);
    });
    guarded(t, "martingale and normalization", [&] {
        double worst = 0.0;
        std::vector<Route> routes{Route::Numeric, Route::Auto};
        routes.push_back(const_eta ? Route::Closed : Route::Heun);
        for (Route r : routes) {
            const CharFnValue m = char_fn_value(p, Complex(0.0, -1.0), T, r);
            worst = std::max({worst, std::abs(m.A), std::abs(m.B)});
            worst = std::max(worst, std::abs(char_fn(p, 0.3, ctx.v0, T, 0.0, r) - 1.0));
        }
        t.row("A(-i), B(-i) = 0 and f(0) = 1", worst, 1e-9);
    });
    guarded(t, "pricing", [&] {
        const PriceResult a = price_european(ctx, p, Route::Auto);
        const PriceResult n = price_european(ctx, p, Route::Numeric);
        const double parity = std::abs(a.call - a.put - (ctx.spot - ctx.strike * std::exp(-ctx.rate * T)));
        t.row("put-call parity / S0", parity / ctx.spot, 1e-10);
        t.row("auto vs numeric route price / S0", std::abs(a.call - n.call) / ctx.spot, 1e-6);
        const SimConfig cfg = sim_config(in, T, 200'000, true);
        const McEstimate mc = mc_price(ctx, p, cfg);
        t.row("Monte Carlo vs Fourier call (in SE)", std::abs(mc.value - n.call) / mc.std_error, 3.0);
    });
    Output o(in.out_path, out);
    *o << report.str();
    *o << (t.failed() ? "validate: FAILED\n" : "validate: all checks passed\n");
    return t.failed() ? 2 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heston model with linearly time-dependent parameters"};
    app.require_subcommand(1);
    Inputs in;
    const std::vector<std::string> routes{"auto", "closed", "heun", "numeric"};

    auto common = [&](CLI::App* sub) {
        sub->add_option("--params", in.params_path, "model parameters JSON");
        sub->add_option("--market", in.market_path, "market JSON (spot, rate, maturity, strike, v0)");
        sub->add_option("--route", in.route, "CF route")->check(CLI::IsMember(routes));
        sub->add_option("--out", in.out_path, "output file (default: stdout)");
    };
    auto* price = app.add_subcommand("price", "price one European call and put (JSON)");
    common(price);
    auto* sm = app.add_subcommand("smile", "prices and implied vols across strikes (CSV)");
    common(sm);
    sm->add_option("--strikes", in.strikes, "comma-separated ascending strikes")->delimiter(',');
    auto* cal = app.add_subcommand("calibrate", "fit the parameters to quotes (JSON)");
    common(cal);
    cal->add_option("--quotes", in.quotes_path, "quote CSV: strike,maturity,price[,weight]");
    cal->add_option("--max-iter", in.max_iter, "Nelder-Mead iteration cap")->check(CLI::PositiveNumber);
    auto* sim = app.add_subcommand("simulate", "Monte Carlo sample paths (CSV)");
    common(sim);
    sim->add_option("--seed", in.seed, "RNG seed");
    sim->add_option("--paths", in.paths, "number of paths")->check(CLI::PositiveNumber);
    sim->add_option("--steps", in.steps, "time steps (default 250 per year)")->check(CLI::PositiveNumber);
    sim->add_flag("--antithetic", in.antithetic, "antithetic pairs");
    auto* val = app.add_subcommand("validate", "oracle cross-checks (table; exit 2 on failure)");
    common(val);
    val->add_option("--seed", in.seed, "RNG seed");
    val->add_option("--paths", in.paths, "Monte Carlo paths (default 200000)")->check(CLI::PositiveNumber);
    val->add_option("--steps", in.steps, "Monte Carlo steps")->check(CLI::PositiveNumber);

    std::vector<std::string> argv_store{"tdheston"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (price->parsed()) return cmd_price(in, out);
        if (sm->parsed()) return cmd_smile(in, out);
        if (cal->parsed()) return cmd_calibrate(in, out);
        if (sim->parsed()) return cmd_simulate(in, out);
        if (val->parsed()) return cmd_validate(in, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace tdh::cli
