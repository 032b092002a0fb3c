// Acceptance run: one PASS/FAIL line per criterion, exit status = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "tdheston/calib.hpp"
#include "tdheston/charfn.hpp"
#include "tdheston/errors.hpp"
#include "tdheston/mcsim.hpp"
#include "tdheston/pricer.hpp"
#include "tdheston/specfun.hpp"

using namespace tdh;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;
constexpr double kNoLimit = std::numeric_limits<double>::infinity();

void report(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    char timing[64];
    if (std::isfinite(limit_seconds))
        std::snprintf(timing, sizeof timing, "%.1f s of %.0f s", secs, limit_seconds);
    else
        std::snprintf(timing, sizeof timing, "%.1f s", secs);
    std::printf("criterion %d: %s  %s  [%s; %s]\n", id, pass ? "PASS" : "FAIL", title, o.detail.c_str(), timing);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Valid on [0, tmax]; eta1 = 0 when constant_eta.
LinearParams random_params(std::mt19937_64& rng, bool constant_eta, double tmax) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LinearParams p;
    p.kappa2 = 0.1 + 3.9 * u(rng);
    p.kappa1 = (-p.kappa2 + 2.0 * p.kappa2 * u(rng)) / tmax;
    p.theta2 = 0.01 + 0.14 * u(rng);
    p.theta1 = (-p.theta2 + 2.0 * p.theta2 * u(rng)) / tmax;
    p.eta2 = 0.05 + 0.95 * u(rng);
    p.eta1 = constant_eta ? 0.0 : (-0.8 * p.eta2 + 1.6 * p.eta2 * u(rng)) / tmax;
    p.rho2 = -0.95 + 1.9 * u(rng);
    const double lo = -0.95 - p.rho2, hi = 0.95 - p.rho2;
    p.rho1 = (lo + (hi - lo) * u(rng)) / tmax;
    if (!p.is_valid(tmax)) throw std::logic_error("random_params produced an invalid set");
    return p;
}

Outcome closed_vs_ode() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> uw(-80.0, 80.0), ut(0.0, 2.0);
    int ok = 0, flagged = 0, bad = 0;
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const LinearParams p = random_params(rng, true, 2.0);
        const double w = uw(rng);
        double tau = ut(rng);
        if (tau == 0.0) tau = 1e-3;
        const Complex r = riccati_solve_numeric(p, w, tau).B;
        try {
            const Complex b = b_closed_constant_eta(p, w, tau);
            const double err = std::abs(b - r) / (1.0 + std::abs(r));
            worst = std::max(worst, err);
            (err <= 1e-6 ? ok : bad)++;
        } catch (const DenominatorUnderflow&) {
            ++flagged;
        }
    }
    const bool pass = ok >= 198 && bad == 0;
    return {pass, fmt("%.0f/200 within 1e-6 (1+|B|), %.0f flagged denominator zeros, worst %.2e", ok, flagged, worst) +
                      fmt(", %.0f unexplained", bad)};
}

Outcome constant_reduction() {
    const LinearParams p = LinearParams::constant(1.7, 0.05, 0.45, -0.6);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double w = -50.0 + 100.0 * (i + 0.5) / 20.0;
        for (int j = 0; j < 20; ++j) {
            const double tau = 0.1 * (j + 1);
            const CharFnValue closed = char_fn_value(p, w, tau, Route::Closed);
            const CharFnValue ode = riccati_solve_numeric(p, w, tau, 1e-13);
            const CharFnValue classic = heston_constant_cf(p.kappa2, p.theta2, p.eta2, p.rho2, w, tau);
            for (auto [x, y] : {std::pair{closed, ode}, std::pair{closed, classic}, std::pair{ode, classic}})
                worst = std::max({worst, std::abs(x.A - y.A), std::abs(x.B - y.B)});
        }
    }
    return {worst <= 1e-8, fmt("worst pairwise |dA|, |dB| = %.2e over 400 points (limit 1e-8)", worst)};
}

Outcome identities() {
    std::mt19937_64 rng(77);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const bool ce = k % 2 == 0;
        const LinearParams p = random_params(rng, ce, 2.0);
        const double tau = 0.1 + 1.9 * (k % 10) / 9.0;
        for (Route r : {Route::Auto, ce ? Route::Closed : Route::Heun, Route::Numeric}) {
            const CharFnValue m = char_fn_value(p, Complex(0.0, -1.0), tau, r);
            worst = std::max({worst, std::abs(m.A), std::abs(m.B)});
            worst = std::max(worst, std::abs(char_fn(p, 0.37, 0.05, tau, 0.0, r) - 1.0));
        }
    }
    return {worst <= 1e-9, fmt("max |A(-i)|, |B(-i)|, |f(0) - 1| = %.2e over 100 sets x 3 routes", worst)};
}

Outcome pricing_vs_mc() {
    std::vector<LinearParams> sets(3);
    sets[0].kappa1 = 1.0, sets[0].kappa2 = 1.0, sets[0].theta1 = 0.01, sets[0].theta2 = 0.04;
    sets[0].eta2 = 0.3, sets[0].rho1 = 0.2, sets[0].rho2 = -0.5;
    sets[1].kappa1 = -0.5, sets[1].kappa2 = 2.5, sets[1].theta1 = 0.02, sets[1].theta2 = 0.03;
    sets[1].eta1 = 0.2, sets[1].eta2 = 0.4, sets[1].rho1 = -0.1, sets[1].rho2 = -0.6;
    sets[2].kappa1 = 0.4, sets[2].kappa2 = 0.8, sets[2].theta1 = -0.01, sets[2].theta2 = 0.06;
    sets[2].eta1 = -0.1, sets[2].eta2 = 0.5, sets[2].rho1 = 0.15, sets[2].rho2 = -0.3;
    const double S0 = 100.0, r = 0.02, T = 1.0, v0 = 0.04;
    const std::vector<double> strikes{80.0, 90.0, 100.0, 110.0, 120.0};
    SimConfig cfg;
    cfg.n_paths = 1'000'000;
    cfg.n_steps = 250;
    cfg.seed = 42;
    double worst_z = 0.0, worst_parity = 0.0;
    for (const LinearParams& p : sets) {
        std::vector<Instrument> ins;
        for (double k : strikes) ins.push_back({k, T});
        const auto fourier = price_many(S0, r, v0, p, ins, Route::Auto);
        const McStrikeResult mc = mc_price_strikes({S0, r, T, 100.0, v0}, p, strikes, cfg);
        for (std::size_t k = 0; k < strikes.size(); ++k) {
            worst_z = std::max(worst_z, std::abs(mc.calls[k].value - fourier[k].call) / mc.calls[k].std_error);
            const double parity = fourier[k].call - fourier[k].put - (S0 - strikes[k] * std::exp(-r * T));
            worst_parity = std::max(worst_parity, std::abs(parity) / S0);
        }
    }
    return {worst_z <= 3.0 && worst_parity <= 1e-10,
            fmt("worst |MC - Fourier| = %.2f SE (limit 3), worst parity gap %.1e S0 (limit 1e-10)", worst_z,
                worst_parity)};
}

Outcome bs_limit() {
    const LinearParams p = LinearParams::constant(2.0, 0.04, 1e-6, 0.0);
    const PriceResult r = price_european({100.0, 0.0, 1.0, 100.0, 0.04}, p);
    const double bs = black_scholes_call(100.0, 100.0, 0.0, 1.0, 0.2);
    const double gap = std::abs(r.call - bs);
    return {gap <= 1e-3, fmt("call %.10f vs BS %.10f, gap %.2e (limit 1e-3)", r.call, bs, gap)};
}

Outcome special_functions() {
    using namespace tdh::specfun;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 1e-5;
    double worst_d = 0.0, worst_e = 0.0, worst_r = 0.0;
    int points = 0;
    while (points < 100) {
        const Complex a(1.5 * u(rng), 1.5 * u(rng));
        const double b = points % 2 ? 0.5 : 1.5;
        const Complex z(4.0 * u(rng), 4.0 * u(rng));
        if (std::abs(z) < 0.1 || (z.real() < 0.0 && std::abs(z.imag()) < 0.1)) continue;
        ++points;
        const Complex dm = kummer_m_prime(a, b, z), du = kummer_u_prime(a, b, z);
        const Complex fm = (kummer_m(a, b, z + h) - kummer_m(a, b, z - h)) / (2.0 * h);
        const Complex fu = (kummer_u(a, b, z + h) - kummer_u(a, b, z - h)) / (2.0 * h);
        worst_d = std::max({worst_d, std::abs(dm - fm) / (1.0 + std::abs(dm)), std::abs(du - fu) / (1.0 + std::abs(du))});

        const Complex aa(3.0 * u(rng) + 3.5, 2.0 * u(rng)), zz(7.0 * u(rng), 7.0 * u(rng));
        worst_e = std::max(worst_e, std::abs(kummer_m(aa, aa, zz) - std::exp(zz)) / std::abs(std::exp(zz)));

        const Complex al(2.0 * u(rng), 2.0 * u(rng)), be(3.0 * u(rng), u(rng)), ga(2.0 * u(rng), 2.0 * u(rng));
        const Complex x(1.2 * u(rng), 1.2 * u(rng));
        const PolyCoeffODE ode = triconfluent_heun_ode(al, be, ga);
        const SeriesSolution s = heun_t(al, be, ga, x);
        const Complex res = ode.leading(x) * s.wsecond + ode.p(x) * s.wprime + ode.q(x) * s.w;
        worst_r = std::max(worst_r, std::abs(res) / (1.0 + std::abs(s.w)));
    }
    const bool pass = worst_d <= 1e-6 && worst_e <= 1e-12 && worst_r <= 1e-9;
    return {pass, fmt("derivative vs FD %.2e (1e-6), M(a,a,z) vs e^z %.2e (1e-12), ", worst_d, worst_e) +
                      fmt("series-ODE residual %.2e (1e-9)", worst_r)};
}

Outcome heun_contract() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> uw(-40.0, 40.0), ut(0.05, 2.0);
    int accepted = 0, fallback = 0, silent = 0;
    for (int k = 0; k < 60; ++k) {
        const LinearParams p = random_params(rng, false, 2.0);
        if (p.eta1 == 0.0) continue;
        const double w = uw(rng), tau = ut(rng);
        const HeunResult h = b_heun_linear_eta(p, w, tau);
        const Complex truth = riccati_solve_numeric(p, w, tau, 1e-12).B;
        if (h.fallback_used) {
            ++fallback;
            if (std::abs(h.B - truth) > 1e-6 * (1.0 + std::abs(truth))) ++silent;
        } else {
            ++accepted;
            if (std::abs(h.B - truth) > 1e-6) ++silent;
        }
    }
    return {silent == 0, fmt("%.0f accepted within 1e-6, %.0f FallbackUsed, ", accepted, fallback) +
                             fmt("%.0f values off the Riccati solution", silent)};
}

Outcome calibration() {
    LinearParams truth;
    truth.kappa1 = 0.3, truth.kappa2 = 1.2, truth.theta1 = 0.01, truth.theta2 = 0.04;
    truth.eta1 = 0.1, truth.eta2 = 0.3, truth.rho1 = 0.1, truth.rho2 = -0.5;
    const double v0 = 0.04;
    QuoteGrid g;
    g.spot = 100.0;
    g.rate = 0.01;
    std::vector<Instrument> ins;
    for (double T : {0.5, 1.0})
        for (double K : {80.0, 90.0, 95.0, 100.0, 105.0, 110.0, 120.0}) ins.push_back({K, T});
    const auto prices = price_many(g.spot, g.rate, v0, truth, ins, Route::Numeric);
    for (std::size_t k = 0; k < ins.size(); ++k) g.quotes.push_back({ins[k].strike, ins[k].maturity, prices[k].call, 1.0});

    LinearParams start = truth;
    for (double* c : {&start.kappa1, &start.kappa2, &start.theta1, &start.theta2, &start.eta1, &start.eta2,
                      &start.rho1, &start.rho2})
        *c *= 1.5;
    CalibOptions o;
    o.max_iterations = 5000;
    o.throw_on_max_iterations = false;
    const CalibResult r = calibrate(g, start, 1.5 * v0, o);
    const double limit = 1e-6 * g.spot;
    return {r.rmse < limit && r.iterations <= 5000,
            fmt("RMSE %.2e (limit %.0e), %.0f iterations", r.rmse, limit, r.iterations) +
                (r.converged ? ", converged" : ", iteration cap")};
}

}  // namespace

int main() {
    report(1, "closed-form B vs Riccati ODE, 200 random draws", 60.0, closed_vs_ode);
    report(2, "constant-parameter reduction, 20x20 grid", 10.0, constant_reduction);
    report(3, "martingale and normalization identities", kNoLimit, identities);
    report(4, "Fourier vs Monte Carlo, 3 sets x 5 strikes, 1e6 paths", 300.0, pricing_vs_mc);
    report(5, "Black-Scholes limit at vanishing vol-of-vol", kNoLimit, bs_limit);
    report(6, "special-function suite", kNoLimit, special_functions);
    report(7, "Heun route contract", kNoLimit, heun_contract);
    report(8, "calibration round trip, 2 x 7 grid from a x1.5 start", 600.0, calibration);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures;
}
