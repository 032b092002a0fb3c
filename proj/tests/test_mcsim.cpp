#include <catch_amalgamated.hpp>

#include <cmath>

#include "tdheston/errors.hpp"
#include "tdheston/mcsim.hpp"

using namespace tdh;

namespace {

LinearParams flat_gbm() {
    LinearParams p;
    p.theta2 = 0.04;
    return p;  // kappa = eta = 0
}

SimConfig config(std::uint64_t paths, int steps, bool antithetic = true) {
    SimConfig c;
    c.n_paths = paths;
    c.n_steps = steps;
    c.antithetic = antithetic;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(config(1, 10, false).validate(), InvalidArgument);
    CHECK_THROWS_AS(config(3, 10, true).validate(), InvalidArgument);
    CHECK_THROWS_AS(config(4, 0).validate(), InvalidArgument);
    CHECK_NOTHROW(config(3, 10, false).validate());
}

TEST_CASE("generator streams") {
    Xoshiro256 a(1, 0), b(1, 0), c(1, 1), d(2, 0);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
}

TEST_CASE("deterministic variance gives lognormal prices") {
    const MarketContext ctx{100, 0.03, 1.0, 100, 0.04};
    const auto r = mc_price_strikes(ctx, flat_gbm(), {100.0}, config(200'000, 50));
    CHECK(std::abs(r.discounted_spot.value - 100.0) <= 3.0 * r.discounted_spot.std_error);
    CHECK(std::abs(r.calls[0].value - black_scholes_call(100, 100, 0.03, 1.0, 0.2)) <= 3.0 * r.calls[0].std_error);
    for (const PathSample& p : simulate_paths(ctx, flat_gbm(), config(4, 20)))
        for (double v : p.v) CHECK(v == Catch::Approx(0.04));
}

TEST_CASE("same seed, same paths") {
    LinearParams p = LinearParams::constant(2.0, 0.04, 0.6, -0.7);
    const MarketContext ctx{100, 0.01, 1.0, 100, 0.04};
    const auto a = simulate_paths(ctx, p, config(6, 30));
    const auto b = simulate_paths(ctx, p, config(6, 30));
    REQUIRE(a.size() == 6);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].path_id == k);
        CHECK(a[k].s == b[k].s);
        CHECK(a[k].v == b[k].v);
        CHECK(a[k].times.size() == 31);
        CHECK(a[k].times.back() == 1.0);
    }
    // Path i does not depend on the path count.
    const auto c = simulate_paths(ctx, p, config(10, 30));
    CHECK(c[3].s == a[3].s);
    const auto m1 = mc_price(ctx, p, config(2000, 30));
    const auto m2 = mc_price(ctx, p, config(2000, 30));
    CHECK(m1.value == m2.value);
    CHECK(m1.std_error == m2.std_error);
}

TEST_CASE("variance stays non-negative with a coarse grid") {
    LinearParams p = LinearParams::constant(0.5, 0.02, 1.5, -0.9);
    for (const PathSample& s : simulate_paths({100, 0.0, 2.0, 100, 0.02}, p, config(50, 20)))
        for (std::size_t k = 0; k < s.v.size(); ++k) {
            CHECK(s.v[k] >= 0.0);
            CHECK(s.s[k] > 0.0);
        }
}

TEST_CASE("martingale and zero strike") {
    LinearParams p;
    p.kappa1 = 1.0;
    p.kappa2 = 1.0;
    p.theta1 = 0.01;
    p.theta2 = 0.04;
    p.eta2 = 0.3;
    p.rho1 = 0.2;
    p.rho2 = -0.5;
    const MarketContext ctx{100, 0.02, 1.0, 1e-8, 0.04};
    const auto r = mc_price_strikes(ctx, p, {1e-8}, config(200'000, 100));
    CHECK(std::abs(r.discounted_spot.value - 100.0) <= 3.0 * r.discounted_spot.std_error);
    CHECK(std::abs(r.calls[0].value - 100.0) <= 3.0 * r.calls[0].std_error + 1e-6);
}

TEST_CASE("standard error falls like one over root n") {
    const LinearParams p = LinearParams::constant(2.0, 0.04, 0.3, -0.5);
    const MarketContext ctx{100, 0.0, 1.0, 100, 0.04};
    const auto a = mc_price(ctx, p, config(100'000, 50));
    const auto b = mc_price(ctx, p, config(200'000, 50));
    const double ratio = b.std_error / a.std_error;
    CHECK(ratio == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("parameter checks") {
    LinearParams p = LinearParams::constant(2.0, 0.04, 0.3, -0.5);
    p.rho1 = -0.6;  // rho(1) = -1.1
    CHECK_THROWS_AS(mc_price({100, 0, 1.0, 100, 0.04}, p, config(10, 10)), InvalidCorrelation);
    LinearParams q = LinearParams::constant(2.0, -0.04, 0.3, -0.5);
    CHECK_THROWS_AS(mc_price({100, 0, 1.0, 100, 0.04}, q, config(10, 10)), InvalidParams);
}
