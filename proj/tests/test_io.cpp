#include <catch_amalgamated.hpp>

#include <sstream>

#include "tdheston/errors.hpp"
#include "tdheston/io.hpp"

using namespace tdh;

TEST_CASE("params JSON round trip") {
    LinearParams p;
    p.kappa1 = 0.25;
    p.kappa2 = 1.5;
    p.theta1 = -0.005;
    p.theta2 = 0.04;
    p.eta1 = 0.1;
    p.eta2 = 0.35;
    p.rho1 = 0.05;
    p.rho2 = -0.6;
    const std::string text = io::params_json(p, 0.045, 2.0);
    const io::ParamsFile f = io::parse_params(text);
    CHECK(f.params == p);
    CHECK(f.v0 == 0.045);
    CHECK(f.maturity == 2.0);
    CHECK(f.has_v0);
    CHECK(io::params_json(f.params, f.v0, f.maturity) == text);
}

TEST_CASE("params JSON errors") {
    CHECK_THROWS_AS(io::parse_params("{"), InputError);
    CHECK_THROWS_AS(io::parse_params(R"({"kappa": [1, 2], "theta": [0, 0.04], "eta": [0, 0.3]})"), InputError);
    CHECK_THROWS_AS(io::parse_params(R"({"kappa": [1], "theta": [0, 0.04], "eta": [0, 0.3], "rho": [0, 0]})"),
                    InputError);
    CHECK_THROWS_AS(io::parse_params(R"({"kappa": ["a", 1], "theta": [0, 0.04], "eta": [0, 0.3], "rho": [0, 0]})"),
                    InputError);
    const io::ParamsFile f =
        io::parse_params(R"({"kappa": [0, 2], "theta": [0, 0.04], "eta": [0, 0.3], "rho": [0, -0.5]})");
    CHECK_FALSE(f.has_v0);
    CHECK_FALSE(f.has_maturity);
    CHECK_THROWS_AS(io::read_params("/nonexistent/params.json"), InputError);
}

TEST_CASE("market JSON") {
    const io::MarketFile m = io::parse_market(R"({"spot": 100, "rate": 0.01, "maturity": 0.5, "strike": 95})");
    CHECK(m.ctx.spot == 100.0);
    CHECK(m.ctx.strike == 95.0);
    CHECK(m.has_maturity);
    CHECK_FALSE(m.has_v0);
    CHECK_THROWS_AS(io::parse_market(R"({"rate": 0.01})"), InputError);
}

TEST_CASE("quotes CSV round trip") {
    const std::vector<Quote> q{{90, 0.5, 12.25, 1.0}, {110, 1.0, 3.125, 2.0}};
    const std::vector<Quote> back = io::parse_quotes_csv(io::quotes_csv(q));
    REQUIRE(back.size() == 2);
    CHECK(back[1].strike == 110.0);
    CHECK(back[1].weight == 2.0);
    const auto nw = io::parse_quotes_csv("strike,maturity,price\n100,1,8.5\n");
    CHECK(nw[0].weight == 1.0);
    CHECK_THROWS_AS(io::parse_quotes_csv("strike,price\n100,8\n"), InputError);
    CHECK_THROWS_AS(io::parse_quotes_csv("strike,maturity,price\n100,1,x\n"), InputError);
    CHECK_THROWS_AS(io::parse_quotes_csv("strike,maturity,price\n100,1\n"), InputError);
}

TEST_CASE("smile and paths CSV round trip") {
    const std::vector<SmilePoint> s{{90, 1, 14.5, 3.6, 0.235}, {110, 1, 4.4, 13.3, 0.19}};
    const auto sb = io::parse_smile_csv(io::smile_csv(s));
    REQUIRE(sb.size() == 2);
    CHECK(sb[0].implied_vol == 0.235);
    CHECK(io::smile_csv(sb) == io::smile_csv(s));

    PathSample p;
    p.path_id = 3;
    p.times = {0.0, 0.5, 1.0};
    p.s = {100.0, 101.5, 99.25};
    p.v = {0.04, 0.05, 0.0};
    std::ostringstream out;
    io::write_paths_header(out);
    io::write_path_rows(out, p);
    p.path_id = 4;
    io::write_path_rows(out, p);
    const auto back = io::parse_paths_csv(out.str());
    REQUIRE(back.size() == 2);
    CHECK(back[0].path_id == 3);
    CHECK(back[1].s == p.s);
}

TEST_CASE("number format") {
    CHECK(io::fmt(0.1) == "0.1");
    CHECK(io::fmt(1.0 / 3.0) == "0.333333333333");
    CHECK(io::fmt(7.96556745540154) == "7.9655674554");
}
