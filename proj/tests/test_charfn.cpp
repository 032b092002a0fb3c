#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fixture.hpp"
#include "tdheston/charfn.hpp"
#include "tdheston/errors.hpp"

using namespace tdh;

namespace {

const Complex kMinusI(0.0, -1.0);

LinearParams closed_example() {
    LinearParams p;
    p.kappa1 = 0.5;
    p.kappa2 = 1.0;
    p.theta2 = 0.04;
    p.eta2 = 0.4;
    p.rho1 = 0.1;
    p.rho2 = -0.3;
    return p;
}

LinearParams heun_example() {
    LinearParams p = LinearParams::constant(1.5, 0.04, 0.3, -0.4);
    p.eta1 = 0.2;
    return p;
}

// Valid on [0, 2] by construction; eta1 = 0 when constant_eta.
LinearParams random_params(std::mt19937_64& rng, bool constant_eta) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LinearParams p;
    p.kappa2 = 0.2 + 2.8 * u(rng);
    p.kappa1 = -0.4 * p.kappa2 * u(rng) + 1.0 * u(rng);
    p.theta2 = 0.01 + 0.09 * u(rng);
    p.theta1 = -0.4 * p.theta2 * u(rng) + 0.03 * u(rng);
    p.eta2 = 0.1 + 0.7 * u(rng);
    p.eta1 = constant_eta ? 0.0 : -0.2 * p.eta2 + 0.4 * p.eta2 * u(rng);
    p.rho2 = -0.9 + 1.4 * u(rng);
    const double room = std::min(1.0 - p.rho2, 1.0 + p.rho2) / 2.0;
    p.rho1 = room * (2.0 * u(rng) - 1.0);
    REQUIRE(p.is_valid(2.0));
    return p;
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(closed_example().validate(2.0));
    LinearParams p = closed_example();
    p.rho1 = 0.5;  // rho(2) = 0.7, rho(4) = 1.7
    CHECK_NOTHROW(p.validate(2.0));
    CHECK_THROWS_AS(p.validate(4.0), InvalidParams);
    p = closed_example();
    p.eta2 = 0.0;
    CHECK_THROWS_AS(p.validate(1.0), InvalidParams);
    p = closed_example();
    p.kappa1 = -1.0;  // kappa(1.5) < 0
    CHECK_THROWS_AS(p.validate(1.5), InvalidParams);
    p = closed_example();
    p.theta1 = std::nan("");
    CHECK_FALSE(p.is_valid(1.0));
}

TEST_CASE("riccati coefficients") {
    const RiccatiCoeffs c = riccati_coeffs(closed_example(), 0.0, 1.0);
    CHECK(c.alpha == Complex{});
    CHECK(riccati_alpha(kMinusI) == Complex{});
    const RiccatiCoeffs d = riccati_coeffs(closed_example(), 2.0, 1.0);
    CHECK(std::abs(d.alpha - Complex(-2.0, -1.0)) < 1e-15);
    CHECK(std::abs(d.beta - Complex(1.5, 0.4 * 0.2 * 2.0)) < 1e-15);
    CHECK(d.gamma == Catch::Approx(0.08));
    CHECK(d.a == Catch::Approx(1.5 * 0.04));
}

TEST_CASE("numeric Riccati at the trivial frequencies") {
    for (Complex w : {Complex(0.0), kMinusI}) {
        const CharFnValue v = riccati_solve_numeric(closed_example(), w, 1.3);
        CHECK(v.A == Complex{});
        CHECK(v.B == Complex{});
    }
}

TEST_CASE("numeric Riccati against the constant-parameter CF") {
    const LinearParams p = LinearParams::constant(2.0, 0.04, 0.3, -0.5);
    for (auto [w, tau] : {std::pair{1.0, 1.0}, std::pair{1.5, 0.5}, std::pair{-12.0, 2.0}}) {
        const CharFnValue r = riccati_solve_numeric(p, w, tau, 1e-12);
        const CharFnValue c = heston_constant_cf(2.0, 0.04, 0.3, -0.5, w, tau);
        CHECK(std::abs(r.A - c.A) < 1e-9);
        CHECK(std::abs(r.B - c.B) < 1e-9);
    }
}

TEST_CASE("numeric Riccati matches an independent 30-digit solve") {
    const std::vector<LinearParams> sets{closed_example(), [] {
                                             LinearParams p;
                                             p.kappa1 = 0.3;
                                             p.kappa2 = 1.2;
                                             p.theta1 = 0.01;
                                             p.theta2 = 0.04;
                                             p.eta1 = 0.1;
                                             p.eta2 = 0.3;
                                             p.rho1 = 0.1;
                                             p.rho2 = -0.5;
                                             return p;
                                         }()};
    const auto rows = load_fixtures("riccati_b");
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        const LinearParams& p = sets[static_cast<std::size_t>(r.b)];
        const Complex b = riccati_solve_numeric(p, r.a, r.z.real(), 1e-12).B;
        INFO("omega = " << r.a << " tau = " << r.z.real());
        CHECK(std::abs(b - r.f) < 1e-9 * (1.0 + std::abs(r.f)));
        if (p.eta1 == 0.0) CHECK(std::abs(b_closed_constant_eta(p, r.a, r.z.real()) - r.f) < 1e-9 * (1.0 + std::abs(r.f)));
    }
}

TEST_CASE("numeric Riccati over a sampled path and on several horizons") {
    const LinearParams p = closed_example();
    const ParamPath path = ParamPath::from_linear(p);
    const CharFnValue a = riccati_solve_numeric(path, 3.0, 1.5, {1e-11, 1e-13});
    const CharFnValue b = riccati_solve_numeric(p, 3.0, 1.5, 1e-11);
    CHECK(std::abs(a.B - b.B) < 1e-9);
    const auto many = riccati_solve_numeric(p, 3.0, std::vector<double>{0.5, 1.0, 1.5});
    REQUIRE(many.size() == 3);
    CHECK(std::abs(many[2].B - b.B) < 1e-8);
    CHECK(std::abs(many[0].B - riccati_solve_numeric(p, 3.0, 0.5).B) < 1e-8);
    CHECK_THROWS_AS(riccati_solve_numeric(p, 3.0, std::vector<double>{1.0, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(riccati_solve_numeric(p, 3.0, -1.0), InvalidArgument);
}

TEST_CASE("numeric Riccati reports a blow-up") {
    // A real, strongly explosive moment: omega = -4i gives alpha = 6 > 0 and B
    // leaves to infinity in finite time when kappa is small.
    const LinearParams p = LinearParams::constant(0.0, 0.04, 1.5, 0.9);
    try {
        riccati_solve_numeric(p, Complex(0.0, -4.0), 5.0);
        FAIL("expected StepFailure");
    } catch (const StepFailure& e) {
        CHECK(e.tau_reached() > 0.0);
        CHECK(e.tau_reached() < 5.0);
    }
}

TEST_CASE("constant-parameter CF trivial values") {
    for (Complex w : {Complex(0.0), kMinusI}) {
        const CharFnValue v = heston_constant_cf(2.0, 0.04, 0.3, -0.5, w, 1.0);
        CHECK(std::abs(v.A) < 1e-15);
        CHECK(std::abs(v.B) < 1e-15);
    }
}

TEST_CASE("closed-form B basics") {
    const LinearParams p = closed_example();
    CHECK(b_closed_constant_eta(p, 2.0, 0.0) == Complex{});
    LinearParams bad = p;
    bad.eta1 = 0.1;
    CHECK_THROWS_AS(b_closed_constant_eta(bad, 2.0, 1.0), RouteMismatch);
    const ConstantEtaAux aux = constant_eta_aux(p, 2.0, 1.0);
    const Complex g1 = p.kappa1 - Complex(0.0, 1.0) * p.rho1 * p.eta2 * 2.0;
    CHECK(std::abs(aux.g1 - g1) < 1e-15);
    const Complex u = aux.g1 * 1.0 + aux.g2;
    CHECK(std::abs(aux.z + u * u / (2.0 * aux.g1)) < 1e-14);
    CHECK(std::isfinite(std::abs(aux.F)));
}

TEST_CASE("closed-form B against the numeric oracle") {
    // kappa = 1 + 0.5 tau, theta = 0.04, eta = 0.4, rho = -0.3 + 0.1 tau at omega = 2, tau = 1.
    const LinearParams p = closed_example();
    const Complex b = b_closed_constant_eta(p, 2.0, 1.0);
    const Complex r = riccati_solve_numeric(p, 2.0, 1.0, 1e-12).B;
    CHECK(std::abs(b - r) <= 1e-7 * std::abs(r));

    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> uw(-80.0, 80.0), ut(1e-3, 2.0);
    for (int k = 0; k < 40; ++k) {
        const LinearParams q = random_params(rng, true);
        const double w = uw(rng), tau = ut(rng);
        const Complex bc = b_closed_constant_eta(q, w, tau);
        const Complex br = riccati_solve_numeric(q, w, tau).B;
        INFO("draw " << k << " omega " << w << " tau " << tau);
        CHECK(std::abs(bc - br) <= 1e-6 * (1.0 + std::abs(br)));
    }
}

TEST_CASE("closed-form B reduces to the classic formula") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uw(-30.0, 30.0), ut(0.05, 2.0);
    for (int k = 0; k < 50; ++k) {
        const LinearParams p = LinearParams::constant(0.5 + 2.0 * k / 50.0, 0.04, 0.2 + 0.01 * k, -0.6 + 0.02 * k);
        const double w = uw(rng), tau = ut(rng);
        const Complex b = b_closed_constant_eta(p, w, tau);
        const CharFnValue c = heston_constant_cf(p.kappa2, p.theta2, p.eta2, p.rho2, w, tau);
        CHECK(std::abs(b - c.B) < 1e-8);
        CHECK(last_closed_form_diagnostics().degenerate_g1);
    }
}

TEST_CASE("closed-form B satisfies the Riccati equation at interior points") {
    const LinearParams p = closed_example();
    for (double w : {-15.0, 2.0, 30.0}) {
        const double tmax = 1.8;
        for (int k = 1; k <= 20; ++k) {
            const double t = tmax * k / 21.0, h = 1e-5;
            const Complex b = b_closed_constant_eta(p, w, t);
            const Complex bp = (b_closed_constant_eta(p, w, t + h) - b_closed_constant_eta(p, w, t - h)) / (2.0 * h);
            const RiccatiCoeffs c = riccati_coeffs(p, w, t);
            const Complex res = bp - (c.alpha - c.beta * b + c.gamma * b * b);
            CHECK(std::abs(res) <= 1e-6 * (1.0 + std::abs(bp)));
        }
    }
}

TEST_CASE("closed-form B on a horizon grid equals pointwise values") {
    const LinearParams p = closed_example();
    const std::vector<double> taus{0.1, 0.4, 0.9, 1.7};
    const auto v = b_closed_constant_eta(p, Complex(7.0, -1.0), taus);
    for (std::size_t k = 0; k < taus.size(); ++k)
        CHECK(std::abs(v[k] - b_closed_constant_eta(p, Complex(7.0, -1.0), taus[k])) < 1e-12 * (1 + std::abs(v[k])));
}

TEST_CASE("Heun auxiliary quantities") {
    const LinearParams p = heun_example();
    const HeunAux x = heun_aux(p, 1.0, 0.5);
    const Complex iw(0.0, 1.0);
    CHECK(std::abs(x.h1 - (-iw * p.rho1 * p.eta1)) < 1e-15);
    CHECK(std::abs(x.h3 - (p.kappa2 - p.rho2 * p.eta2 * iw)) < 1e-15);
    // h1 vanishes with rho1 = 0.
    CHECK(x.h1 == Complex{});
    LinearParams q = p;
    q.rho1 = 0.1;
    const HeunAux y = heun_aux(q, 1.0, 0.5);
    CHECK(std::abs(y.h1) > 0.0);
    CHECK(std::abs(y.lambda * y.lambda * y.lambda * y.h1 - 3.0) < 1e-12);
}

TEST_CASE("Heun route contract") {
    const LinearParams p = heun_example();
    CHECK(b_heun_linear_eta(p, 1.0, 0.0).B == Complex{});
    CHECK(b_heun_linear_eta(p, 0.0, 1.0).B == Complex{});
    const Complex truth = riccati_solve_numeric(p, 1.0, 0.5).B;
    const HeunResult r = b_heun_linear_eta(p, 1.0, 0.5);
    if (!r.fallback_used) {
        CHECK(std::abs(r.B - truth) <= 1e-6);
    } else {
        CHECK(r.diagnostic.find("FallbackUsed") != std::string::npos);
        CHECK(std::abs(r.B - truth) <= 1e-9);
    }
    LinearParams q = p;
    q.rho1 = 0.15;
    for (double w : {0.5, 3.0, -6.0}) {
        const HeunResult h = b_heun_linear_eta(q, w, 1.0);
        const Complex t = riccati_solve_numeric(q, w, 1.0).B;
        CHECK((h.fallback_used || std::abs(h.B - t) <= 1e-6));
        CHECK(std::abs(h.B - t) <= 1e-6);
    }
}

TEST_CASE("A from B") {
    const LinearParams p = closed_example();
    CHECK(a_from_b(p, 2.0, 1.0, [](double) { return Complex{}; }) == Complex{});
    CHECK(a_from_b(p, 2.0, 0.0, [](double) { return Complex(1.0); }) == Complex{});
    const LinearParams c = LinearParams::constant(2.0, 0.04, 0.3, -0.5);
    const Complex a = a_from_b(c, 1.5, 0.8, [&](double s) { return heston_constant_cf(2.0, 0.04, 0.3, -0.5, 1.5, s).B; });
    CHECK(std::abs(a - heston_constant_cf(2.0, 0.04, 0.3, -0.5, 1.5, 0.8).A) < 1e-8);
}

TEST_CASE("char_fn identities") {
    const LinearParams p = closed_example();
    for (Route r : {Route::Auto, Route::Closed, Route::Numeric}) {
        CHECK(std::abs(char_fn(p, 0.2, 0.04, 1.0, 0.0, r) - 1.0) < 1e-15);
        CHECK(std::abs(char_fn(p, 0.2, 0.04, 1.0, kMinusI, r) - std::exp(0.2)) < 1e-14);
        const CharFnValue v0 = char_fn_value(p, 3.0, 0.0, r);
        CHECK(v0.A == Complex{});
        CHECK(v0.B == Complex{});
        CHECK(v0.C == Complex(0.0, 3.0));
    }
    const LinearParams c = LinearParams::constant(2.0, 0.04, 0.3, -0.5);
    const CharFnValue k = heston_constant_cf(2.0, 0.04, 0.3, -0.5, 1.0, 1.0);
    const Complex expect = std::exp(k.A + k.B * 0.04);
    for (Route r : {Route::Auto, Route::Closed, Route::Numeric}) CHECK(std::abs(char_fn(c, 0.0, 0.04, 1.0, 1.0, r) - expect) < 1e-9);
}

TEST_CASE("char_fn route checks") {
    CHECK_THROWS_AS(char_fn_value(closed_example(), 1.0, 1.0, Route::Heun), RouteMismatch);
    CHECK_THROWS_AS(char_fn_value(heun_example(), 1.0, 1.0, Route::Closed), RouteMismatch);
    CHECK_THROWS_AS(char_fn(closed_example(), 0.0, -0.1, 1.0, 1.0), InvalidArgument);
    CHECK(parse_route("heun") == Route::Heun);
    CHECK(to_string(Route::Numeric) == "numeric");
    CHECK_THROWS_AS(parse_route("fft"), InvalidArgument);
}

TEST_CASE("char_fn Hermitian symmetry and bound") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 10; ++k) {
        const LinearParams p = random_params(rng, k % 2 == 0);
        for (double w : {0.7, 4.0, 19.0}) {
            const Complex f = char_fn(p, 0.1, 0.05, 1.2, w);
            const Complex g = char_fn(p, 0.1, 0.05, 1.2, -w);
            CHECK(std::abs(f - std::conj(g)) < 1e-9);
            CHECK(std::abs(f) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("degenerate parameters agree on every route") {
    const LinearParams c = LinearParams::constant(1.3, 0.05, 0.45, -0.7);
    for (double w : {-9.0, 0.3, 6.0}) {
        const CharFnValue k = heston_constant_cf(1.3, 0.05, 0.45, -0.7, w, 1.4);
        for (Route r : {Route::Auto, Route::Closed, Route::Numeric}) {
            const CharFnValue v = char_fn_value(c, w, 1.4, r);
            CHECK(std::abs(v.A - k.A) < 1e-8);
            CHECK(std::abs(v.B - k.B) < 1e-8);
        }
    }
}

TEST_CASE("closed route A matches the numeric route") {
    const LinearParams p = closed_example();
    for (Complex w : {Complex(2.0), Complex(15.0, -1.0), Complex(-40.0)}) {
        const CharFnValue a = char_fn_value(p, w, 1.5, Route::Closed);
        const CharFnValue b = riccati_solve_numeric(p, w, 1.5, 1e-12);
        CHECK(std::abs(a.A - b.A) < 1e-9);
        CHECK(std::abs(a.B - b.B) < 1e-9 * (1.0 + std::abs(b.B)));
    }
}
