#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdheston/errors.hpp"
#include "tdheston/pricer.hpp"
#include "tdheston/quadrature.hpp"

namespace tdh {

void MarketContext::validate() const {
    if (!(spot > 0.0) || !std::isfinite(spot)) throw InvalidArgument("market: spot must be positive");
    if (!(strike > 0.0) || !std::isfinite(strike)) throw InvalidArgument("market: strike must be positive");
    if (!(maturity > 0.0) || !std::isfinite(maturity)) throw InvalidArgument("market: maturity must be positive");
    if (!(v0 >= 0.0) || !std::isfinite(v0)) throw InvalidArgument("market: v0 must be >= 0");
    if (!std::isfinite(rate)) throw InvalidArgument("market: rate must be finite");
}

namespace {

// Each integrand value only needs f to this absolute accuracy.
constexpr double kCfAbsTol = 1e-13;

struct AB {
    Complex A, B;
};

// CF exponents at omega (for P2) and omega - i (for P1), one entry per maturity.
class CfTable {
public:
    CfTable(const LinearParams& p, std::vector<double> maturities, Route route, double v0)
        : p_(p), maturities_(std::move(maturities)), route_(route), acc_{kCfAbsTol, v0} {}

    void at(double omega, std::vector<AB>& p2, std::vector<AB>& p1) {
        p2.resize(maturities_.size());
        p1.resize(maturities_.size());
        const Complex w(omega, 0.0), ws(omega, -1.0);
        if (route_ == Route::Numeric) {
            const auto a = riccati_solve_numeric(p_, w, maturities_);
            const auto b = riccati_solve_numeric(p_, ws, maturities_);
            for (std::size_t j = 0; j < maturities_.size(); ++j) {
                p2[j] = {a[j].A, a[j].B};
                p1[j] = {b[j].A, b[j].B};
            }
            return;
        }
        for (std::size_t j = 0; j < maturities_.size(); ++j) {
            const CharFnValue a = char_fn_value(p_, w, maturities_[j], route_, acc_);
            const CharFnValue b = char_fn_value(p_, ws, maturities_[j], route_, acc_);
            fallback_ = fallback_ || a.fallback_used || b.fallback_used;
            p2[j] = {a.A, a.B};
            p1[j] = {b.A, b.B};
        }
    }

    bool fallback_used() const { return fallback_; }

private:
    LinearParams p_;
    std::vector<double> maturities_;
    Route route_;
    CfAccuracy acc_;
    bool fallback_ = false;
};

}  // namespace

std::vector<PriceResult> price_many(double spot, double rate, double v0, const LinearParams& params,
                                    const std::vector<Instrument>& instruments, Route route, const PricerOptions& opts) {
    if (instruments.empty()) return {};
    std::vector<double> maturities;
    for (const Instrument& ins : instruments) {
        MarketContext{spot, rate, ins.maturity, ins.strike, v0}.validate();
        maturities.push_back(ins.maturity);
    }
    std::sort(maturities.begin(), maturities.end());
    maturities.erase(std::unique(maturities.begin(), maturities.end()), maturities.end());
    params.validate(maturities.back());
    if (route == Route::Closed && params.eta1 != 0.0)
        throw RouteMismatch("route 'closed' needs constant eta (eta1 = 0); use heun or numeric");
    if (route == Route::Heun && params.eta1 == 0.0)
        throw RouteMismatch("route 'heun' needs linear eta (eta1 != 0); use closed or numeric");

    const std::size_t n = instruments.size();
    std::vector<std::size_t> mat_index(n);
    std::vector<double> x0(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Instrument& ins = instruments[k];
        mat_index[k] = static_cast<std::size_t>(
            std::lower_bound(maturities.begin(), maturities.end(), ins.maturity) - maturities.begin());
        x0[k] = std::log(spot / ins.strike) + rate * ins.maturity;
    }

    CfTable table(params, maturities, route, v0);
    std::vector<AB> cf2, cf1;
    // Components 2k and 2k+1 carry Re[f/(i w)] for P1 and P2 of instrument k.
    auto integrand = [&](double w, std::vector<double>& out) {
        table.at(w, cf2, cf1);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = mat_index[k];
            const Complex phase(0.0, w * x0[k]);
            const Complex e1 = std::exp(cf1[j].A + cf1[j].B * v0 + phase);
            const Complex e2 = std::exp(cf2[j].A + cf2[j].B * v0 + phase);
            out[2 * k] = e1.imag() / w;
            out[2 * k + 1] = e2.imag() / w;
        }
    };

    const std::size_t dim = 2 * n;
    std::vector<double> total(dim, 0.0), buf(dim);
    // [0, omega_min]: the integrand has a finite limit at 0, so one rectangle suffices.
    integrand(opts.omega_min, buf);
    for (std::size_t c = 0; c < dim; ++c) total[c] = opts.omega_min * buf[c];

    quad::Options qo;
    qo.abs_tol = opts.abs_tol;
    qo.max_intervals = 4000;
    double err = 0.0;
    double lo = opts.omega_min, hi = std::min(opts.first_panel, opts.omega_cap);
    bool cap_reached = false;
    for (;;) {
        const auto r = quad::integrate(integrand, dim, lo, hi, qo);
        double contribution = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            total[c] += r.value[c];
            contribution = std::max(contribution, std::abs(r.value[c]));
        }
        err += r.error;
        if (contribution < opts.panel_tol && lo > opts.omega_min) break;
        if (hi >= opts.omega_cap) {
            cap_reached = contribution >= opts.panel_tol;
            break;
        }
        lo = hi;
        hi = std::min(2.0 * hi, opts.omega_cap);
    }

    std::vector<PriceResult> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Instrument& ins = instruments[k];
        const double df = std::exp(-rate * ins.maturity);
        PriceResult& res = out[k];
        res.p1 = 0.5 + total[2 * k] / std::numbers::pi;
        res.p2 = 0.5 + total[2 * k + 1] / std::numbers::pi;
        res.call = spot * res.p1 - ins.strike * df * res.p2;
        // Quadrature noise can leave a price a hair below zero.
        const double slack = 1e-10 * spot;
        if (res.call < 0.0 && res.call > -slack) res.call = 0.0;
        res.put = res.call - spot + ins.strike * df;
        if (res.put < 0.0 && res.put > -slack) {
            res.put = 0.0;
            res.call = spot - ins.strike * df;
        }
        res.quad_error_estimate = err * std::max(spot, ins.strike) / std::numbers::pi;
        res.omega_max = hi;
        res.cap_reached = cap_reached;
        res.fallback_used = table.fallback_used();
    }
    return out;
}

PriceResult price_european(const MarketContext& ctx, const LinearParams& params, Route route,
                           const PricerOptions& opts) {
    ctx.validate();
    return price_many(ctx.spot, ctx.rate, ctx.v0, params, {{ctx.strike, ctx.maturity}}, route, opts).front();
}

std::vector<SmilePoint> smile(const MarketContext& ctx_base, const LinearParams& params,
                              const std::vector<double>& strikes, Route route, const PricerOptions& opts) {
    ctx_base.validate();
    std::vector<Instrument> ins;
    for (std::size_t k = 0; k < strikes.size(); ++k) {
        if (!(strikes[k] > 0.0)) throw InvalidArgument("smile: strikes must be positive");
        if (k > 0 && strikes[k] <= strikes[k - 1]) throw InvalidArgument("smile: strikes must be ascending");
        ins.push_back({strikes[k], ctx_base.maturity});
    }
    const auto prices = price_many(ctx_base.spot, ctx_base.rate, ctx_base.v0, params, ins, route, opts);
    std::vector<SmilePoint> out;
    for (std::size_t k = 0; k < strikes.size(); ++k) {
        const double iv = implied_vol(prices[k].call, ctx_base.spot, strikes[k], ctx_base.rate, ctx_base.maturity);
        out.push_back({strikes[k], ctx_base.maturity, prices[k].call, prices[k].put, iv});
    }
    return out;
}

}  // namespace tdh
