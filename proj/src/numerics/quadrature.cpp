#include "tdheston/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <limits>
#include <sstream>
#include <utility>

#include "tdheston/errors.hpp"

namespace tdh::quad {
namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467768170708,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// QUADPACK's error heuristic: treats |K - G| as pessimistic for smooth integrands.
double scaled_error(double raw, double resasc) {
    if (resasc != 0.0 && raw != 0.0) return resasc * std::min(1.0, std::pow(200.0 * raw / resasc, 1.5));
    return raw;
}

struct Panel {
    double a, b;
    std::vector<double> value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel rule(const std::function<void(double, std::vector<double>&)>& f, std::size_t dim, double a, double b,
           std::vector<double>& buf, int& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::vector<double> kron(dim, 0.0), gauss(dim, 0.0);
    std::vector<double> fx(dim * 15);
    const double wk_at[15] = {kWgk[7], kWgk[0], kWgk[0], kWgk[1], kWgk[1], kWgk[2], kWgk[2], kWgk[3],
                              kWgk[3], kWgk[4], kWgk[4], kWgk[5], kWgk[5], kWgk[6], kWgk[6]};
    int slot = 0;
    auto add = [&](double x, double wk, double wg) {
        f(x, buf);
        ++evals;
        for (std::size_t k = 0; k < dim; ++k) {
            kron[k] += wk * buf[k];
            gauss[k] += wg * buf[k];
            fx[static_cast<std::size_t>(slot) * dim + k] = buf[k];
        }
        ++slot;
    };
    add(c, kWgk[7], kWg[3]);
    for (int j = 0; j < 7; ++j) {
        const double wg = (j % 2 == 1) ? kWg[j / 2] : 0.0;
        add(c - h * kXgk[j], kWgk[j], wg);
        add(c + h * kXgk[j], kWgk[j], wg);
    }
    Panel p{a, b, std::vector<double>(dim), 0.0};
    for (std::size_t k = 0; k < dim; ++k) {
        p.value[k] = h * kron[k];
        const double mean = 0.5 * kron[k];
        double resasc = 0.0;
        for (int m = 0; m < 15; ++m) resasc += wk_at[m] * std::abs(fx[static_cast<std::size_t>(m) * dim + k] - mean);
        p.error = std::max(p.error, scaled_error(std::abs(h * (kron[k] - gauss[k])), std::abs(h) * resasc));
    }
    if (!std::isfinite(p.error)) p.error = std::numeric_limits<double>::infinity();
    return p;
}

}  // namespace

Result<std::vector<double>> integrate(const std::function<void(double, std::vector<double>&)>& f, std::size_t dim,
                                      double a, double b, const Options& opts) {
    Result<std::vector<double>> out{std::vector<double>(dim, 0.0), 0.0, 0};
    if (a == b) return out;
    std::vector<double> buf(dim);
    std::priority_queue<Panel> heap;
    heap.push(rule(f, dim, a, b, buf, out.evaluations));
    double total_err = heap.top().error;
    std::vector<double> total = heap.top().value;
    int intervals = 1;
    auto target = [&]() {
        double mag = 0.0;
        for (double v : total) mag = std::max(mag, std::abs(v));
        return std::max(opts.abs_tol, opts.rel_tol * mag);
    };
    while (total_err > target()) {
        if (intervals >= opts.max_intervals) {
            std::ostringstream msg;
            msg << "adaptive Gauss-Kronrod: error " << total_err << " above tolerance after " << intervals
                << " intervals on [" << a << ", " << b << "]";
            throw QuadratureFailure(msg.str());
        }
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = rule(f, dim, worst.a, mid, buf, out.evaluations);
        Panel right = rule(f, dim, mid, worst.b, buf, out.evaluations);
        for (std::size_t k = 0; k < dim; ++k) total[k] += left.value[k] + right.value[k] - worst.value[k];
        total_err += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++intervals;
        if (!std::isfinite(total_err)) {
            // recompute after an infinite estimate has been split away
            total_err = 0.0;
            auto copy = heap;
            while (!copy.empty()) {
                total_err += copy.top().error;
                copy.pop();
            }
        }
    }
    // Sum the panels afresh so the running updates leave no drift.
    std::fill(out.value.begin(), out.value.end(), 0.0);
    double err = 0.0;
    while (!heap.empty()) {
        const Panel& p = heap.top();
        for (std::size_t k = 0; k < dim; ++k) out.value[k] += p.value[k];
        err += p.error;
        heap.pop();
    }
    out.error = err;
    return out;
}

Result<std::complex<double>> integrate(const std::function<std::complex<double>(double)>& f, double a, double b,
                                       const Options& opts) {
    auto g = [&f](double x, std::vector<double>& out) {
        const std::complex<double> v = f(x);
        out[0] = v.real();
        out[1] = v.imag();
    };
    const auto r = integrate(g, 2, a, b, opts);
    return {{r.value[0], r.value[1]}, r.error, r.evaluations};
}

Result<std::complex<double>> integrate_batched(
    const std::function<std::vector<std::complex<double>>(const std::vector<double>&)>& f, double a, double b,
    const Options& opts) {
    using C = std::complex<double>;
    Result<C> out{C{}, 0.0, 0};
    if (a == b) return out;
    struct Span {
        double a, b;
        C value;
        double error;
    };
    auto nodes_of = [](double lo, double hi, std::vector<double>& xs) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        xs.push_back(c);
        for (int j = 0; j < 7; ++j) {
            xs.push_back(c - h * kXgk[j]);
            xs.push_back(c + h * kXgk[j]);
        }
    };
    auto apply = [](double lo, double hi, const C* fx) {
        const double h = 0.5 * (hi - lo);
        C kron = kWgk[7] * fx[0], gauss = kWg[3] * fx[0];
        for (int j = 0; j < 7; ++j) {
            const C pair = fx[1 + 2 * j] + fx[2 + 2 * j];
            kron += kWgk[j] * pair;
            if (j % 2 == 1) gauss += kWg[j / 2] * pair;
        }
        const C mean = 0.5 * kron;
        double resasc = kWgk[7] * std::abs(fx[0] - mean);
        for (int j = 0; j < 7; ++j)
            resasc += kWgk[j] * (std::abs(fx[1 + 2 * j] - mean) + std::abs(fx[2 + 2 * j] - mean));
        double err = scaled_error(std::abs(h * (kron - gauss)), std::abs(h) * resasc);
        if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
        return Span{lo, hi, h * kron, err};
    };
    auto sweep = [&](const std::vector<std::pair<double, double>>& spans) {
        std::vector<double> xs;
        xs.reserve(15 * spans.size());
        for (const auto& [lo, hi] : spans) nodes_of(lo, hi, xs);
        const std::vector<C> fx = f(xs);
        if (fx.size() != xs.size()) throw InvalidArgument("integrate_batched: integrand returned the wrong count");
        out.evaluations += static_cast<int>(xs.size());
        std::vector<Span> result;
        for (std::size_t k = 0; k < spans.size(); ++k)
            result.push_back(apply(spans[k].first, spans[k].second, fx.data() + 15 * k));
        return result;
    };

    std::vector<Span> panels = sweep({{a, b}});
    for (;;) {
        C total{};
        double err = 0.0;
        for (const auto& p : panels) {
            total += p.value;
            err += p.error;
        }
        double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
        if (opts.tol_from_estimate) tol = std::max(tol, opts.tol_from_estimate(total));
        if (err <= tol) {
            out.value = total;
            out.error = err;
            return out;
        }
        std::vector<std::pair<double, double>> split;
        std::vector<Span> keep;
        for (const auto& p : panels) {
            if (p.error > tol * (p.b - p.a) / (b - a)) {
                const double mid = 0.5 * (p.a + p.b);
                split.emplace_back(p.a, mid);
                split.emplace_back(mid, p.b);
            } else {
                keep.push_back(p);
            }
        }
        if (static_cast<int>(keep.size() + split.size()) > opts.max_intervals) {
            std::ostringstream msg;
            msg << "adaptive Gauss-Kronrod: error " << err << " above tolerance after " << panels.size()
                << " intervals on [" << a << ", " << b << "]";
            throw QuadratureFailure(msg.str());
        }
        std::vector<Span> fresh = sweep(split);
        keep.insert(keep.end(), fresh.begin(), fresh.end());
        panels = std::move(keep);
    }
}

}  // namespace tdh::quad
