#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "tdheston/charfn.hpp"
#include "tdheston/errors.hpp"

namespace tdh {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct State {
    Complex B, A;
};

State operator+(State x, State y) { return {x.B + y.B, x.A + y.A}; }
State operator*(double h, State x) { return {h * x.B, h * x.A}; }

// Coeff(tau) yields (a, beta, gamma) of the Riccati pair at tau.
template <class Coeff>
class Integrator {
public:
    Integrator(Coeff coeff, Complex alpha, RiccatiTolerance tol) : coeff_(coeff), alpha_(alpha), tol_(tol) {}

    State rhs(double t, const State& y) const {
        const auto [a, beta, gamma] = coeff_(t);
        return {alpha_ - beta * y.B + gamma * y.B * y.B, a * y.B};
    }

    // Advances (t, y) to t_end exactly. h is the running step proposal.
    void advance(double& t, State& y, double t_end, double& h) {
        if (t_end <= t) return;
        State k1 = rhs(t, y);
        const double span = std::max(1.0, std::abs(t_end));
        while (t < t_end) {
            bool last = false;
            double step = h;
            if (t + step >= t_end || t_end - (t + step) < 1e-12 * span) {
                step = t_end - t;
                last = true;
            }
            if (step < 1e-14 * span) {
                std::ostringstream msg;
                msg << "riccati_solve_numeric: step size underflow at tau=" << t
                    << " (suspected finite-time blow-up of B)";
                throw StepFailure(msg.str(), t);
            }
            if (++steps_ > kMaxSteps) throw StepFailure("riccati_solve_numeric: step budget exhausted", t);

            const State k2 = rhs(t + c2 * step, y + (step * a21) * k1);
            const State k3 = rhs(t + c3 * step, y + step * (a31 * k1 + a32 * k2));
            const State k4 = rhs(t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
            const State k5 = rhs(t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const State k6 =
                rhs(t + step, y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const State y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const State k7 = rhs(t + step, y_new);
            const State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const double sb = tol_.atol + tol_.rtol * std::max(std::abs(y.B), std::abs(y_new.B));
            const double sa = tol_.atol + tol_.rtol * std::max(std::abs(y.A), std::abs(y_new.A));
            double norm = std::max(std::abs(err.B) / sb, std::abs(err.A) / sa);
            if (!std::isfinite(norm)) norm = 1e10;

            if (norm <= 1.0) {
                t = last ? t_end : t + step;
                y = y_new;
                k1 = k7;
                const double grow = norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(norm, -0.2));
                // A step clipped to land on t_end says little about the natural size.
                h = last ? std::max(h, grow * step) : grow * step;
            } else {
                h = step * std::max(0.2, 0.9 * std::pow(norm, -0.2));
            }
        }
    }

private:
    static constexpr long kMaxSteps = 2'000'000;
    Coeff coeff_;
    Complex alpha_;
    RiccatiTolerance tol_;
    long steps_ = 0;
};

template <class Coeff>
std::vector<CharFnValue> solve(Coeff coeff, Complex omega, const std::vector<double>& taus, RiccatiTolerance tol) {
    for (std::size_t k = 0; k < taus.size(); ++k) {
        if (!(taus[k] >= 0.0) || !std::isfinite(taus[k]))
            throw InvalidArgument("riccati_solve_numeric: tau must be finite and >= 0");
        if (k > 0 && taus[k] < taus[k - 1]) throw InvalidArgument("riccati_solve_numeric: taus must be ascending");
    }
    if (!(tol.rtol > 0.0) || !(tol.atol > 0.0)) throw InvalidArgument("riccati_solve_numeric: tolerances must be > 0");

    const Complex alpha = riccati_alpha(omega);
    const Complex c(0.0, 1.0);
    std::vector<CharFnValue> out;
    out.reserve(taus.size());
    if (alpha == Complex{}) {
        for (std::size_t k = 0; k < taus.size(); ++k) out.push_back({0.0, 0.0, c * omega, 1.0, false});
        return out;
    }
    Integrator<Coeff> integ(coeff, alpha, tol);
    double t = 0.0;
    State y{0.0, 0.0};
    double h = taus.empty() || taus.back() == 0.0 ? 0.0 : taus.back() / 100.0;
    for (double target : taus) {
        integ.advance(t, y, target, h);
        out.push_back({y.A, y.B, c * omega, std::exp(y.A), false});
    }
    return out;
}

}  // namespace

CharFnValue riccati_solve_numeric(const LinearParams& p, Complex omega, double tau, double tol) {
    return riccati_solve_numeric(p, omega, std::vector<double>{tau}, {tol, tol * 1e-2}).front();
}

std::vector<CharFnValue> riccati_solve_numeric(const LinearParams& p, Complex omega, const std::vector<double>& taus,
                                               RiccatiTolerance tol) {
    const Complex i(0.0, 1.0);
    const Complex iw = i * omega;
    auto coeff = [p, iw](double t) {
        const double eta = p.eta(t);
        const double kappa = p.kappa(t);
        return std::tuple<double, Complex, double>{kappa * p.theta(t), kappa - p.rho(t) * eta * iw,
                                                   0.5 * eta * eta};
    };
    return solve(coeff, omega, taus, tol);
}

CharFnValue riccati_solve_numeric(const ParamPath& p, Complex omega, double tau, RiccatiTolerance tol) {
    if (!p.kappa || !p.theta || !p.eta || !p.rho) throw InvalidArgument("riccati_solve_numeric: incomplete ParamPath");
    const Complex iw = Complex(0.0, 1.0) * omega;
    auto coeff = [&p, iw](double t) {
        const double eta = p.eta(t);
        const double kappa = p.kappa(t);
        return std::tuple<double, Complex, double>{kappa * p.theta(t), kappa - p.rho(t) * eta * iw,
                                                   0.5 * eta * eta};
    };
    return solve(coeff, omega, std::vector<double>{tau}, tol).front();
}

}  // namespace tdh
