#include <cmath>
#include <sstream>

#include "tdheston/charfn.hpp"
#include "tdheston/errors.hpp"

namespace tdh {

LinearParams LinearParams::constant(double kappa, double theta, double eta, double rho) {
    LinearParams p;
    p.kappa2 = kappa;
    p.theta2 = theta;
    p.eta2 = eta;
    p.rho2 = rho;
    return p;
}

void LinearParams::validate(double tau_max) const {
    if (!(tau_max >= 0.0) || !std::isfinite(tau_max)) throw InvalidParams("tau_max must be finite and >= 0");
    for (double c : {kappa1, kappa2, theta1, theta2, eta1, eta2, rho1, rho2})
        if (!std::isfinite(c)) throw InvalidParams("parameter coefficients must be finite");
    for (double t : {0.0, tau_max}) {
        std::ostringstream where;
        where << " at tau=" << t;
        if (kappa(t) < 0.0) throw InvalidParams("kappa(tau) < 0" + where.str());
        if (theta(t) < 0.0) throw InvalidParams("theta(tau) < 0" + where.str());
        if (!(eta(t) > 0.0)) throw InvalidParams("eta(tau) <= 0" + where.str());
        if (std::abs(rho(t)) > 1.0) throw InvalidParams("|rho(tau)| > 1" + where.str());
    }
}

bool LinearParams::is_valid(double tau_max) const {
    try {
        validate(tau_max);
        return true;
    } catch (const InvalidParams&) {
        return false;
    }
}

ParamPath ParamPath::from_linear(const LinearParams& p) {
    return {[p](double t) { return p.kappa(t); }, [p](double t) { return p.theta(t); },
            [p](double t) { return p.eta(t); }, [p](double t) { return p.rho(t); }};
}

RiccatiCoeffs riccati_coeffs(const LinearParams& p, Complex omega, double tau) {
    const Complex i(0.0, 1.0);
    const double eta = p.eta(tau);
    return {p.kappa(tau) * p.theta(tau), riccati_alpha(omega), p.kappa(tau) - p.rho(tau) * eta * i * omega,
            0.5 * eta * eta};
}

Route parse_route(const std::string& name) {
    if (name == "auto") return Route::Auto;
    if (name == "closed") return Route::Closed;
    if (name == "heun") return Route::Heun;
    if (name == "numeric") return Route::Numeric;
    throw InvalidArgument("unknown route '" + name + "' (expected auto, closed, heun or numeric)");
}

std::string to_string(Route r) {
    switch (r) {
        case Route::Auto: return "auto";
        case Route::Closed: return "closed";
        case Route::Heun: return "heun";
        case Route::Numeric: return "numeric";
    }
    return "auto";
}

}  // namespace tdh
