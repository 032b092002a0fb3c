#pragma once

// Characteristic function f = exp(A + B V + i w x) of the Heston model whose
// kappa, theta, eta and rho are linear in time to maturity tau.

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace tdh {

using Complex = std::complex<double>;

/// kappa(tau) = kappa1 tau + kappa2, and the same shape for theta, eta, rho.
struct LinearParams {
    double kappa1 = 0.0, kappa2 = 0.0;
    double theta1 = 0.0, theta2 = 0.0;
    double eta1 = 0.0, eta2 = 0.0;
    double rho1 = 0.0, rho2 = 0.0;

    double kappa(double tau) const { return kappa1 * tau + kappa2; }
    double theta(double tau) const { return theta1 * tau + theta2; }
    double eta(double tau) const { return eta1 * tau + eta2; }
    double rho(double tau) const { return rho1 * tau + rho2; }

    static LinearParams constant(double kappa, double theta, double eta, double rho);

    /// Throws InvalidParams unless kappa, theta >= 0, eta > 0 and |rho| <= 1 on
    /// [0, tau_max]. Linear paths only need the two endpoints.
    void validate(double tau_max) const;
    bool is_valid(double tau_max) const;

    bool operator==(const LinearParams&) const = default;
};

/// Arbitrary deterministic parameter paths, for the numeric Riccati oracle.
struct ParamPath {
    std::function<double(double)> kappa, theta, eta, rho;

    static ParamPath from_linear(const LinearParams& p);
};

/// Coefficients of B' = alpha - beta B + gamma B^2, A' = a B at one tau.
struct RiccatiCoeffs {
    double a = 0.0;
    Complex alpha;
    Complex beta;
    double gamma = 0.0;
};

RiccatiCoeffs riccati_coeffs(const LinearParams& p, Complex omega, double tau);

inline Complex riccati_alpha(Complex omega) {
    return -0.5 * (omega * omega + Complex(0.0, 1.0) * omega);
}

struct CharFnValue {
    Complex A;
    Complex B;
    Complex C;  // i omega
    Complex f;  // exp(A + B V + C x); component solvers use x = V = 0
    bool fallback_used = false;

    Complex assemble(double x, double v) const { return std::exp(A + B * v + C * x); }
};

enum class Route { Auto, Closed, Heun, Numeric };

Route parse_route(const std::string& name);
std::string to_string(Route r);

struct RiccatiTolerance {
    double rtol = 1e-10;
    double atol = 1e-12;
};

/// Adaptive Dormand-Prince 5(4) integration of the Riccati pair from 0 to tau.
/// Throws StepFailure (carrying the tau reached) when the step size underflows.
CharFnValue riccati_solve_numeric(const LinearParams& p, Complex omega, double tau,
                                  double tol = 1e-10);
CharFnValue riccati_solve_numeric(const ParamPath& p, Complex omega, double tau,
                                  RiccatiTolerance tol = {});

/// One integration that stops exactly at every requested tau (ascending, >= 0).
std::vector<CharFnValue> riccati_solve_numeric(const LinearParams& p, Complex omega,
                                               const std::vector<double>& taus,
                                               RiccatiTolerance tol = {});

/// Classic constant-parameter Heston A and B, written so that no term divides
/// by gamma (small vol-of-vol stays accurate).
CharFnValue heston_constant_cf(double kappa, double theta, double eta, double rho, Complex omega,
                               double tau);

struct ConstantEtaAux {
    Complex g1;
    Complex g2;
    Complex z;
    Complex F;  // U(a+1, 3/2, z0) / M(a+1, 3/2, z0), z0 = z(0)
};

ConstantEtaAux constant_eta_aux(const LinearParams& p, Complex omega, double tau);

/// Diagnostics of the last closed-form evaluation on this thread.
struct ClosedFormDiagnostics {
    long precision_bits = 53;  // 53 means the double tier sufficed
    double estimated_loss_bits = 0.0;
    int series_terms = 0;
    bool degenerate_g1 = false;
};
const ClosedFormDiagnostics& last_closed_form_diagnostics();

/// B for constant eta from the Kummer-function solution. The series are summed in
/// a working precision grown until the measured cancellation leaves enough bits.
/// |g1| < 1e-12 uses the constant-coefficient solution instead.
/// Throws DenominatorUnderflow near a zero of D, NoConvergence past the precision cap.
Complex b_closed_constant_eta(const LinearParams& p, Complex omega, double tau);

/// Same B at several tau values sharing the tau-independent work.
std::vector<Complex> b_closed_constant_eta(const LinearParams& p, Complex omega,
                                           const std::vector<double>& taus);

struct HeunAux {
    Complex h1, h2, h3;
    Complex k1, k2;  // eta_{1,2} sqrt(alpha / 2), principal root
    Complex f_prefactor;  // f(tau) of the first solution's exponential factor
    Complex heun_alpha, heun_beta, heun_gamma;  // values the construction uses
    Complex printed_alpha, printed_beta;        // the uncorrected published forms
    Complex lambda, mu;                         // tau = lambda z + mu
};

HeunAux heun_aux(const LinearParams& p, Complex omega, double tau);

struct HeunResult {
    Complex B;
    bool fallback_used = false;
    std::string diagnostic;
    double residual = 0.0;  // largest Riccati residual over the sampled tau
    HeunAux aux;
};

/// Experimental: B for linear eta through triconfluent Heun functions. The value
/// is accepted only when it passes the Riccati residual test; otherwise the number
/// returned is the numeric Riccati B with fallback_used set.
HeunResult b_heun_linear_eta(const LinearParams& p, Complex omega, double tau);

/// A(tau) = int_0^tau kappa(s) theta(s) B(s) ds by adaptive Gauss-Kronrod, abs tol 1e-10.
Complex a_from_b(const LinearParams& p, Complex omega, double tau,
                 const std::function<Complex(double)>& b_eval);

// Optional accuracy hint for callers that only need f = exp(A + B v) to an
// absolute tolerance: the A quadrature of the closed route may then stop once
// its error times |f| is below f_abs_tol. Abs tol 1e-10 on A applies otherwise.
struct CfAccuracy {
    double f_abs_tol = 0.0;
    double v = 0.0;
};

/// A and B by the chosen route. Auto uses the closed form when eta1 = 0 and the
/// Heun route otherwise; a closed form that cannot converge falls back to the
/// numeric route under Auto.
CharFnValue char_fn_value(const LinearParams& p, Complex omega, double tau, Route route = Route::Auto,
                          const CfAccuracy& acc = {});

Complex char_fn(const LinearParams& p, double x, double v, double tau, Complex omega,
                Route route = Route::Auto);

}  // namespace tdh
