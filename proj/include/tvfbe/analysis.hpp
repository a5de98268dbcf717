#pragma once

#include <stdexcept>

namespace tvfbe {

// Per-phase linear convergence factor of the quasi-Newton scheme on the
// envelope:
//   zeta = sqrt(max(1/2, 1 - (m/4) min(gamma, 1/(4L)))) < 1.
// Requires 0 < m <= L and gamma in (0, 1/L).
double contraction_factor(double m, double L, double gamma);

struct TrackingCheck {
    double zeta = 0.0;
    double A1 = 0.0;      // per-step error gain, first-order analysis
    bool satisfied = false;  // A1 < 1: bounded tracking error guaranteed
};

// First-order condition for bounded tracking error:
//   zeta^C [ zeta^P + (zeta^P + 1) (2L/m) (1-gamma m)/(1-gamma L) ] < 1.
// zeta is taken as input so that callers can share one computation.
TrackingCheck theorem1_check(double zeta, int P, int C, double m, double L, double gamma);

// Asymptotic tracking-error bound A0 / (1 - A1) of the first-order analysis.
// Throws std::domain_error when A1 >= 1 (the bound is vacuous).
double linear_asymptote(double m, double L, double gamma, double C0, double Ts, int P, int C);

// Every constant the convergence analysis produces, both routes.
struct BoundsReport {
    // echoed inputs
    double m = 0.0, L = 0.0, gamma = 0.0, Ts = 0.0, tau = 0.0;
    double C0 = 0.0, C1 = 0.0, C2 = 0.0, C3 = 0.0;
    int P = 0, C = 0;

    double zeta = 0.0;
    double kappa = 0.0;  // (1 - gamma m) / (m (1 - gamma L))

    // First-order (linear-drift) route.
    double a1 = 0.0;  // 2 L kappa
    double a0 = 0.0;  // 2 C0 Ts kappa (L kappa + 1)
    double A1 = 0.0;
    double A0 = 0.0;
    bool theorem1_satisfied = false;       // A1 < 1
    double asymptotic_bound_linear = 0.0;  // A0/(1-A1); +inf when not satisfied

    // Second-order route.
    double a2 = 0.0;         // kappa C1 / 2
    double a1_second = 0.0;  // Ts kappa (kappa C0 C1 + C2)
    double a0_second = 0.0;  // Ts^2 kappa (kappa^2 C1 C0^2 / 2 + kappa C0 C2 + C3 / 2)
    double A2 = 0.0;
    double A1_second = 0.0;
    double A0_second = 0.0;

    // Safe sampling interval; +inf when kappa (kappa C0 C1 + C2) = 0, i.e.
    // quadratic f with time-invariant Hessian has no second-order restriction.
    double Ts_bar = 0.0;

    // Admissible initial-error radius, in the two published forms. They are
    // not algebraically reconciled anywhere, so both are reported and a
    // relative mismatch beyond 1e-9 is flagged (comparison skipped when
    // either is non-finite).
    double R_bar_statement = 0.0;  // (2/C1)(kappa C0 C1 + C2)(Ts_bar - (m/zeta^C) Ts)
    double R_bar_recursion = 0.0;  // (tau - A1_second) / A2
    bool R_bar_mismatch = false;
};

// Full constant set for given moduli, step size, drift bounds C0..C3,
// horizons, contraction margin tau and sampling interval. Preconditions:
// 0 < m <= L, gamma in (0,1/L), C0..C3 >= 0, Ts > 0, tau in (0,1) and
// zeta^(P+C) < tau; the latter failing raises std::domain_error with message
// "horizons too short for Theorem 2".
BoundsReport theorem2_bounds(double m, double L, double gamma, double C0, double C1, double C2, double C3,
                             int P, int C, double tau, double Ts);

}  // namespace tvfbe
