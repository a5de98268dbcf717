#include "tvfbe/analysis.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tvfbe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_moduli(double m, double L, double gamma) {
    if (!(m > 0.0) || !(L >= m)) throw std::invalid_argument("moduli must satisfy 0 < m <= L");
    if (!(gamma > 0.0) || !(gamma < 1.0 / L)) throw std::invalid_argument("gamma must lie in (0, 1/L)");
}

// Integer power by repeated squaring; shared by every routine here so that
// zeta^P, zeta^C are bit-identical wherever they appear.
double pow_int(double base, int e) {
    double r = 1.0, b = base;
    for (int k = e; k > 0; k >>= 1) {
        if (k & 1) r *= b;
        b *= b;
    }
    return r;
}

double kappa_of(double m, double L, double gamma) { return (1.0 - gamma * m) / (m * (1.0 - gamma * L)); }

}  // namespace

double contraction_factor(double m, double L, double gamma) {
    check_moduli(m, L, gamma);
    double decay = 0.25 * m * std::min(gamma, 1.0 / (4.0 * L));
    // decay <= 1/16 for any valid input, so the 1/2 floor is a pure safeguard.
    return std::sqrt(std::max(0.5, 1.0 - decay));
}

TrackingCheck theorem1_check(double zeta, int P, int C, double m, double L, double gamma) {
    check_moduli(m, L, gamma);
    if (!(zeta > 0.0) || !(zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0,1)");
    if (P < 0 || C < 1) throw std::invalid_argument("horizons must satisfy P >= 0, C >= 1");
    double zP = pow_int(zeta, P);
    double zC = pow_int(zeta, C);
    double a1 = 2.0 * L * (1.0 - gamma * m) / (m * (1.0 - gamma * L));
    TrackingCheck out;
    out.zeta = zeta;
    out.A1 = zC * (zP + a1 * (zP + 1.0));
    out.satisfied = out.A1 < 1.0;
    return out;
}

double linear_asymptote(double m, double L, double gamma, double C0, double Ts, int P, int C) {
    if (!(C0 >= 0.0)) throw std::invalid_argument("drift bound C0 must be nonnegative");
    if (!(Ts > 0.0)) throw std::invalid_argument("sampling interval must be positive");
    double zeta = contraction_factor(m, L, gamma);
    TrackingCheck chk = theorem1_check(zeta, P, C, m, L, gamma);
    if (!chk.satisfied)
        throw std::domain_error("tracking bound is vacuous: A1 = " + std::to_string(chk.A1) + " >= 1");
    double kappa = kappa_of(m, L, gamma);
    double zP = pow_int(zeta, P);
    double zC = pow_int(zeta, C);
    double a0 = 2.0 * C0 * Ts * kappa * (L * kappa + 1.0);
    double A0 = zC * (zP * kappa * Ts * C0 + (zP + 1.0) * a0);
    return A0 / (1.0 - chk.A1);
}

BoundsReport theorem2_bounds(double m, double L, double gamma, double C0, double C1, double C2, double C3,
                             int P, int C, double tau, double Ts) {
    check_moduli(m, L, gamma);
    if (!(C0 >= 0.0) || !(C1 >= 0.0) || !(C2 >= 0.0) || !(C3 >= 0.0))
        throw std::invalid_argument("drift bounds C0..C3 must be nonnegative");
    if (P < 0 || C < 1) throw std::invalid_argument("horizons must satisfy P >= 0, C >= 1");
    if (!(tau > 0.0) || !(tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
    if (!(Ts > 0.0)) throw std::invalid_argument("sampling interval must be positive");

    BoundsReport r;
    r.m = m;
    r.L = L;
    r.gamma = gamma;
    r.Ts = Ts;
    r.tau = tau;
    r.C0 = C0;
    r.C1 = C1;
    r.C2 = C2;
    r.C3 = C3;
    r.P = P;
    r.C = C;

    r.zeta = contraction_factor(m, L, gamma);
    r.kappa = kappa_of(m, L, gamma);
    double zP = pow_int(r.zeta, P);
    double zC = pow_int(r.zeta, C);
    double zPC = pow_int(r.zeta, P + C);

    // First-order route. C0 and Ts enter every term as plain product factors,
    // which is what makes the doubling/halving scalings below exact in
    // floating point, so keep them that way.
    r.a1 = 2.0 * L * (1.0 - gamma * m) / (m * (1.0 - gamma * L));
    r.a0 = 2.0 * C0 * Ts * r.kappa * (L * r.kappa + 1.0);
    r.A1 = zC * (zP + r.a1 * (zP + 1.0));
    r.A0 = zC * (zP * r.kappa * Ts * C0 + (zP + 1.0) * r.a0);
    r.theorem1_satisfied = r.A1 < 1.0;
    r.asymptotic_bound_linear = r.theorem1_satisfied ? r.A0 / (1.0 - r.A1) : kInf;

    // Second-order route.
    r.a2 = 0.5 * r.kappa * C1;
    r.a1_second = Ts * r.kappa * (r.kappa * C0 * C1 + C2);
    r.a0_second =
        Ts * Ts * r.kappa * (0.5 * r.kappa * r.kappa * C1 * C0 * C0 + r.kappa * C0 * C2 + 0.5 * C3);
    r.A2 = zC * (zP + 1.0) * r.a2;
    r.A1_second = zC * (zP + r.a1_second * (zP + 1.0));
    r.A0_second = zC * (zP * r.kappa * C0 * Ts + (zP + 1.0) * r.a0_second);

    if (!(zPC < tau))
        throw std::domain_error("horizons too short for Theorem 2: zeta^(P+C) = " + std::to_string(zPC) +
                                " >= tau = " + std::to_string(tau));

    double quad_coeff = r.kappa * (r.kappa * C0 * C1 + C2);
    r.Ts_bar = quad_coeff > 0.0 ? (tau - zPC) / (zC * (zP + 1.0)) / quad_coeff : kInf;

    // Admissible initial radius in both published forms. With C1 = 0 there is
    // no quadratic error term, hence no radius restriction: the verbatim
    // formula would give inf*0 = NaN, so the +inf sentinel is reported.
    r.R_bar_statement = C1 > 0.0
                            ? 2.0 / C1 * (r.kappa * C0 * C1 + C2) * (r.Ts_bar - m / zC * Ts)
                            : kInf;
    r.R_bar_recursion = r.A2 > 0.0 ? (tau - r.A1_second) / r.A2 : kInf;
    if (std::isfinite(r.R_bar_statement) && std::isfinite(r.R_bar_recursion)) {
        double scale = std::max({1.0, std::fabs(r.R_bar_statement), std::fabs(r.R_bar_recursion)});
        r.R_bar_mismatch = std::fabs(r.R_bar_statement - r.R_bar_recursion) > 1e-9 * scale;
    }
    return r;
}

}  // namespace tvfbe
