#pragma once

#include <string>

#include "tvfbe/envelope.hpp"

namespace tvfbe {

enum class SolverMethod {
    qn_ls,  // BFGS on the envelope with backtracking line search
    qn,     // BFGS with unit steps
    grad,   // fixed-step gradient descent on the envelope
};

struct SolverConfig {
    SolverMethod method = SolverMethod::qn_ls;
    int max_iters = 100;       // >= 0; 0 is a pass-through returning the start point
    double tolerance = 1e-12;  // stop once ||R_gamma|| drops to this
    double ls_shrink = 0.5;    // backtracking factor, in (0,1)
    double ls_sigma = 1e-4;    // sufficient-decrease coefficient, > 0
    int max_growth = 5;        // gradient method: consecutive envelope increases tolerated
};

struct SolveStats {
    int iterations = 0;
    double initial_residual = 0.0;  // ||R|| at the start point
    double final_residual = 0.0;    // ||R|| at the returned point
    std::vector<double> fbe_values; // envelope value at the start and each accepted iterate
    long long matvecs = 0;          // oracle work in matvec units
    int backtracks = 0;             // rejected trial steps (both methods)
    int hessian_resets = 0;         // BFGS matrix resets on non-descent directions
    double step_scale = 1.0;        // gradient method: final eta
    bool converged = false;         // hit tolerance before the iteration budget
};

struct SolveResult {
    Vector x;
    SolveStats stats;
};

// Raised when a solver cannot continue (divergence, oracle iteration cap).
// Carries the best point seen and the stats up to the failure.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, Vector best_point, double best_residual, SolveStats stats)
        : std::runtime_error(what),
          best_point_(std::move(best_point)),
          best_residual_(best_residual),
          stats_(std::move(stats)) {}

    const Vector& best_point() const { return best_point_; }
    double best_residual() const { return best_residual_; }
    const SolveStats& stats() const { return stats_; }

private:
    Vector best_point_;
    double best_residual_;
    SolveStats stats_;
};

// One time-frozen composite instance as the inner solvers see it. m and L are
// the moduli of phi; the gradient method needs them for its step
// normalization, the others only for parameter validation.
struct FixedTimeProblem {
    const SmoothFunction& phi;
    const NonsmoothTerm& g;
    double m = 0.0;
    double L = 0.0;
};

// Dispatch on cfg.method.
SolveResult solve_fbe(const FixedTimeProblem& prob, const Vector& x0, const EnvelopeParams& params,
                      const SolverConfig& cfg);

// BFGS on the envelope. Directions come from an inverse-Hessian estimate
// seeded at gamma*I; a non-descent direction resets the estimate (counted in
// stats). With line search, steps start at 1 and backtrack until
//   M(w) <= M(x) - sigma * tau * ||d||^2;
// without, steps are always 1. Every iteration ends with a forward-backward
// step from the accepted trial point, which both guarantees progress
// (M(T(w)) <= M(w)) and supplies the next iterate for the BFGS pair.
SolveResult quasi_newton_fbe(const FixedTimeProblem& prob, const Vector& x0, const EnvelopeParams& params,
                             const SolverConfig& cfg);

// Fixed-step gradient descent on the envelope:
//   x+ = x - eta * s0 * grad M(x),  s0 = 2 / (lam_max + lam_min),
// where lam_max = (1 - gamma m)/gamma and lam_min = m (1 - gamma L) bound the
// envelope's curvature, so eta = 1 is stable by construction. A step that
// increases the envelope is rejected and retried with eta halved;
// cfg.max_growth consecutive increases raise a SolverError.
SolveResult gradient_descent_fbe(const FixedTimeProblem& prob, const Vector& x0, const EnvelopeParams& params,
                                 const SolverConfig& cfg);

// Ground-truth oracle: accelerated proximal gradient (fixed step gamma, with
// adaptive restart) run until ||R_gamma|| <= tol. Exceeding iter_cap raises a
// SolverError carrying the best point seen and its residual.
SolveResult fista_solve(const FixedTimeProblem& prob, const Vector& x0, const EnvelopeParams& params,
                        double tol, int iter_cap);

}  // namespace tvfbe
