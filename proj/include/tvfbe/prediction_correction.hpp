#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "tvfbe/solvers.hpp"

namespace tvfbe {

// Local model of the smooth term built at (x_base, t_base) and aimed T_s
// ahead: quadratic in x, first order in t, chosen so that
//   grad h(x) = grad f(x_base) + H (x - x_base) + T_s * d/dt grad f(x_base)
// with H the Hessian at the base point. H is applied through the oracle
// rather than materialized: forming it densely would cost 2n matvec units per
// time step and swamp the very counts the experiment measures. Since the
// model inherits the base Hessian it also inherits the moduli (m, L).
class QuadraticModel final : public SmoothFunction {
public:
    QuadraticModel(const SmoothOracle& oracle, Vector base_point, double t_base, Vector linear)
        : oracle_(&oracle), base_(std::move(base_point)), t_(t_base), linear_(std::move(linear)) {
        if (linear_.size() != oracle_->dim() || base_.size() != oracle_->dim())
            throw std::invalid_argument("model vectors must match the oracle dimension");
    }

    const Vector& base_point() const { return base_; }
    const Vector& linear_term() const { return linear_; }
    double t_base() const { return t_; }

private:
    std::size_t do_dim() const override { return oracle_->dim(); }

    // h(x) = x^T H x / 2 + linear^T x; one Hessian application serves both the
    // value and the gradient, so the call costs the nominal 2 units.
    double do_value_and_grad(const Vector& x, Vector& grad) const override {
        Vector hx;
        oracle_->hess_vec(base_, t_, x, hx);
        double quad = 0.0, lin = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            quad += x[i] * hx[i];
            lin += linear_[i] * x[i];
            grad[i] = hx[i] + linear_[i];
        }
        return 0.5 * quad + lin;
    }

    void do_hess_vec(const Vector&, const Vector& v, Vector& out) const override {
        oracle_->hess_vec(base_, t_, v, out);
    }

    const SmoothOracle* oracle_;
    Vector base_;
    double t_;
    Vector linear_;
};

// Assemble the model above from oracle calls at (x_base, t_base):
// gradient (2 units) + one Hessian application (2) + the time derivative of
// the gradient (1), so a model build costs 5 units on the oracle's meter.
QuadraticModel build_prediction_model(const CompositeProblem& problem, const Vector& x_base, double t_base,
                                      double Ts);

// P iterations of the configured inner solver on the model's envelope,
// started at x_start. P = 0 disables prediction and returns x_start with
// empty stats at zero cost.
SolveResult predict(const QuadraticModel& model, const CompositeProblem& problem, const Vector& x_start,
                    const EnvelopeParams& params, int P, SolverConfig cfg);

// C >= 1 iterations on the true envelope at time t, started at the prediction.
SolveResult correct(const CompositeProblem& problem, const Vector& x_start, double t,
                    const EnvelopeParams& params, int C, SolverConfig cfg);

struct PCConfig {
    double Ts = 0.1;  // sampling interval, > 0
    int P = 10;       // prediction iterations per step, >= 0
    int C = 5;        // correction iterations per step, >= 1
    int steps = 1200; // number of sampling intervals to run

    // gamma = factor / L, factor in (0,1); separate knobs for the two phases.
    double gamma_factor_pred = 0.8;
    double gamma_factor_corr = 0.8;

    SolverConfig pred_solver{.method = SolverMethod::qn, .tolerance = 1e-12};
    SolverConfig corr_solver{.method = SolverMethod::qn_ls, .tolerance = 1e-12};

    // Ground-truth minimizer tracked alongside for error reporting.
    bool with_oracle = true;
    double oracle_tol = 1e-10;
    int oracle_cap = 200000;

    // Normalizer s in the reported error E_r = ||x_k - x*_k|| / s (the active
    // component count in the tracking experiment; 1 for plain problems).
    int error_normalizer = 1;
};

// One row per accepted sample instant. Row 0 is the initial state; row k
// describes how x_k came to be: the prediction that seeded its correction,
// both phases' final residual norms, and the per-phase oracle cost.
struct TrajectoryRecord {
    int k = 0;
    double t = 0.0;
    Vector x;          // corrected iterate x_k
    Vector predicted;  // prediction used as the correction start (empty for k = 0)
    Vector truth;      // oracle minimizer x*_k (empty when the oracle is off)
    double err_norm = std::numeric_limits<double>::quiet_NaN();
    double err_normalized = std::numeric_limits<double>::quiet_NaN();
    // Both residuals are measured on the newly observed cost at t_k, so they
    // are directly comparable: how good the prediction was, and how good the
    // iterate is after correction.
    double resid_pred = 0.0;  // ||R|| of the predicted point (P = 0: of the carried-over iterate)
    double resid_corr = 0.0;  // ||R|| after the correction solve
    long long matvec_pred = 0;
    long long matvec_corr = 0;
    long long matvec_oracle = 0;
};

struct RunResult {
    std::vector<TrajectoryRecord> records;
    double gamma_pred = 0.0;
    double gamma_corr = 0.0;
    bool aborted = false;       // a solver raised; records up to that step are kept
    std::string abort_reason;
};

// The full prediction-correction loop over t_k = k * Ts, k = 0..steps,
// starting from x0 at t = 0. Any solver error aborts the run and is reported
// in the result rather than thrown, so partial trajectories survive.
RunResult run(const CompositeProblem& problem, const PCConfig& cfg, const Vector& x0);

}  // namespace tvfbe
