#pragma once

#include <functional>
#include <memory>

#include "tvfbe/prediction_correction.hpp"
#include "tvfbe/rng.hpp"

namespace tvfbe {

// Sparse sinusoidal reference signal: a fixed set of `active` components
// carrying c_i sin(omega t + phi_i), everything else identically zero.
struct SignalSpec {
    int active = 6;
    double omega = 0.05;   // rad/s
    double amp_min = 0.5;  // c_i uniform on [amp_min, amp_max]
    double amp_max = 1.5;
};

struct ExperimentConfig {
    std::size_t rows = 25;  // measurements; must stay below cols (underdetermined)
    std::size_t cols = 50;
    double alpha = 0.8;       // l1 weight; the (1-alpha)/2 ||x||^2 ridge lives in f
    double noise_var = 1e-3;  // variance of the measurement noise components
    SignalSpec signal;
    PCConfig pc;
    std::uint64_t seed = 1;
};

// Deterministic signal + measurement source. The measurement noise vector is
// drawn once per instance and held fixed over the run: a per-sample redraw
// would make b(t) nowhere differentiable, which both breaks the smooth-drift
// assumption behind the prediction step and floors the tracking error at a
// P- and Ts-independent level. A frozen realization keeps the problem noisy
// but drifting smoothly, which is the regime the scheme is built for.
class SignalGenerator {
public:
    SignalGenerator(std::size_t n, const SignalSpec& spec, double noise_var, std::size_t noise_dim,
                    std::uint64_t seed);

    Vector signal_at(double t) const;  // y(t)
    // b(t) = A y(t) + e for the A this generator was bound to via bind_matrix.
    Vector measure_at(double t) const;
    // Takes a copy: the generator must stay valid when the caller moves on.
    void bind_matrix(Matrix A);

    const std::vector<std::size_t>& active_set() const { return active_; }
    const Vector& amplitudes() const { return amp_; }
    const Vector& phases() const { return phase_; }
    const Vector& noise() const { return noise_; }

private:
    std::size_t n_;
    SignalSpec spec_;
    std::vector<std::size_t> active_;
    Vector amp_, phase_;
    Vector noise_;
    Matrix A_;
    bool bound_ = false;
};

// Elastic-net smooth part f(x; t) = ||A x - b(t)||^2 / 2 + (1-alpha) ||x||^2 / 2.
// The time derivative of the gradient is -A^T (b(t) - b(t - Ts)) / Ts, the
// backward difference over one sampling interval: sampled measurements are
// all a real system would have. Before one full interval has elapsed the
// difference does not exist and zero is returned (first_step_hit() records
// that this happened).
class ElasticNetOracle final : public SmoothOracle {
public:
    using MeasureFn = std::function<Vector(double)>;

    // Sampled-measurement mode.
    ElasticNetOracle(const Matrix& A, double alpha, MeasureFn measure, double Ts);
    // Fixed-measurement mode: time-invariant, zero time derivative.
    ElasticNetOracle(const Matrix& A, double alpha, Vector b_fixed);

    bool first_step_hit() const { return first_step_hit_; }

private:
    std::size_t do_dim() const override { return A_.cols; }
    double do_value_and_grad(const Vector& x, double t, Vector& grad) const override;
    void do_hess_vec(const Vector& x, double t, const Vector& v, Vector& out) const override;
    void do_grad_t_grad(const Vector& x, double t, Vector& out) const override;

    const Vector& measurement(double t) const;

    Matrix A_;
    double alpha_;
    MeasureFn measure_;
    double Ts_ = 0.0;
    Vector b_fixed_;
    bool sampled_;
    mutable bool first_step_hit_ = false;
    // Tiny memo so repeated oracle calls at the same instant do not recompute
    // b(t); the sample times repeat exactly, so exact keying works.
    mutable std::vector<std::pair<double, Vector>> cache_;
};

// A fully assembled benchmark instance. Owns the oracle the problem points to.
struct Instance {
    Matrix A;
    std::unique_ptr<SignalGenerator> generator;
    std::unique_ptr<ElasticNetOracle> oracle;
    CompositeProblem problem;
    Moduli moduli;  // estimated from A^T A + (1-alpha) I
};

// Measurement matrix with i.i.d. standard normal entries scaled by
// 1/sqrt(rows), plus the signal/noise source for the same seed.
Instance generate_instance(const ExperimentConfig& cfg);

// Time-invariant composite problem around one fixed measurement vector:
// used for single-instance solves and tests. The returned problem points at
// `oracle_out`, which the caller must keep alive.
CompositeProblem problem_at(const Matrix& A, const Vector& b, double alpha,
                            std::unique_ptr<ElasticNetOracle>& oracle_out);

// E_r = ||x - x_star|| / s.
double tracking_error(const Vector& x, const Vector& x_star, int s);

struct SummaryStats {
    int steps = 0;           // highest k present
    int steady_from = 0;     // first k inside the steady-state window (last 50%)
    double ss_mean_Er = 0.0;
    double ss_max_Er = 0.0;
    long long matvec_pred_total = 0;
    long long matvec_corr_total = 0;
    long long matvec_oracle_total = 0;
    // mean matvecs per step over the whole run, prediction + correction
    double matvec_per_step = 0.0;
};

SummaryStats summarize(const std::vector<TrajectoryRecord>& records);

struct ExperimentReport {
    RunResult run;
    SummaryStats summary;
    Moduli moduli;
    double gamma = 0.0;
    std::vector<std::size_t> active_set;
    std::uint64_t seed = 0;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace tvfbe
