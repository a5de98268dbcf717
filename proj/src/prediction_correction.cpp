#include "tvfbe/prediction_correction.hpp"

#include <cmath>

namespace tvfbe {

QuadraticModel build_prediction_model(const CompositeProblem& problem, const Vector& x_base, double t_base,
                                      double Ts) {
    validate_problem(problem);
    if (!(Ts > 0.0)) throw std::invalid_argument("sampling interval must be positive");
    const SmoothOracle& f = *problem.smooth;

    Vector g_now, hx, tg;
    f.value_and_grad(x_base, t_base, g_now);
    f.hess_vec(x_base, t_base, x_base, hx);
    f.grad_t_grad(x_base, t_base, tg);

    Vector linear(f.dim());
    for (std::size_t i = 0; i < linear.size(); ++i) linear[i] = g_now[i] - hx[i] + Ts * tg[i];
    return QuadraticModel(f, x_base, t_base, std::move(linear));
}

SolveResult predict(const QuadraticModel& model, const CompositeProblem& problem, const Vector& x_start,
                    const EnvelopeParams& params, int P, SolverConfig cfg) {
    if (P < 0) throw std::invalid_argument("prediction horizon P must be nonnegative");
    if (P == 0) return SolveResult{x_start, SolveStats{}};
    cfg.max_iters = P;
    return solve_fbe(FixedTimeProblem{model, problem.g, problem.m, problem.L}, x_start, params, cfg);
}

SolveResult correct(const CompositeProblem& problem, const Vector& x_start, double t,
                    const EnvelopeParams& params, int C, SolverConfig cfg) {
    if (C < 1) throw std::invalid_argument("correction horizon C must be at least 1");
    cfg.max_iters = C;
    FrozenSmooth phi = problem.smooth->at(t);
    return solve_fbe(FixedTimeProblem{phi, problem.g, problem.m, problem.L}, x_start, params, cfg);
}

namespace {

void fill_error(TrajectoryRecord& rec, int normalizer) {
    if (rec.truth.empty()) return;
    Vector d = rec.x;
    kernels::axpy(-1.0, rec.truth, d);
    rec.err_norm = kernels::norm2(d);
    rec.err_normalized = rec.err_norm / static_cast<double>(normalizer);
}

}  // namespace

RunResult run(const CompositeProblem& problem, const PCConfig& cfg, const Vector& x0) {
    validate_problem(problem);
    if (!(cfg.Ts > 0.0)) throw std::invalid_argument("sampling interval must be positive");
    if (cfg.P < 0) throw std::invalid_argument("prediction horizon P must be nonnegative");
    if (cfg.C < 1) throw std::invalid_argument("correction horizon C must be at least 1");
    if (cfg.steps < 0) throw std::invalid_argument("step count must be nonnegative");
    if (cfg.error_normalizer < 1) throw std::invalid_argument("error normalizer must be positive");
    if (x0.size() != problem.smooth->dim())
        throw std::invalid_argument("vector length does not match problem dimension");

    RunResult out;
    EnvelopeParams pred_params = EnvelopeParams::checked(cfg.gamma_factor_pred / problem.L, problem.L);
    EnvelopeParams corr_params = EnvelopeParams::checked(cfg.gamma_factor_corr / problem.L, problem.L);
    out.gamma_pred = pred_params.gamma;
    out.gamma_corr = corr_params.gamma;

    const SmoothOracle& oracle = *problem.smooth;
    MatvecMeter* const saved = oracle.meter();
    MatvecMeter pred_meter, corr_meter, truth_meter;

    Vector x = x0;
    Vector truth_prev = x0;

    auto oracle_solve = [&](double t, const Vector& warm) {
        oracle.set_meter(&truth_meter);
        SolveResult r = fista_solve(FixedTimeProblem{oracle.at(t), problem.g, problem.m, problem.L}, warm,
                                    corr_params, cfg.oracle_tol, cfg.oracle_cap);
        oracle.set_meter(saved);
        return r;
    };

    try {
        TrajectoryRecord rec0;
        rec0.k = 0;
        rec0.t = 0.0;
        rec0.x = x;
        if (cfg.with_oracle) {
            truth_prev = oracle_solve(0.0, x0).x;
            rec0.truth = truth_prev;
            rec0.matvec_oracle = truth_meter.units;
        }
        fill_error(rec0, cfg.error_normalizer);
        out.records.push_back(std::move(rec0));

        for (int k = 0; k < cfg.steps; ++k) {
            const double t_now = k * cfg.Ts;
            const double t_next = (k + 1) * cfg.Ts;
            TrajectoryRecord rec;
            rec.k = k + 1;
            rec.t = t_next;

            long long pred_before = pred_meter.units;
            Vector x_pred = x;
            if (cfg.P > 0) {
                oracle.set_meter(&pred_meter);
                QuadraticModel model = build_prediction_model(problem, x, t_now, cfg.Ts);
                SolveResult p = predict(model, problem, x, pred_params, cfg.P, cfg.pred_solver);
                oracle.set_meter(saved);
                x_pred = std::move(p.x);
            }
            rec.matvec_pred = pred_meter.units - pred_before;

            long long corr_before = corr_meter.units;
            oracle.set_meter(&corr_meter);
            SolveResult c = correct(problem, x_pred, t_next, corr_params, cfg.C, cfg.corr_solver);
            oracle.set_meter(saved);
            rec.resid_pred = c.stats.initial_residual;
            rec.resid_corr = c.stats.final_residual;
            rec.matvec_corr = corr_meter.units - corr_before;

            x = std::move(c.x);
            rec.x = x;
            rec.predicted = std::move(x_pred);

            if (cfg.with_oracle) {
                long long truth_before = truth_meter.units;
                truth_prev = oracle_solve(t_next, truth_prev).x;
                rec.truth = truth_prev;
                rec.matvec_oracle = truth_meter.units - truth_before;
            }
            fill_error(rec, cfg.error_normalizer);
            out.records.push_back(std::move(rec));
        }
    } catch (const SolverError& err) {
        oracle.set_meter(saved);
        out.aborted = true;
        out.abort_reason = err.what();
    }
    oracle.set_meter(saved);
    return out;
}

}  // namespace tvfbe
