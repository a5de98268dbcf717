#pragma once

#include <optional>
#include <stdexcept>

#include "tvfbe/kernels.hpp"

namespace tvfbe {

// Counts oracle work in matrix-vector-product units. The pinned prices are:
// a fused value+gradient evaluation costs 2 units, a Hessian-vector product
// costs 2, the time-derivative of the gradient costs 1, prox costs 0.
// Counting lives in the non-virtual wrappers below so concrete oracles cannot
// get it wrong; a null meter means "don't count".
struct MatvecMeter {
    long long units = 0;
};

// Smooth term with time frozen: what an inner solver sees. Implementations
// override the private do_* hooks; the public wrappers validate dimensions
// and charge the attached meter.
class SmoothFunction {
public:
    virtual ~SmoothFunction() = default;

    std::size_t dim() const { return do_dim(); }

    // Returns f(x) and writes the gradient. Costs 2 matvec units.
    double value_and_grad(const Vector& x, Vector& grad) const {
        check_dim(x);
        charge(2);
        grad.resize(dim());
        return do_value_and_grad(x, grad);
    }

    // out = H(x) v. Costs 2 matvec units.
    void hess_vec(const Vector& x, const Vector& v, Vector& out) const {
        check_dim(x);
        check_dim(v);
        charge(2);
        out.resize(dim());
        do_hess_vec(x, v, out);
    }

    void set_meter(MatvecMeter* m) const { meter_ = m; }
    MatvecMeter* meter() const { return meter_; }

protected:
    void charge(long long u) const {
        if (meter_) meter_->units += u;
    }
    void check_dim(const Vector& x) const {
        if (x.size() != dim()) throw std::invalid_argument("vector length does not match problem dimension");
    }

private:
    virtual std::size_t do_dim() const = 0;
    virtual double do_value_and_grad(const Vector& x, Vector& grad) const = 0;
    virtual void do_hess_vec(const Vector& x, const Vector& v, Vector& out) const = 0;

    mutable MatvecMeter* meter_ = nullptr;
};

class FrozenSmooth;

// Time-varying smooth term f(x; t). Immutable after construction; per-run
// mutable state is limited to the meter pointer, so one run owns one oracle.
class SmoothOracle {
public:
    virtual ~SmoothOracle() = default;

    std::size_t dim() const { return do_dim(); }

    double value_and_grad(const Vector& x, double t, Vector& grad) const {
        check_dim(x);
        charge(2);
        grad.resize(dim());
        return do_value_and_grad(x, t, grad);
    }

    void hess_vec(const Vector& x, double t, const Vector& v, Vector& out) const {
        check_dim(x);
        check_dim(v);
        charge(2);
        out.resize(dim());
        do_hess_vec(x, t, v, out);
    }

    // out = d/dt grad f(x; t). Costs 1 matvec unit.
    void grad_t_grad(const Vector& x, double t, Vector& out) const {
        check_dim(x);
        charge(1);
        out.resize(dim());
        do_grad_t_grad(x, t, out);
    }

    // View of this oracle with t pinned, for handing to inner solvers.
    FrozenSmooth at(double t) const;

    void set_meter(MatvecMeter* m) const { meter_ = m; }
    MatvecMeter* meter() const { return meter_; }

protected:
    void charge(long long u) const {
        if (meter_) meter_->units += u;
    }
    void check_dim(const Vector& x) const {
        if (x.size() != dim()) throw std::invalid_argument("vector length does not match problem dimension");
    }

private:
    virtual std::size_t do_dim() const = 0;
    virtual double do_value_and_grad(const Vector& x, double t, Vector& grad) const = 0;
    virtual void do_hess_vec(const Vector& x, double t, const Vector& v, Vector& out) const = 0;
    virtual void do_grad_t_grad(const Vector& x, double t, Vector& out) const = 0;

    mutable MatvecMeter* meter_ = nullptr;
};

// Adapter pinning t. Charges land on the underlying oracle's meter (phase
// accounting) and, if one is attached to the adapter itself, on that too
// (solver-local accounting); the two books are independent and consistent.
class FrozenSmooth final : public SmoothFunction {
public:
    FrozenSmooth(const SmoothOracle& oracle, double t) : oracle_(&oracle), t_(t) {}

    double t() const { return t_; }

private:
    std::size_t do_dim() const override { return oracle_->dim(); }
    double do_value_and_grad(const Vector& x, Vector& grad) const override {
        return oracle_->value_and_grad(x, t_, grad);
    }
    void do_hess_vec(const Vector& x, const Vector& v, Vector& out) const override {
        oracle_->hess_vec(x, t_, v, out);
    }

    const SmoothOracle* oracle_;
    double t_;
};

inline FrozenSmooth SmoothOracle::at(double t) const { return FrozenSmooth(*this, t); }

// Nonsmooth regularizer g with a closed-form prox. Either identically zero or
// a weighted l1 norm; value semantics.
class NonsmoothTerm {
public:
    enum class Kind { zero, l1 };

    static NonsmoothTerm zero() { return NonsmoothTerm(Kind::zero, 0.0); }
    static NonsmoothTerm l1(double weight) {
        if (!(weight >= 0.0)) throw std::invalid_argument("l1 weight must be nonnegative");
        return NonsmoothTerm(Kind::l1, weight);
    }

    Kind kind() const { return kind_; }
    double weight() const { return weight_; }

    double eval(const Vector& x) const {
        if (kind_ == Kind::zero) return 0.0;
        double s = 0.0;
        for (double v : x) s += v < 0.0 ? -v : v;
        return weight_ * s;
    }

    // out = prox_{step*g}(u); step must be positive. Costs 0 matvec units.
    void prox(const Vector& u, double step, Vector& out) const {
        if (!(step > 0.0)) throw std::invalid_argument("prox step must be positive");
        if (kind_ == Kind::zero) {
            out = u;
            return;
        }
        kernels::soft_threshold(u, step * weight_, out);
    }

    Vector prox(const Vector& u, double step) const {
        Vector out;
        prox(u, step, out);
        return out;
    }

private:
    NonsmoothTerm(Kind k, double w) : kind_(k), weight_(w) {}
    Kind kind_;
    double weight_;
};

// Bounds on how fast the problem drifts in time, used only by the analysis
// module: C0 >= ||d/dt grad f||, C1 >= ||d/dx hess f||, C2 >= ||d/dt hess f||,
// C3 >= ||d2/dt2 grad f||.
struct DriftBounds {
    double C0 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;
};

// The full time-varying composite problem: minimize f(x; t) + g(x) over x,
// for each t. The oracle is non-owning; the caller keeps it alive.
struct CompositeProblem {
    const SmoothOracle* smooth = nullptr;
    NonsmoothTerm g = NonsmoothTerm::zero();
    double m = 0.0;  // strong convexity modulus of f(.; t), uniform in t
    double L = 0.0;  // gradient Lipschitz modulus, uniform in t
    std::optional<DriftBounds> drift;
};

// Throws unless the problem is usable: oracle present, 0 < m <= L.
void validate_problem(const CompositeProblem& p);

Vector grad_f(const CompositeProblem& p, const Vector& x, double t);
Vector grad_t_grad_f(const CompositeProblem& p, const Vector& x, double t);
Vector prox_g(const NonsmoothTerm& g, const Vector& u, double step);

struct Moduli {
    double m = 0.0;
    double L = 0.0;
};

struct ModuliOptions {
    double tol = 1e-8;      // relative Rayleigh-quotient change at which to stop
    int max_iters = 10000;  // per eigenvalue; exceeding it is a hard error
};

// Extreme eigenvalues of a symmetric positive definite matrix: power
// iteration for the largest, inverse iteration through a Cholesky factor for
// the smallest. Deterministic start vector.
Moduli estimate_moduli(const Matrix& Q, const ModuliOptions& opts = {});

}  // namespace tvfbe
