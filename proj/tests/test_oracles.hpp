// Hand-built oracles with closed-form derivatives, shared across test
// binaries. Everything here is independent of the library's own derivative
// code paths so tests can cross-check against it.
#pragma once

#include <cmath>
#include <cstdint>

#include "tvfbe/problem.hpp"
#include "tvfbe/rng.hpp"

namespace tvfbe::testing {

// f(x; t) = 1/2 (x - v t)^2 in one dimension. The minimizer is exactly v t,
// grad = x - v t, hess = 1, d/dt grad = -v. m = L = 1.
class ScalarTrackingOracle final : public SmoothOracle {
public:
    explicit ScalarTrackingOracle(double velocity) : v_(velocity) {}
    double velocity() const { return v_; }

private:
    std::size_t do_dim() const override { return 1; }
    double do_value_and_grad(const Vector& x, double t, Vector& grad) const override {
        const double d = x[0] - v_ * t;
        grad[0] = d;
        return 0.5 * d * d;
    }
    void do_hess_vec(const Vector&, double, const Vector& v, Vector& out) const override { out[0] = v[0]; }
    void do_grad_t_grad(const Vector&, double, Vector& out) const override { out[0] = -v_; }

    double v_;
};

// f(x; t) = 1/2 x^T Q x - (b0 + t b1)^T x with a seeded symmetric positive
// definite Q = A^T A / n + mu I. grad = Qx - b0 - t b1, hess_vec = Qv,
// d/dt grad = -b1 (constant, so C0 = ||b1||, C1 = C2 = C3 = 0).
// b1_scale = 0 gives a time-invariant problem.
class RandomQuadraticOracle final : public SmoothOracle {
public:
    RandomQuadraticOracle(std::size_t n, std::uint64_t seed, double mu = 0.5, double b1_scale = 1.0)
        : Q_(n, n), b0_(n), b1_(n) {
        Rng rng(seed);
        Matrix A(n, n);
        for (double& v : A.data) v = rng.normal();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += A(k, i) * A(k, j);
                Q_(i, j) = s / static_cast<double>(n) + (i == j ? mu : 0.0);
            }
        for (double& v : b0_) v = rng.normal();
        for (double& v : b1_) v = b1_scale * rng.normal();
    }

    const Matrix& Q() const { return Q_; }
    const Vector& b0() const { return b0_; }
    const Vector& b1() const { return b1_; }

    double drift_C0() const { return kernels::norm2(b1_); }

private:
    std::size_t do_dim() const override { return Q_.rows; }
    double do_value_and_grad(const Vector& x, double t, Vector& grad) const override {
        Vector Qx(Q_.rows);
        kernels::matvec(Q_, x, Qx);
        double val = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            grad[i] = Qx[i] - b0_[i] - t * b1_[i];
            val += 0.5 * x[i] * Qx[i] - (b0_[i] + t * b1_[i]) * x[i];
        }
        return val;
    }
    void do_hess_vec(const Vector&, double, const Vector& v, Vector& out) const override {
        kernels::matvec(Q_, v, out);
    }
    void do_grad_t_grad(const Vector&, double, Vector& out) const override {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = -b1_[i];
    }

    Matrix Q_;
    Vector b0_, b1_;
};

// f(x; t) = 1/2 (x - cos(omega t))^2 in one dimension: a smooth nonlinear
// target. grad = x - cos(omega t), hess = 1, d/dt grad = omega sin(omega t).
class CosineTrackingOracle final : public SmoothOracle {
public:
    explicit CosineTrackingOracle(double omega) : w_(omega) {}

    double target(double t) const { return std::cos(w_ * t); }

private:
    std::size_t do_dim() const override { return 1; }
    double do_value_and_grad(const Vector& x, double t, Vector& grad) const override {
        const double d = x[0] - std::cos(w_ * t);
        grad[0] = d;
        return 0.5 * d * d;
    }
    void do_hess_vec(const Vector&, double, const Vector& v, Vector& out) const override { out[0] = v[0]; }
    void do_grad_t_grad(const Vector&, double t, Vector& out) const override {
        out[0] = w_ * std::sin(w_ * t);
    }

    double w_;
};

// Central finite-difference gradient of a frozen smooth term.
inline Vector fd_gradient(const SmoothFunction& phi, const Vector& x, double h = 1e-5) {
    Vector g(x.size()), scratch;
    Vector xp = x, xm = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        const double fp = phi.value_and_grad(xp, scratch);
        const double fm = phi.value_and_grad(xm, scratch);
        g[i] = (fp - fm) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace tvfbe::testing
