#include "tvfbe/problem.hpp"

#include <cmath>
#include <string>

#include "tvfbe/rng.hpp"

namespace tvfbe {

void validate_problem(const CompositeProblem& p) {
    if (p.smooth == nullptr) throw std::invalid_argument("problem has no smooth oracle");
    if (!(p.m > 0.0)) throw std::invalid_argument("strong convexity modulus m must be positive");
    if (!(p.L >= p.m)) throw std::invalid_argument("moduli must satisfy 0 < m <= L");
}

Vector grad_f(const CompositeProblem& p, const Vector& x, double t) {
    validate_problem(p);
    Vector g;
    p.smooth->value_and_grad(x, t, g);
    return g;
}

Vector grad_t_grad_f(const CompositeProblem& p, const Vector& x, double t) {
    validate_problem(p);
    Vector g;
    p.smooth->grad_t_grad(x, t, g);
    return g;
}

Vector prox_g(const NonsmoothTerm& g, const Vector& u, double step) { return g.prox(u, step); }

namespace {

// Lower-triangular Cholesky factor, or throws if a pivot fails: the matrix is
// then not (numerically) positive definite.
Matrix cholesky(const Matrix& Q) {
    std::size_t n = Q.rows;
    Matrix C(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = Q(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= C(j, k) * C(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::invalid_argument("matrix is not positive definite (Cholesky pivot " +
                                        std::to_string(j) + " is " + std::to_string(d) + ")");
        C(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = Q(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= C(i, k) * C(j, k);
            C(i, j) = s / C(j, j);
        }
    }
    return C;
}

// Solve C C^T x = b in place with the factor from above.
void cholesky_solve(const Matrix& C, Vector& b) {
    std::size_t n = C.rows;
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= C(i, k) * b[k];
        b[i] = s / C(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= C(k, ii) * b[k];
        b[ii] = s / C(ii, ii);
    }
}

void normalize(Vector& v) {
    double nrm = kernels::norm2(v);
    if (nrm == 0.0) throw std::runtime_error("eigenvalue iteration hit a zero vector");
    kernels::scal(1.0 / nrm, v);
}

[[noreturn]] void throw_no_convergence(const char* which, int iters, const Matrix& Q, const Vector& v,
                                       double rayleigh) {
    Vector qv;
    kernels::matvec(Q, v, qv);
    Vector r = qv;
    kernels::axpy(-rayleigh, v, r);
    throw std::runtime_error(std::string(which) + " eigenvalue iteration did not converge within " +
                             std::to_string(iters) + " iterations; last estimate " + std::to_string(rayleigh) +
                             ", residual ||Qv - rv|| = " + std::to_string(kernels::norm2(r)));
}

}  // namespace

Moduli estimate_moduli(const Matrix& Q, const ModuliOptions& opts) {
    if (Q.rows != Q.cols || Q.rows == 0) throw std::invalid_argument("estimate_moduli needs a square matrix");
    std::size_t n = Q.rows;

    double scale = 0.0;
    for (double v : Q.data) scale = std::max(scale, std::fabs(v));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(Q(i, j) - Q(j, i)) > 1e-12 * std::max(1.0, scale))
                throw std::invalid_argument("estimate_moduli needs a symmetric matrix");

    // Fixed-seed start vector: estimates are part of reproducible output.
    Rng rng(0x5eedull);
    Vector v(n);
    for (double& x : v) x = rng.normal();
    normalize(v);

    Vector qv(n);
    double rayleigh = 0.0;
    bool converged = false;
    for (int it = 0; it < opts.max_iters; ++it) {
        kernels::matvec(Q, v, qv);
        double next = kernels::dot(v, qv);
        if (it > 0 && std::fabs(next - rayleigh) <= opts.tol * std::max(1.0, std::fabs(next))) {
            rayleigh = next;
            converged = true;
            break;
        }
        rayleigh = next;
        v = qv;
        normalize(v);
    }
    if (!converged) throw_no_convergence("largest", opts.max_iters, Q, v, rayleigh);
    double lam_max = rayleigh;

    Matrix C = cholesky(Q);  // also certifies positive definiteness

    Rng rng2(0xfacadeull);
    Vector w(n);
    for (double& x : w) x = rng2.normal();
    normalize(w);

    rayleigh = 0.0;
    converged = false;
    for (int it = 0; it < opts.max_iters; ++it) {
        kernels::matvec(Q, w, qv);
        double next = kernels::dot(w, qv);
        if (it > 0 && std::fabs(next - rayleigh) <= opts.tol * std::max(1.0, std::fabs(next))) {
            rayleigh = next;
            converged = true;
            break;
        }
        rayleigh = next;
        cholesky_solve(C, w);
        normalize(w);
    }
    if (!converged) throw_no_convergence("smallest", opts.max_iters, Q, w, rayleigh);
    double lam_min = rayleigh;

    return Moduli{lam_min, lam_max};
}

}  // namespace tvfbe
