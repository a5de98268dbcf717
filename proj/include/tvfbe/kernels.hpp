#pragma once

#include <cstddef>
#include <vector>

namespace tvfbe {

using Vector = std::vector<double>;

// Dense row-major matrix. Small and dumb on purpose: every higher-level
// operation in the library is built from the kernels below so that the
// matrix-vector product count stays an honest unit of account.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major, rows*cols entries

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Matrix identity(std::size_t n);
};

namespace kernels {

// Serial reference implementations. Kept verbatim for testing the parallel
// variants against; not called from library code except below the size
// threshold where threading is pure overhead.
namespace serial {
void matvec(const Matrix& A, const double* x, double* y);        // y = A x
void matvec_t(const Matrix& A, const double* x, double* y);      // y = A^T x
void soft_threshold(const double* u, std::size_t n, double tau, double* out);
}  // namespace serial

// Default entry points. Row-parallel over independent output elements, so the
// per-element accumulation order is identical to the serial reference and the
// results are bit-for-bit equal under any thread count.
void matvec(const Matrix& A, const Vector& x, Vector& y);
void matvec_t(const Matrix& A, const Vector& x, Vector& y);
void soft_threshold(const Vector& u, double tau, Vector& out);

// Reductions stay serial unconditionally: a parallel reduction reorders the
// sum and would break the byte-identical rerun guarantee.
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);

void axpy(double alpha, const Vector& x, Vector& y);  // y += alpha*x
void scal(double alpha, Vector& x);

// Problems below this element count always run the serial path.
inline constexpr std::size_t parallel_cutoff = 1u << 14;

}  // namespace kernels

}  // namespace tvfbe
