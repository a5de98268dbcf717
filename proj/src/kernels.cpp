#include "tvfbe/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace tvfbe {

Matrix Matrix::identity(std::size_t n) {
    Matrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

namespace kernels {

namespace serial {

void matvec(const Matrix& A, const double* x, double* y) {
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* row = A.data.data() + i * A.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void matvec_t(const Matrix& A, const double* x, double* y) {
    // Column result accumulated per output element (j-major) so the parallel
    // variant can split over j without changing any accumulation order.
    for (std::size_t j = 0; j < A.cols; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < A.rows; ++i) acc += A.data[i * A.cols + j] * x[i];
        y[j] = acc;
    }
}

void soft_threshold(const double* u, std::size_t n, double tau, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = u[i];
        double mag = std::fabs(v) - tau;
        out[i] = mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
    }
}

}  // namespace serial

void matvec(const Matrix& A, const Vector& x, Vector& y) {
    y.resize(A.rows);
    if (A.rows * A.cols < parallel_cutoff) {
        serial::matvec(A, x.data(), y.data());
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(A.rows); ++i) {
        const double* row = A.data.data() + static_cast<std::size_t>(i) * A.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) acc += row[j] * x[j];
        y[static_cast<std::size_t>(i)] = acc;
    }
}

void matvec_t(const Matrix& A, const Vector& x, Vector& y) {
    y.resize(A.cols);
    if (A.rows * A.cols < parallel_cutoff) {
        serial::matvec_t(A, x.data(), y.data());
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(A.cols); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < A.rows; ++i)
            acc += A.data[i * A.cols + static_cast<std::size_t>(j)] * x[i];
        y[static_cast<std::size_t>(j)] = acc;
    }
}

void soft_threshold(const Vector& u, double tau, Vector& out) {
    out.resize(u.size());
    if (u.size() < parallel_cutoff) {
        serial::soft_threshold(u.data(), u.size(), tau, out.data());
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(u.size()); ++i) {
        double v = u[static_cast<std::size_t>(i)];
        double mag = std::fabs(v) - tau;
        out[static_cast<std::size_t>(i)] = mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
    }
}

double dot(const Vector& a, const Vector& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vector& x, Vector& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scal(double alpha, Vector& x) {
    for (double& v : x) v *= alpha;
}

}  // namespace kernels
}  // namespace tvfbe
