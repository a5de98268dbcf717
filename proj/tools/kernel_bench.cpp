// Compares the parallel kernels against the serial reference implementation:
// verifies bitwise-identical results, then times both over repeated calls.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "tvfbe/kernels.hpp"
#include "tvfbe/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tvfbe;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix A(rows, cols);
    for (double& v : A.data) v = rng.normal();
    return A;
}

Vector random_vector(std::size_t n, Rng& rng) {
    Vector v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) return false;
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct BenchRow {
    const char* kernel;
    std::size_t rows, cols;
    double serial_s, parallel_s;
    bool identical;
};

void print_row(const BenchRow& r) {
    std::printf("%-16s %7zu x %-7zu %12.6f %12.6f %9.2fx   %s\n", r.kernel, r.rows, r.cols, r.serial_s,
                r.parallel_s, r.serial_s / r.parallel_s, r.identical ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int reps = 20;
    if (argc > 1) reps = std::max(1, std::atoi(argv[1]));

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d, reps = %d\n\n", omp_get_max_threads(), reps);
#else
    std::printf("OpenMP not enabled in this build; both columns run serial code. reps = %d\n\n", reps);
#endif
    std::printf("%-16s %7s   %-7s %12s %12s %10s\n", "kernel", "rows", "cols", "serial [s]", "parallel [s]",
                "speedup");

    bool all_identical = true;
    const std::size_t shapes[][2] = {{400, 800}, {1200, 2400}, {3000, 6000}};
    for (const auto& shape : shapes) {
        const std::size_t rows = shape[0], cols = shape[1];
        Rng rng(0xbe7c4);
        Matrix A = random_matrix(rows, cols, rng);
        Vector x = random_vector(cols, rng);
        Vector r = random_vector(rows, rng);

        Vector y_ser(rows), y_par(rows);
        kernels::serial::matvec(A, x.data(), y_ser.data());
        kernels::matvec(A, x, y_par);
        bool ok_mv = bitwise_equal(y_ser, y_par);

        auto t0 = Clock::now();
        for (int i = 0; i < reps; ++i)
            kernels::serial::matvec(A, x.data(), y_ser.data());
        double mv_ser = seconds_since(t0);
        t0 = Clock::now();
        for (int i = 0; i < reps; ++i) kernels::matvec(A, x, y_par);
        double mv_par = seconds_since(t0);
        print_row({"matvec", rows, cols, mv_ser, mv_par, ok_mv});

        Vector g_ser(cols), g_par(cols);
        kernels::serial::matvec_t(A, r.data(), g_ser.data());
        kernels::matvec_t(A, r, g_par);
        bool ok_mvt = bitwise_equal(g_ser, g_par);

        t0 = Clock::now();
        for (int i = 0; i < reps; ++i)
            kernels::serial::matvec_t(A, r.data(), g_ser.data());
        double mvt_ser = seconds_since(t0);
        t0 = Clock::now();
        for (int i = 0; i < reps; ++i) kernels::matvec_t(A, r, g_par);
        double mvt_par = seconds_since(t0);
        print_row({"matvec_t", rows, cols, mvt_ser, mvt_par, ok_mvt});

        const std::size_t n = rows * cols;
        Vector u = random_vector(n, rng), s_ser(n), s_par(n);
        kernels::serial::soft_threshold(u.data(), n, 0.3, s_ser.data());
        kernels::soft_threshold(u, 0.3, s_par);
        bool ok_st = bitwise_equal(s_ser, s_par);

        t0 = Clock::now();
        for (int i = 0; i < reps; ++i) kernels::serial::soft_threshold(u.data(), n, 0.3, s_ser.data());
        double st_ser = seconds_since(t0);
        t0 = Clock::now();
        for (int i = 0; i < reps; ++i) kernels::soft_threshold(u, 0.3, s_par);
        double st_par = seconds_since(t0);
        print_row({"soft_threshold", n, 1, st_ser, st_par, ok_st});

        all_identical = all_identical && ok_mv && ok_mvt && ok_st;
    }

    if (!all_identical) {
        std::printf("\nFAILURE: parallel kernels diverged from the serial reference.\n");
        return 1;
    }
    std::printf("\nAll parallel kernels bitwise-equal to the serial reference.\n");
    return 0;
}
