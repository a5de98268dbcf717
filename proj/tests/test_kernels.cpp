#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "tvfbe/kernels.hpp"
#include "tvfbe/rng.hpp"

using namespace tvfbe;

namespace {

bool bitwise_equal(const Vector& a, const Vector& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Vector random_vector(std::size_t n, Rng& rng) {
    Vector v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

}  // namespace

TEST_CASE("matvec: hand example") {
    // A = [1 2; 3 4], x = (1, 1): rows give 1+2=3 and 3+4=7.
    Matrix A(2, 2);
    A(0, 0) = 1;
    A(0, 1) = 2;
    A(1, 0) = 3;
    A(1, 1) = 4;
    Vector y;
    kernels::matvec(A, {1.0, 1.0}, y);
    CHECK(y == Vector{3.0, 7.0});
}

TEST_CASE("matvec_t: hand example") {
    // Same A, r = (1, 1): columns give 1+3=4 and 2+4=6.
    Matrix A(2, 2);
    A(0, 0) = 1;
    A(0, 1) = 2;
    A(1, 0) = 3;
    A(1, 1) = 4;
    Vector y;
    kernels::matvec_t(A, {1.0, 1.0}, y);
    CHECK(y == Vector{4.0, 6.0});
}

TEST_CASE("soft_threshold: hand values") {
    // Shrink toward zero by tau = 0.5, clip to 0 inside [-0.5, 0.5].
    Vector out;
    kernels::soft_threshold({3.0, -0.2, 0.5, -2.0, 0.0}, 0.5, out);
    CHECK(out == Vector{2.5, 0.0, 0.0, -1.5, 0.0});
}

TEST_CASE("soft_threshold: tau = 0 is the identity") {
    Rng rng(7);
    Vector u = random_vector(100, rng), out;
    kernels::soft_threshold(u, 0.0, out);
    CHECK(bitwise_equal(u, out));
}

TEST_CASE("dot / norm2 / axpy / scal: hand values") {
    Vector a{1.0, 2.0, 3.0}, b{4.0, -5.0, 6.0};
    CHECK(kernels::dot(a, b) == 4.0 - 10.0 + 18.0);
    CHECK(kernels::norm2({3.0, 4.0}) == 5.0);
    Vector y{1.0, 1.0, 1.0};
    kernels::axpy(2.0, a, y);  // y = (3, 5, 7)
    CHECK(y == Vector{3.0, 5.0, 7.0});
    kernels::scal(-1.0, y);
    CHECK(y == Vector{-3.0, -5.0, -7.0});
}

TEST_CASE("Matrix::identity") {
    Matrix I = Matrix::identity(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(I(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("parallel kernels are bitwise-equal to the serial reference") {
    // Sizes straddle the parallel cutoff so both code paths are exercised.
    Rng rng(0x5e71a1);
    for (std::size_t rows : {std::size_t{3}, kernels::parallel_cutoff + 123, std::size_t{20000}}) {
        const std::size_t cols = 7;
        Matrix A(rows, cols);
        for (double& v : A.data) v = rng.normal();
        Vector x = random_vector(cols, rng);
        Vector r = random_vector(rows, rng);

        Vector y_par, y_ser(rows);
        kernels::matvec(A, x, y_par);
        kernels::serial::matvec(A, x.data(), y_ser.data());
        CHECK(bitwise_equal(y_par, y_ser));

        Vector g_par, g_ser(cols);
        kernels::matvec_t(A, r, g_par);
        kernels::serial::matvec_t(A, r.data(), g_ser.data());
        CHECK(bitwise_equal(g_par, g_ser));

        Vector u = random_vector(rows, rng), s_par, s_ser(rows);
        kernels::soft_threshold(u, 0.25, s_par);
        kernels::serial::soft_threshold(u.data(), rows, 0.25, s_ser.data());
        CHECK(bitwise_equal(s_par, s_ser));
    }
}

TEST_CASE("matvec_t equals explicit transpose matvec") {
    Rng rng(0xabcd);
    Matrix A(17, 29);
    for (double& v : A.data) v = rng.normal();
    Vector r = random_vector(17, rng);

    Matrix At(29, 17);
    for (std::size_t i = 0; i < 17; ++i)
        for (std::size_t j = 0; j < 29; ++j) At(j, i) = A(i, j);

    Vector via_t, via_plain;
    kernels::matvec_t(A, r, via_t);
    kernels::matvec(At, r, via_plain);
    // Same mathematical value; accumulation order may differ, so allow
    // rounding slack.
    REQUIRE(via_t.size() == via_plain.size());
    for (std::size_t j = 0; j < via_t.size(); ++j)
        CHECK(via_t[j] == doctest::Approx(via_plain[j]).epsilon(1e-13));
}
