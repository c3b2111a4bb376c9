#include "tinn/linalg.hpp"

#include <doctest.h>

using namespace tinn;

TEST_CASE("gram matches hand arithmetic") {
    Matrix J(3, 2);
    J << 1, 2, 3, 4, 5, 6;
    const Matrix G = linalg::gram(J);
    CHECK(G(0, 0) == 35.0);
    CHECK(G(0, 1) == 44.0);
    CHECK(G(1, 0) == 44.0);
    CHECK(G(1, 1) == 56.0);
}

TEST_CASE("gram is bitwise symmetric") {
    SplitMix64 rng(7);
    Matrix J(40, 17);
    for (int i = 0; i < J.rows(); ++i)
        for (int j = 0; j < J.cols(); ++j) J(i, j) = rng.uniform() - 0.5;
    const Matrix G = linalg::gram(J);
    for (int i = 0; i < G.rows(); ++i)
        for (int j = 0; j < i; ++j) CHECK(G(i, j) == G(j, i));
}

TEST_CASE("solve_spd identity and jitter paths") {
    Matrix A = Matrix::Identity(3, 3);
    Vector rhs(3);
    rhs << 1, 2, 3;
    auto sol = linalg::solve_spd(A, rhs);
    CHECK(sol.jitter == 0.0);
    CHECK((sol.x - rhs).norm() == doctest::Approx(0.0));

    Matrix Z = Matrix::Zero(2, 2);  // not SPD: needs a diagonal shift
    Vector r2(2);
    r2 << 1, 1;
    auto sol2 = linalg::solve_spd(Z, r2);
    CHECK(sol2.jitter > 0.0);
    CHECK(sol2.x.allFinite());
}

TEST_CASE("solve_spd rejects asymmetric input") {
    Matrix A(2, 2);
    A << 1, 2, 0, 1;
    Vector rhs = Vector::Ones(2);
    CHECK_THROWS_AS(linalg::solve_spd(A, rhs), Error);
}

TEST_CASE("lm_update solves the damped normal equations") {
    Matrix J = Matrix::Identity(2, 2);
    Vector L(2);
    L << 2, 4;
    const Vector d = linalg::lm_update(J, L, 1.0);  // (I + I) d = L
    CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(2.0).epsilon(1e-14));
}
