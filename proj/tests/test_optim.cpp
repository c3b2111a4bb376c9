#include "tinn/optim.hpp"
#include "tinn/linalg.hpp"

#include <doctest.h>

#include <cmath>

using namespace tinn;

namespace {

// L = A psi - b: linear least squares with a constant Jacobian.
SystemFn linear_system(const Matrix& A, const Vector& b) {
    return [A, b](const Vector& psi, Vector& L, Matrix& J) {
        L = A * psi - b;
        J = A;
    };
}

}  // namespace

TEST_CASE("lm config validation") {
    LmConfig bad;
    bad.gamma_up = 0.9;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = LmConfig{};
    bad.gamma_down = 1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = LmConfig{};
    bad.mu_min = 100.0;  // violates mu_min <= mu0
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = LmConfig{};
    bad.eta = 0.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    LmConfig good;
    CHECK_NOTHROW(good.validate());
}

TEST_CASE("zero residual leaves psi in place and relaxes mu") {
    const Matrix A = Matrix::Identity(2, 2);
    Vector psi = Vector::Zero(2);
    const SystemFn sys = linear_system(A, Vector::Zero(2));
    LmConfig cfg;
    LmState st = lm_init(cfg);
    const StepLog log = lm_step(sys, psi, cfg, st);
    CHECK(log.loss == 0.0);
    CHECK(log.dpsi_norm == 0.0);
    CHECK(psi.norm() == 0.0);
    // 0 < loss_old (1e5) => mu decreased
    CHECK(st.mu == doctest::Approx(cfg.mu0 / cfg.gamma_down));
    CHECK(st.loss_old == 0.0);
}

TEST_CASE("mu grows under non-decreasing loss and is clamped at mu_max") {
    // constant residual: loss never changes, so after the first comparison
    // against loss_old every step inflates mu
    const SystemFn sys = [](const Vector& psi, Vector& L, Matrix& J) {
        L = Vector::Ones(2) * 500.0;
        J = Matrix::Identity(2, 2) * 1e-12;
    };
    Vector psi = Vector::Zero(2);
    LmConfig cfg;
    cfg.mu_max = 50.0;
    LmState st = lm_init(cfg);
    for (int i = 0; i < 40; ++i) lm_step(sys, psi, cfg, st);
    CHECK(st.mu == 50.0);
}

TEST_CASE("mu shrinkage is clamped at mu_min") {
    // strictly decreasing loss at every step, so mu shrinks until the clamp
    const Matrix A = Matrix::Identity(2, 2);
    const SystemFn sys = linear_system(A, Vector::Ones(2));
    Vector psi = Vector::Zero(2);
    LmConfig cfg;
    cfg.mu_min = 1.0;
    LmState st = lm_init(cfg);
    for (int i = 0; i < 40; ++i) lm_step(sys, psi, cfg, st);
    CHECK(st.mu == 1.0);
}

TEST_CASE("loss/mu safeguard resets mu to loss/10 and escalates mu_min") {
    const SystemFn sys = [](const Vector& psi, Vector& L, Matrix& J) {
        L = Vector::Ones(2) * 10000.0;  // loss 1e8 >> mu
        J = Matrix::Identity(2, 2);
    };
    Vector psi = Vector::Zero(2);
    LmConfig cfg;
    cfg.eta = 2.0;
    LmState st = lm_init(cfg);
    const double mu_min_before = st.mu_min_current;
    lm_step(sys, psi, cfg, st);
    CHECK(st.mu == doctest::Approx(1e8 / 10.0));
    CHECK(st.mu_min_current == doctest::Approx(2.0 * mu_min_before));
}

TEST_CASE("heavy damping aligns the step with the gradient") {
    SplitMix64 rng(55);
    Matrix A(6, 3);
    Vector b(6);
    for (int i = 0; i < A.rows(); ++i) {
        b[i] = rng.uniform() - 0.5;
        for (int j = 0; j < A.cols(); ++j) A(i, j) = rng.uniform() - 0.5;
    }
    Vector psi = Vector::Ones(3);
    const Vector L0 = A * psi - b;
    const Vector grad = A.transpose() * L0;

    LmConfig cfg;
    cfg.mu0 = 1e9;
    cfg.mu_max = 1e10;
    LmState st = lm_init(cfg);
    const Vector psi_before = psi;
    lm_step(linear_system(A, b), psi, cfg, st);
    const Vector step = psi - psi_before;
    const double cosine = -step.dot(grad) / (step.norm() * grad.norm());
    CHECK(cosine >= 0.999);
}

TEST_CASE("lm_run solves a small linear least-squares problem") {
    SplitMix64 rng(21);
    Matrix A(8, 4);
    Vector b(8);
    for (int i = 0; i < 8; ++i) {
        b[i] = rng.uniform() - 0.5;
        for (int j = 0; j < 4; ++j) A(i, j) = rng.uniform() - 0.5;
    }
    Vector psi = Vector::Zero(4);
    LmConfig cfg;
    int calls = 0;
    const auto hist = lm_run(linear_system(A, b), psi, cfg, 60,
                             [&](const StepLog& log, const Vector&) {
                                 CHECK(log.iteration == calls);
                                 ++calls;
                             });
    CHECK(calls == 60);
    CHECK(hist.size() == 60);
    const Vector exact = (A.transpose() * A).ldlt().solve(A.transpose() * b);
    CHECK((psi - exact).norm() <= 1e-8);
    CHECK_THROWS_AS(lm_run(linear_system(A, b), psi, cfg, 0), Error);
}

TEST_CASE("adam learning-rate schedule: warmup then staircase decay") {
    AdamConfig cfg;
    cfg.lr = 1.0;
    cfg.decay_rate = 0.5;
    cfg.warmup = 10;
    cfg.decay_step = 5;
    CHECK(adam_lr(cfg, 0) == doctest::Approx(0.1));
    CHECK(adam_lr(cfg, 4) == doctest::Approx(0.5));
    CHECK(adam_lr(cfg, 9) == doctest::Approx(1.0));
    CHECK(adam_lr(cfg, 10) == doctest::Approx(1.0));  // first post-warmup step
    CHECK(adam_lr(cfg, 14) == doctest::Approx(1.0));
    CHECK(adam_lr(cfg, 15) == doctest::Approx(0.5));
    CHECK(adam_lr(cfg, 20) == doctest::Approx(0.25));
}

TEST_CASE("adam with zero betas reduces to normalized gradient descent") {
    AdamConfig cfg;
    cfg.beta1 = 0.0;
    cfg.beta2 = 0.0;
    cfg.warmup = 0;
    cfg.decay_rate = 1.0;
    cfg.lr = 0.1;
    Vector psi = Vector::Zero(2);
    Vector grad(2);
    grad << 3.0, -7.0;
    AdamState st;
    adam_step(psi, grad, st, cfg);
    CHECK(psi[0] == doctest::Approx(-0.1).epsilon(1e-6));  // -lr * sign(g)
    CHECK(psi[1] == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("adam descends a quadratic bowl") {
    AdamConfig cfg;
    cfg.warmup = 0;
    cfg.decay_rate = 1.0;
    cfg.lr = 0.05;
    Vector psi(2);
    psi << 2.0, -3.0;
    AdamState st;
    const double before = psi.squaredNorm();
    for (int i = 0; i < 200; ++i) adam_step(psi, psi, st, cfg);  // grad of 0.5||psi||^2
    CHECK(psi.squaredNorm() < 0.01 * before);
}
