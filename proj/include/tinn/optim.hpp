#pragma once

#include "tinn/common.hpp"

#include <functional>
#include <vector>

namespace tinn {

// Damped Gauss-Newton with the loss-comparison mu schedule; see lm_step.
struct LmConfig {
    double mu0 = 10, gamma_up = 1.7, gamma_down = 1.3;
    double mu_max = 1e8, mu_min = 1e-12, eta = 1.0;
    void validate() const;
};

struct LmState {
    double mu = 10;
    double loss_old = 1e5;
    double mu_min_current = 1e-12;
    long iteration = 0;
};

struct StepLog {
    long iteration = 0;
    double loss = 0, mu = 0, dpsi_norm = 0;
};

// Fills L and J at psi. J may be left 0x0 by callers that only need the loss.
using SystemFn = std::function<void(const Vector& psi, Vector& L, Matrix& J)>;
using StepCallback = std::function<void(const StepLog&, const Vector& psi)>;

LmState lm_init(const LmConfig& cfg);

// One iteration: assemble, apply psi -= (J'J + mu I)^{-1} J'L unconditionally,
// then adjust mu by comparing this assembly's loss against the previous one.
StepLog lm_step(const SystemFn& system, Vector& psi, const LmConfig& cfg, LmState& state);

std::vector<StepLog> lm_run(const SystemFn& system, Vector& psi, const LmConfig& cfg,
                            long iterations, const StepCallback& callback = {});

// Adam with the staircase learning-rate schedule (lr, decay_rate, warmup,
// decay_step): linear warmup to lr, then lr * decay_rate^floor(k/decay_step).
struct AdamConfig {
    double lr = 1e-3, decay_rate = 0.9;
    long warmup = 10000, decay_step = 5000;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

struct AdamState {
    Vector m, v;
    long iteration = 0;
};

double adam_lr(const AdamConfig& cfg, long iteration);
void adam_step(Vector& psi, const Vector& grad, AdamState& state, const AdamConfig& cfg);

}  // namespace tinn
