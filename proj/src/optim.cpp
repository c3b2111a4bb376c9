#include "tinn/optim.hpp"

#include "tinn/linalg.hpp"

#include <cmath>

namespace tinn {

void LmConfig::validate() const {
    if (!(gamma_up > 1.0)) throw Error("lm: gamma_up must be > 1");
    if (!(gamma_down > 1.0)) throw Error("lm: gamma_down must be > 1");
    if (!(mu_min > 0.0 && mu_min <= mu0 && mu0 <= mu_max))
        throw Error("lm: need 0 < mu_min <= mu0 <= mu_max");
    if (!(eta >= 1.0)) throw Error("lm: eta must be >= 1");
}

LmState lm_init(const LmConfig& cfg) {
    cfg.validate();
    LmState s;
    s.mu = cfg.mu0;
    s.loss_old = 1e5;
    s.mu_min_current = cfg.mu_min;
    s.iteration = 0;
    return s;
}

StepLog lm_step(const SystemFn& system, Vector& psi, const LmConfig& cfg, LmState& state) {
    Vector L;
    Matrix J;
    system(psi, L, J);
    const double loss = 0.5 * L.squaredNorm();

    Vector delta;
    try {
        delta = linalg::lm_update(J, L, state.mu);
    } catch (const Error& e) {
        throw Error("lm_step: iteration " + std::to_string(state.iteration) + ": " + e.what());
    }
    psi -= delta;

    if (loss < state.loss_old)
        state.mu = std::max(state.mu / cfg.gamma_down, state.mu_min_current);
    else
        state.mu = std::min(state.mu * cfg.gamma_up, cfg.mu_max);
    state.loss_old = loss;
    if (loss / state.mu > 1e5) {
        state.mu = loss / 10.0;
        state.mu_min_current *= cfg.eta;
    }

    StepLog log;
    log.iteration = state.iteration++;
    log.loss = loss;
    log.mu = state.mu;
    log.dpsi_norm = delta.norm();
    return log;
}

std::vector<StepLog> lm_run(const SystemFn& system, Vector& psi, const LmConfig& cfg,
                            long iterations, const StepCallback& callback) {
    if (iterations < 1) throw Error("lm_run: iterations must be >= 1");
    LmState state = lm_init(cfg);
    std::vector<StepLog> history;
    history.reserve(iterations);
    for (long k = 0; k < iterations; ++k) {
        history.push_back(lm_step(system, psi, cfg, state));
        if (callback) callback(history.back(), psi);
    }
    return history;
}

double adam_lr(const AdamConfig& cfg, long iteration) {
    if (cfg.warmup > 0 && iteration < cfg.warmup)
        return cfg.lr * double(iteration + 1) / double(cfg.warmup);
    const long k = iteration - cfg.warmup;
    return cfg.lr * std::pow(cfg.decay_rate, double(k / cfg.decay_step));
}

void adam_step(Vector& psi, const Vector& grad, AdamState& state, const AdamConfig& cfg) {
    if (state.m.size() != psi.size()) {
        state.m = Vector::Zero(psi.size());
        state.v = Vector::Zero(psi.size());
        state.iteration = 0;
    }
    const long k = state.iteration++;
    const double lr = adam_lr(cfg, k);
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
    state.v = (cfg.beta2 * state.v.array() + (1.0 - cfg.beta2) * grad.array().square()).matrix();
    const double c1 = 1.0 - std::pow(cfg.beta1, double(k + 1));
    const double c2 = 1.0 - std::pow(cfg.beta2, double(k + 1));
    psi.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.eps);
}

}  // namespace tinn
