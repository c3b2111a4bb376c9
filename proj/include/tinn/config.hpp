#pragma once

#include "tinn/problems.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tinn {

// Flat key=value training configuration. Unset optionals fall back to the
// selected problem's published defaults.
struct TrainConfig {
    std::string problem;
    std::string model = "tinn";
    std::string optimizer = "lm";
    std::uint64_t seed = 0;
    std::optional<long> iters;
    std::optional<int> points_r, points_ic, points_bc;
    std::optional<double> lambda_r, lambda_b, lambda_ic;
    std::optional<double> mu0, gamma_up, gamma_down, mu_max, mu_min, eta;
    double resample_factor = 5.0;
    long val_cadence = 100;
    std::string grid;  // reference grid path for evaluation
    int threads = 1;
    // Adam schedule tuple (lr, decay_rate, warmup, decay_step)
    double lr = 1e-3, decay_rate = 0.9;
    long warmup = 10000, decay_step = 5000;
};

// Lines of a config file: blank lines and '#' comments skipped.
std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path);

// Sets one field; throws on unknown key or unparseable value, naming the key.
void apply_kv(TrainConfig& cfg, const std::string& key, const std::string& value);

TrainConfig parse_config_file(const std::string& path);

struct ResolvedConfig {
    Problem problem;
    ModelSpec model;
    ModelVariant variant;
    int n_r = 0, n_ic = 0, n_bc = 0;
    long iterations = 0;
    LmConfig lm;
    AdamConfig adam;
    TrainConfig cfg;  // every optional filled with its resolved value
};

ResolvedConfig resolve(const TrainConfig& cfg);

// key=value snapshot of a resolved config; parses back to the same run.
std::string manifest_body(const ResolvedConfig& rc);

}  // namespace tinn
