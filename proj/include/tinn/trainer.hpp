#pragma once

#include "tinn/assembly.hpp"
#include "tinn/config.hpp"
#include "tinn/evalreport.hpp"

#include <string>

namespace tinn {

struct TrainOutcome {
    Checkpoint checkpoint;
    double final_loss = 0;
    long resample_events = 0;
    double runtime_seconds = 0;
    std::string manifest_path, history_path, checkpoint_path, eval_path;
};

// true iff the validation loss strictly exceeds factor x the training loss.
bool resample_check(double val_loss, double train_loss, double factor);

// Full run: manifest first, then optimization with per-iteration history
// lines, periodic validation + resampling, checkpoint, and an eval summary.
TrainOutcome train(const TrainConfig& cfg, const std::string& out_dir);

}  // namespace tinn
