#pragma once

#include "tinn/problems.hpp"

#include <cstdint>

namespace tinn {

struct CollocationSet {
    std::vector<SpaceTimePoint> residual, ic, bc;
    std::uint64_t seed = 0;
    int resample_count = 0;
};

// Uniform i.i.d. draws from the interior, the t=0 slice, and the spatial
// boundary, in that order, from a single splitmix64 stream.
CollocationSet sample_collocation(const Problem& pr, int n_r, int n_ic, int n_bc,
                                  std::uint64_t seed);

// Seed of the held-out validation stream for a given training seed.
inline std::uint64_t validation_seed(std::uint64_t seed) {
    return seed ^ 0x9E3779B97F4A7C15ull;
}

struct ResidualSystem {
    Vector L;
    Matrix J;  // 0x0 when assembled without the Jacobian
    struct Block {
        std::string name;
        int begin = 0, size = 0;
    };
    std::vector<Block> blocks;
};

// Stacked scaled system: sqrt(lambda_r/N_r) pde rows, then bc, ic, ic_vel
// blocks with their own scalings. loss(psi) = 0.5 ||L||^2.
ResidualSystem assemble(const ModelSpec& model, const Vector& psi, const CollocationSet& colloc,
                        const Problem& pr, bool with_jacobian = true);

double loss(const ResidualSystem& system);

double loss_at(const ModelSpec& model, const Vector& psi, const CollocationSet& colloc,
               const Problem& pr);

}  // namespace tinn
