#pragma once

#include "tinn/oracles.hpp"
#include "tinn/problems.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tinn {

struct EvalResult {
    std::string problem, variant, reference;
    std::uint64_t seed = 0;
    double rel_l2 = 0;
    int n_test = 0;
    double runtime_seconds = 0;
    int params = 0;
};

// sqrt(sum (pred - ref)^2 / sum ref^2)
double relative_l2(const std::vector<double>& pred, const std::vector<double>& ref);

double acc_imp(double e_baseline, double e_tinn);

struct EvalOptions {
    std::uint64_t seed = 0xE7A1u;  // test-set stream, independent of training
    int n_test = 10000;
    std::string grid_path;  // required for grid-referenced problems
    int cole_hopf_nodes = 256;
};

// Test set: i.i.d. uniform for analytic / Cole-Hopf references, the grid's
// own nodes for grid references.
EvalResult evaluate(const Checkpoint& ck, const Problem& pr, const EvalOptions& opt);

// |d/dx u_model(x0, t) - d/dx u_ref(x0, t)| over t_grid. The reference
// derivative is central FD (step 1e-5) on Cole-Hopf for Burgers, spectral
// differentiation of the grid for grid references, analytic otherwise.
std::vector<double> derivative_trace(const Checkpoint& ck, const Problem& pr, double x0,
                                     const std::vector<double>& t_grid, const EvalOptions& opt);

}  // namespace tinn
