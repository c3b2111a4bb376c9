#pragma once

#include "tinn/diff_engine.hpp"
#include "tinn/optim.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tinn {

enum class ReferenceKind { Analytic, ColeHopf, GridFile };

// One benchmark PDE: domain, residual/condition operators, penalties, and the
// training defaults attached to it.
struct Problem {
    std::string name;
    int spatial_dim = 1;
    double x_lo = -1, x_hi = 1;
    double y_lo = 0, y_hi = 0;
    double t_hi = 1;
    bool periodic = false;           // periodic in space: no boundary block
    bool second_order_time = false;  // emits velocity-IC rows

    double lambda_r = 1, lambda_b = 0, lambda_ic = 1;
    ResidualOp pde, ic, ic_vel, bc;

    ReferenceKind reference = ReferenceKind::Analytic;
    std::function<double(double x, double y, double t)> exact;  // analytic only

    int n_collocation = 10000, n_ic = 500, n_bc = 400;
    int iterations = 30000;
    LmConfig lm;
    BackboneSpec backbone;

    bool has_bc() const { return !periodic; }
    bool in_domain(double x, double y, double t) const;
};

Problem problem_by_name(const std::string& name);

// Model attached to a problem: the problem's backbone for trajectory variants
// and SubMlp; the wider 20x50 space-time net for the plain MLP baseline.
ModelSpec model_for(const Problem& pr, ModelVariant variant);
const std::vector<std::string>& problem_names();

}  // namespace tinn
