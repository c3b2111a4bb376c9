#pragma once

#include "tinn/jet.hpp"
#include "tinn/models.hpp"

#include <functional>

namespace tinn {

// A scalar residual defined on jets, with its analytic partials w.r.t. the
// jet slots. `value_hp` is the same residual in extended precision, used by
// the finite-difference oracles.
struct ResidualOp {
    DerivRequest req;
    std::function<double(const Jet&, const SpaceTimePoint&)> value;
    std::function<Jet(const Jet&, const SpaceTimePoint&)> grad;
    std::function<long double(const JetT<long double>&, const SpaceTimePoint&)> value_hp;
};

Jet eval_jet(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
             const DerivRequest& req);

JetT<long double> eval_jet_hp(const ModelSpec& spec,
                              const Eigen::Matrix<long double, Eigen::Dynamic, 1>& psi,
                              long double x, long double y, long double t,
                              const DerivRequest& req);

// Gradient of seed . jet(psi) w.r.t. every entry of psi (reverse sweep).
Vector param_grad(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
                  const DerivRequest& req, const Jet& seed);

// Row of J: gradient of the unscaled residual at this point w.r.t. psi.
Vector jacobian_row(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
                    const ResidualOp& op);

// Max relative deviation between `row` and central finite differences over
// all coordinates; denominator max(|analytic|, 1e-8).
double fd_deviation(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
                    const ResidualOp& op, const Vector& row);

double fd_validate(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
                   const ResidualOp& op);

}  // namespace tinn
