#include "tinn/assembly.hpp"

#include <cmath>

namespace tinn {

namespace {

double span(SplitMix64& rng, double lo, double hi) { return lo + rng.uniform() * (hi - lo); }

SpaceTimePoint boundary_point(const Problem& pr, SplitMix64& rng) {
    SpaceTimePoint p;
    if (pr.spatial_dim == 1) {
        p.x = rng.uniform() < 0.5 ? pr.x_lo : pr.x_hi;
    } else {
        const int edge = static_cast<int>(rng.uniform() * 4.0);
        switch (edge) {
            case 0: p.x = pr.x_lo; p.y = span(rng, pr.y_lo, pr.y_hi); break;
            case 1: p.x = pr.x_hi; p.y = span(rng, pr.y_lo, pr.y_hi); break;
            case 2: p.y = pr.y_lo; p.x = span(rng, pr.x_lo, pr.x_hi); break;
            default: p.y = pr.y_hi; p.x = span(rng, pr.x_lo, pr.x_hi); break;
        }
    }
    p.t = span(rng, 0.0, pr.t_hi);
    return p;
}

}  // namespace

CollocationSet sample_collocation(const Problem& pr, int n_r, int n_ic, int n_bc,
                                  std::uint64_t seed) {
    if (n_r <= 0 || n_ic <= 0) throw Error("sample_collocation: counts must be positive");
    CollocationSet set;
    set.seed = seed;
    SplitMix64 rng(seed);
    set.residual.reserve(n_r);
    for (int i = 0; i < n_r; ++i) {
        SpaceTimePoint p;
        p.x = span(rng, pr.x_lo, pr.x_hi);
        if (pr.spatial_dim == 2) p.y = span(rng, pr.y_lo, pr.y_hi);
        p.t = span(rng, 0.0, pr.t_hi);
        set.residual.push_back(p);
    }
    set.ic.reserve(n_ic);
    for (int i = 0; i < n_ic; ++i) {
        SpaceTimePoint p;
        p.x = span(rng, pr.x_lo, pr.x_hi);
        if (pr.spatial_dim == 2) p.y = span(rng, pr.y_lo, pr.y_hi);
        p.t = 0.0;
        set.ic.push_back(p);
    }
    if (pr.has_bc()) {
        if (n_bc <= 0) throw Error("sample_collocation: boundary count must be positive");
        set.bc.reserve(n_bc);
        for (int i = 0; i < n_bc; ++i) set.bc.push_back(boundary_point(pr, rng));
    }
    return set;
}

ResidualSystem assemble(const ModelSpec& model, const Vector& psi, const CollocationSet& colloc,
                        const Problem& pr, bool with_jacobian) {
    const int n_r = static_cast<int>(colloc.residual.size());
    const int n_bc = static_cast<int>(colloc.bc.size());
    const int n_ic = static_cast<int>(colloc.ic.size());
    const int n_vel = pr.second_order_time ? n_ic : 0;
    const int n_total = n_r + n_bc + n_ic + n_vel;
    const int p_dim = static_cast<int>(psi.size());

    ResidualSystem sys;
    sys.L.resize(n_total);
    if (with_jacobian) sys.J.resize(n_total, p_dim);

    int row = 0;
    auto emit_block = [&](const char* name, const ResidualOp& op,
                          const std::vector<SpaceTimePoint>& pts, double lambda) {
        const int n = static_cast<int>(pts.size());
        if (n == 0) return;
        sys.blocks.push_back({name, row, n});
        const double scale = std::sqrt(lambda / n);
        for (const SpaceTimePoint& p : pts) {
            const Jet jet = eval_jet(model, psi, p, op.req);
            sys.L[row] = scale * op.value(jet, p);
            if (with_jacobian)
                sys.J.row(row) = scale * param_grad(model, psi, p, op.req, op.grad(jet, p));
            ++row;
        }
    };
    emit_block("pde", pr.pde, colloc.residual, pr.lambda_r);
    if (pr.has_bc()) emit_block("bc", pr.bc, colloc.bc, pr.lambda_b);
    emit_block("ic", pr.ic, colloc.ic, pr.lambda_ic);
    if (pr.second_order_time) emit_block("ic_vel", pr.ic_vel, colloc.ic, pr.lambda_ic);
    return sys;
}

double loss(const ResidualSystem& system) { return 0.5 * system.L.squaredNorm(); }

double loss_at(const ModelSpec& model, const Vector& psi, const CollocationSet& colloc,
               const Problem& pr) {
    return loss(assemble(model, psi, colloc, pr, false));
}

}  // namespace tinn
