#include "tinn/evalreport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>

namespace tinn {

double relative_l2(const std::vector<double>& pred, const std::vector<double>& ref) {
    if (pred.size() != ref.size() || ref.empty())
        throw Error("relative_l2: need equal-length, non-empty inputs");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = pred[i] - ref[i];
        num += d * d;
        den += ref[i] * ref[i];
    }
    if (den == 0.0) throw Error("relative_l2: reference has zero norm");
    return std::sqrt(num / den);
}

double acc_imp(double e_baseline, double e_tinn) {
    if (!(e_tinn > 0.0)) throw Error("acc_imp: e_tinn must be positive");
    return e_baseline / e_tinn;
}

namespace {

std::vector<SpaceTimePoint> uniform_test_points(const Problem& pr, int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<SpaceTimePoint> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        SpaceTimePoint p;
        p.x = pr.x_lo + rng.uniform() * (pr.x_hi - pr.x_lo);
        if (pr.spatial_dim == 2) p.y = pr.y_lo + rng.uniform() * (pr.y_hi - pr.y_lo);
        p.t = rng.uniform() * pr.t_hi;
        pts.push_back(p);
    }
    return pts;
}

// Fourier-coefficient derivative of one t-slice, evaluated at x0. Assumes the
// uniform periodic grid on [-1, 1) that spectral_reference produces.
double grid_spectral_dx(const SolutionGrid& grid, std::size_t it, double x0) {
    const int n = static_cast<int>(grid.x_grid.size());
    constexpr double kPi = 3.14159265358979323846;
    std::complex<double> acc = 0.0;
    for (int js = -(n / 2 - 1); js <= n / 2 - 1; ++js) {
        std::complex<double> coeff = 0.0;
        for (int m = 0; m < n; ++m)
            coeff += grid.at(it, m) *
                     std::exp(std::complex<double>(0.0, -kPi * js * (grid.x_grid[m] + 1.0)));
        acc += std::complex<double>(0.0, kPi * js) * coeff *
               std::exp(std::complex<double>(0.0, kPi * js * (x0 + 1.0)));
    }
    return acc.real() / n;
}

}  // namespace

EvalResult evaluate(const Checkpoint& ck, const Problem& pr, const EvalOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> pred, ref;
    EvalResult res;
    res.problem = pr.name;
    res.variant = variant_name(ck.spec.variant);
    res.seed = opt.seed;
    res.params = param_count(ck.spec);

    if (pr.reference == ReferenceKind::GridFile) {
        if (opt.grid_path.empty())
            throw Error("evaluate: " + pr.name +
                        " needs a reference grid; generate one with: tinn oracle --problem " +
                        pr.name + " --modes 512 --out " + pr.name + ".tinngrid");
        const SolutionGrid grid = load_grid(opt.grid_path);
        res.reference = "grid:" + opt.grid_path;
        for (std::size_t it = 0; it < grid.t_grid.size(); ++it)
            for (std::size_t ix = 0; ix < grid.x_grid.size(); ++ix) {
                SpaceTimePoint p;
                p.x = grid.x_grid[ix];
                p.t = grid.t_grid[it];
                pred.push_back(forward(ck.spec, ck.psi, p));
                ref.push_back(grid.at(it, ix));
            }
    } else {
        const auto pts = uniform_test_points(pr, opt.n_test, opt.seed);
        const bool cole = pr.reference == ReferenceKind::ColeHopf;
        res.reference = cole ? "cole-hopf" : "analytic";
        for (const auto& p : pts) {
            pred.push_back(forward(ck.spec, ck.psi, p));
            ref.push_back(cole ? burgers_reference(p.x, p.t, opt.cole_hopf_nodes)
                               : pr.exact(p.x, p.y, p.t));
        }
    }
    res.n_test = static_cast<int>(pred.size());
    res.rel_l2 = relative_l2(pred, ref);
    res.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::vector<double> derivative_trace(const Checkpoint& ck, const Problem& pr, double x0,
                                     const std::vector<double>& t_grid, const EvalOptions& opt) {
    const DerivRequest req{1, 0, 0};
    std::vector<double> out;
    out.reserve(t_grid.size());

    if (pr.reference == ReferenceKind::GridFile) {
        if (opt.grid_path.empty()) throw Error("derivative_trace: reference grid required");
        const SolutionGrid grid = load_grid(opt.grid_path);
        for (double t : t_grid) {
            auto it = std::find_if(grid.t_grid.begin(), grid.t_grid.end(),
                                   [t](double g) { return std::abs(g - t) < 1e-12; });
            if (it == grid.t_grid.end())
                throw Error("derivative_trace: t not present in the reference grid");
            const double ref_dx =
                grid_spectral_dx(grid, std::size_t(it - grid.t_grid.begin()), x0);
            SpaceTimePoint p;
            p.x = x0;
            p.t = t;
            out.push_back(std::abs(eval_jet(ck.spec, ck.psi, p, req).ux - ref_dx));
        }
        return out;
    }

    const double h = 1e-5;
    auto ref_u = [&](double x, double t) {
        return pr.reference == ReferenceKind::ColeHopf
                   ? burgers_reference(x, t, opt.cole_hopf_nodes)
                   : pr.exact(x, 0.0, t);
    };
    for (double t : t_grid) {
        const double ref_dx = (ref_u(x0 + h, t) - ref_u(x0 - h, t)) / (2.0 * h);
        SpaceTimePoint p;
        p.x = x0;
        p.t = t;
        out.push_back(std::abs(eval_jet(ck.spec, ck.psi, p, req).ux - ref_dx));
    }
    return out;
}

}  // namespace tinn
