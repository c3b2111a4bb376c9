#include "tinn/problems.hpp"

#include <cmath>

namespace tinn {

namespace {

constexpr double kPi = 3.14159265358979323846;

// u - g(p) condition rows; g evaluated in the scalar type of the jet.
ResidualOp value_condition(std::function<double(const SpaceTimePoint&)> target) {
    ResidualOp op;
    op.req = DerivRequest{0, 0, 0};
    op.value = [target](const Jet& j, const SpaceTimePoint& p) { return j.u - target(p); };
    op.grad = [](const Jet&, const SpaceTimePoint&) {
        Jet g;
        g.u = 1;
        return g;
    };
    op.value_hp = [target](const JetT<long double>& j, const SpaceTimePoint& p) {
        return j.u - (long double)target(p);
    };
    return op;
}

ResidualOp velocity_condition(std::function<double(const SpaceTimePoint&)> target) {
    ResidualOp op;
    op.req = DerivRequest{0, 0, 1};
    op.value = [target](const Jet& j, const SpaceTimePoint& p) { return j.ut - target(p); };
    op.grad = [](const Jet&, const SpaceTimePoint&) {
        Jet g;
        g.ut = 1;
        return g;
    };
    op.value_hp = [target](const JetT<long double>& j, const SpaceTimePoint& p) {
        return j.ut - (long double)target(p);
    };
    return op;
}

Problem burgers() {
    Problem pr;
    pr.name = "burgers";
    pr.t_hi = 1;
    pr.lambda_r = 1;
    pr.lambda_b = 1;
    pr.lambda_ic = 2;
    pr.reference = ReferenceKind::ColeHopf;
    pr.n_collocation = 10000;
    pr.n_ic = 500;
    pr.n_bc = 400;
    pr.iterations = 30000;

    const double nu = 0.01 / kPi;
    pr.pde.req = DerivRequest{2, 0, 1};
    pr.pde.value = [nu](const Jet& j, const SpaceTimePoint&) {
        return j.ut + j.u * j.ux - nu * j.uxx;
    };
    pr.pde.grad = [nu](const Jet& j, const SpaceTimePoint&) {
        Jet g;
        g.u = j.ux;
        g.ux = j.u;
        g.uxx = -nu;
        g.ut = 1;
        return g;
    };
    pr.pde.value_hp = [nu](const JetT<long double>& j, const SpaceTimePoint&) {
        return j.ut + j.u * j.ux - (long double)nu * j.uxx;
    };
    pr.ic = value_condition([](const SpaceTimePoint& p) { return -std::sin(kPi * p.x); });
    pr.bc = value_condition([](const SpaceTimePoint&) { return 0.0; });
    return pr;
}

Problem allen_cahn() {
    Problem pr;
    pr.name = "allen-cahn";
    pr.t_hi = 1;
    pr.periodic = true;
    pr.lambda_r = 1;
    pr.lambda_ic = 20;
    pr.reference = ReferenceKind::GridFile;
    pr.n_collocation = 10000;
    pr.n_ic = 500;
    pr.n_bc = 0;
    pr.iterations = 30000;
    pr.backbone.periodic = {2.0};

    pr.pde.req = DerivRequest{2, 0, 1};
    pr.pde.value = [](const Jet& j, const SpaceTimePoint&) {
        return j.ut - 0.0001 * j.uxx + 5.0 * j.u * j.u * j.u - 5.0 * j.u;
    };
    pr.pde.grad = [](const Jet& j, const SpaceTimePoint&) {
        Jet g;
        g.u = 15.0 * j.u * j.u - 5.0;
        g.uxx = -0.0001;
        g.ut = 1;
        return g;
    };
    pr.pde.value_hp = [](const JetT<long double>& j, const SpaceTimePoint&) {
        return j.ut - 0.0001L * j.uxx + 5.0L * j.u * j.u * j.u - 5.0L * j.u;
    };
    pr.ic = value_condition([](const SpaceTimePoint& p) {
        return p.x * p.x * std::cos(3.0 * kPi * p.x) + p.x * p.x;
    });
    return pr;
}

Problem kdv() {
    Problem pr;
    pr.name = "kdv";
    pr.t_hi = 1;
    pr.periodic = true;
    pr.lambda_r = 1;
    pr.lambda_ic = 2;
    pr.reference = ReferenceKind::GridFile;
    pr.n_collocation = 10000;
    pr.n_ic = 500;
    pr.n_bc = 0;
    pr.iterations = 25000;
    pr.backbone.periodic = {2.0};

    const double c = 0.022 * 0.022;
    pr.pde.req = DerivRequest{3, 0, 1};
    pr.pde.value = [c](const Jet& j, const SpaceTimePoint&) {
        return j.ut + j.u * j.ux + c * j.uxxx;
    };
    pr.pde.grad = [c](const Jet& j, const SpaceTimePoint&) {
        Jet g;
        g.u = j.ux;
        g.ux = j.u;
        g.uxxx = c;
        g.ut = 1;
        return g;
    };
    pr.pde.value_hp = [c](const JetT<long double>& j, const SpaceTimePoint&) {
        return j.ut + j.u * j.ux + (long double)c * j.uxxx;
    };
    pr.ic = value_condition([](const SpaceTimePoint& p) { return std::cos(kPi * p.x); });
    return pr;
}

double kg_exact(double x, double y, double t) {
    return (x + y) * std::cos(2.0 * t) + x * y * std::sin(2.0 * t);
}

Problem klein_gordon() {
    Problem pr;
    pr.name = "klein-gordon";
    pr.spatial_dim = 2;
    pr.y_lo = -1;
    pr.y_hi = 1;
    pr.t_hi = 10;
    pr.second_order_time = true;
    pr.lambda_r = 1;
    pr.lambda_b = 1;
    pr.lambda_ic = 3;
    pr.n_collocation = 15000;
    pr.n_ic = 4000;
    pr.n_bc = 8000;
    pr.iterations = 10000;
    pr.backbone.input_dim = 2;

    pr.exact = kg_exact;
    // u* is bilinear in space, so Delta u* = 0 and f = -4u* + (u*)^2.
    auto source = [](const SpaceTimePoint& p) {
        const double u = kg_exact(p.x, p.y, p.t);
        return -4.0 * u + u * u;
    };
    pr.pde.req = DerivRequest{2, 2, 2};
    pr.pde.value = [source](const Jet& j, const SpaceTimePoint& p) {
        return j.utt - j.uxx - j.uyy + j.u * j.u - source(p);
    };
    pr.pde.grad = [](const Jet& j, const SpaceTimePoint&) {
        Jet g;
        g.u = 2.0 * j.u;
        g.uxx = -1;
        g.uyy = -1;
        g.utt = 1;
        return g;
    };
    pr.pde.value_hp = [source](const JetT<long double>& j, const SpaceTimePoint& p) {
        return j.utt - j.uxx - j.uyy + j.u * j.u - (long double)source(p);
    };
    pr.ic = value_condition([](const SpaceTimePoint& p) { return p.x + p.y; });
    pr.ic_vel = velocity_condition([](const SpaceTimePoint& p) { return 2.0 * p.x * p.y; });
    pr.bc = value_condition([](const SpaceTimePoint& p) { return kg_exact(p.x, p.y, p.t); });
    return pr;
}

double wave_exact(double x, double, double t) {
    return std::sin(kPi * x) * std::cos(2.0 * kPi * t) +
           0.5 * std::sin(4.0 * kPi * x) * std::cos(8.0 * kPi * t);
}

Problem wave() {
    Problem pr;
    pr.name = "wave";
    pr.x_lo = 0;
    pr.x_hi = 1;
    pr.t_hi = 1;
    pr.second_order_time = true;
    pr.lambda_r = 1;
    pr.lambda_b = 10;
    pr.lambda_ic = 2;
    pr.n_collocation = 10000;
    pr.n_ic = 500;
    pr.n_bc = 400;
    pr.iterations = 30000;
    pr.lm.gamma_up = 1.27;
    pr.lm.mu_min = 5e-7;
    pr.lm.eta = 2.0;

    pr.exact = wave_exact;
    pr.pde.req = DerivRequest{2, 0, 2};
    pr.pde.value = [](const Jet& j, const SpaceTimePoint&) { return j.utt - 4.0 * j.uxx; };
    pr.pde.grad = [](const Jet&, const SpaceTimePoint&) {
        Jet g;
        g.uxx = -4;
        g.utt = 1;
        return g;
    };
    pr.pde.value_hp = [](const JetT<long double>& j, const SpaceTimePoint&) {
        return j.utt - 4.0L * j.uxx;
    };
    pr.ic = value_condition([](const SpaceTimePoint& p) {
        return std::sin(kPi * p.x) + 0.5 * std::sin(4.0 * kPi * p.x);
    });
    pr.ic_vel = velocity_condition([](const SpaceTimePoint&) { return 0.0; });
    pr.bc = value_condition([](const SpaceTimePoint&) { return 0.0; });
    return pr;
}

}  // namespace

bool Problem::in_domain(double x, double y, double t) const {
    if (x < x_lo || x > x_hi || t < 0 || t > t_hi) return false;
    if (spatial_dim == 2 && (y < y_lo || y > y_hi)) return false;
    return true;
}

const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names = {"burgers", "allen-cahn", "kdv",
                                                   "klein-gordon", "wave"};
    return names;
}

ModelSpec model_for(const Problem& pr, ModelVariant variant) {
    ModelSpec spec;
    spec.variant = variant;
    spec.backbone = pr.backbone;
    if (variant == ModelVariant::SpaceTimeMlp) spec.backbone.hidden = {20, 50};
    return spec;
}

Problem problem_by_name(const std::string& name) {
    if (name == "burgers") return burgers();
    if (name == "allen-cahn") return allen_cahn();
    if (name == "kdv") return kdv();
    if (name == "klein-gordon") return klein_gordon();
    if (name == "wave") return wave();
    std::string msg = "unknown problem '" + name + "'; valid names:";
    for (const auto& n : problem_names()) msg += " " + n;
    throw Error(msg);
}

}  // namespace tinn
