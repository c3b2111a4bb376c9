#include "tinn/diff_engine.hpp"
#include "tinn/problems.hpp"

#include <doctest.h>

#include <cmath>

using namespace tinn;

namespace {

double fwd(const ModelSpec& spec, const Vector& psi, double x, double y, double t) {
    SpaceTimePoint p;
    p.x = x;
    p.y = y;
    p.t = t;
    return forward(spec, psi, p);
}

}  // namespace

TEST_CASE("jet spatial and temporal partials match finite differences") {
    const Problem pr = problem_by_name("burgers");
    for (auto variant : {ModelVariant::Tinn, ModelVariant::SpaceTimeMlp, ModelVariant::SubMlp}) {
        const ModelSpec spec = model_for(pr, variant);
        const Vector psi = init(spec, 31);
        SpaceTimePoint p;
        p.x = 0.3;
        p.t = 0.7;
        const Jet jet = eval_jet(spec, psi, p, DerivRequest{3, 0, 2});

        const double h = 1e-4;
        auto fx = [&](double x) { return fwd(spec, psi, x, 0, p.t); };
        auto ft = [&](double t) { return fwd(spec, psi, p.x, 0, t); };
        const double ux = (fx(p.x + h) - fx(p.x - h)) / (2 * h);
        const double uxx = (fx(p.x + h) - 2 * fx(p.x) + fx(p.x - h)) / (h * h);
        const double uxxx =
            (fx(p.x + 2 * h) - 2 * fx(p.x + h) + 2 * fx(p.x - h) - fx(p.x - 2 * h)) /
            (2 * h * h * h);
        const double ut = (ft(p.t + h) - ft(p.t - h)) / (2 * h);
        const double utt = (ft(p.t + h) - 2 * ft(p.t) + ft(p.t - h)) / (h * h);

        CHECK(jet.u == doctest::Approx(fwd(spec, psi, p.x, 0, p.t)).epsilon(1e-14));
        CHECK(jet.ux == doctest::Approx(ux).epsilon(1e-6));
        CHECK(jet.uxx == doctest::Approx(uxx).epsilon(1e-5));
        CHECK(jet.uxxx == doctest::Approx(uxxx).epsilon(1e-3));
        CHECK(jet.ut == doctest::Approx(ut).epsilon(1e-6));
        CHECK(jet.utt == doctest::Approx(utt).epsilon(1e-4));
    }
}

TEST_CASE("2-D jet y partials match finite differences") {
    const Problem pr = problem_by_name("klein-gordon");
    const ModelSpec spec = model_for(pr, ModelVariant::Tinn);
    const Vector psi = init(spec, 5);
    SpaceTimePoint p;
    p.x = 0.4;
    p.y = 0.6;
    p.t = 2.0;
    const Jet jet = eval_jet(spec, psi, p, DerivRequest{2, 2, 2});
    const double h = 1e-4;
    auto fy = [&](double y) { return fwd(spec, psi, p.x, y, p.t); };
    CHECK(jet.uy == doctest::Approx((fy(p.y + h) - fy(p.y - h)) / (2 * h)).epsilon(1e-6));
    CHECK(jet.uyy ==
          doctest::Approx((fy(p.y + h) - 2 * fy(p.y) + fy(p.y - h)) / (h * h)).epsilon(1e-4));
}

TEST_CASE("unsupported derivative orders are rejected") {
    const ModelSpec spec = model_for(problem_by_name("burgers"), ModelVariant::Tinn);
    const Vector psi = init(spec, 0);
    SpaceTimePoint p;
    CHECK_THROWS_AS(eval_jet(spec, psi, p, DerivRequest{4, 0, 0}), Error);
    CHECK_THROWS_AS(eval_jet(spec, psi, p, DerivRequest{0, 0, 3}), Error);
    CHECK_THROWS_AS(eval_jet(spec, psi, p, DerivRequest{0, 1, 0}), Error);  // 1-D model
}

TEST_CASE("extended-precision jet agrees with the double path") {
    const ModelSpec spec = model_for(problem_by_name("kdv"), ModelVariant::Tinn);
    const Vector psi = init(spec, 13);
    Eigen::Matrix<long double, Eigen::Dynamic, 1> psi_hp = psi.cast<long double>();
    SpaceTimePoint p;
    p.x = -0.2;
    p.t = 0.55;
    const DerivRequest req{3, 0, 1};
    const Jet jd = eval_jet(spec, psi, p, req);
    const auto jl = eval_jet_hp(spec, psi_hp, p.x, p.y, p.t, req);
    CHECK(std::abs(jd.u - double(jl.u)) <= 1e-13);
    CHECK(std::abs(jd.ux - double(jl.ux)) <= 1e-11);
    CHECK(std::abs(jd.uxxx - double(jl.uxxx)) <= 1e-7 * std::abs(jd.uxxx) + 1e-9);
    CHECK(std::abs(jd.ut - double(jl.ut)) <= 1e-11);
}

TEST_CASE("jacobian_row survives the finite-difference audit") {
    SplitMix64 rng(77);
    for (const auto& name : problem_names()) {
        const Problem pr = problem_by_name(name);
        const ModelSpec spec = model_for(pr, ModelVariant::Tinn);
        const Vector psi = init(spec, 3);
        SpaceTimePoint p;
        p.x = rng.uniform(pr.x_lo, pr.x_hi);
        if (pr.spatial_dim == 2) p.y = rng.uniform(pr.y_lo, pr.y_hi);
        p.t = rng.uniform(0.0, pr.t_hi);
        CHECK(fd_validate(spec, psi, p, pr.pde) < 1e-5);
    }
}

TEST_CASE("param_grad of the plain value equals the FD gradient") {
    const ModelSpec spec = model_for(problem_by_name("burgers"), ModelVariant::LinearTrajectory);
    Vector psi = init(spec, 8);
    SpaceTimePoint p;
    p.x = 0.1;
    p.t = 0.9;
    Jet seed;
    seed.u = 1.0;
    const Vector g = param_grad(spec, psi, p, DerivRequest{}, seed);
    const double h = 1e-6;
    for (int i : {0, 5, 100, int(psi.size()) - 1}) {
        Vector pp = psi, pm = psi;
        pp[i] += h;
        pm[i] -= h;
        SpaceTimePoint q = p;
        const double fd = (forward(spec, pp, q) - forward(spec, pm, q)) / (2 * h);
        CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
    }
}
