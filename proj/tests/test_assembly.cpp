#include "tinn/assembly.hpp"

#include <doctest.h>

#include <cmath>

using namespace tinn;

TEST_CASE("sampling is deterministic and respects the domain") {
    const Problem pr = problem_by_name("burgers");
    const CollocationSet a = sample_collocation(pr, 50, 20, 10, 99);
    const CollocationSet b = sample_collocation(pr, 50, 20, 10, 99);
    REQUIRE(a.residual.size() == 50);
    REQUIRE(a.ic.size() == 20);
    REQUIRE(a.bc.size() == 10);
    for (std::size_t i = 0; i < a.residual.size(); ++i) {
        CHECK(a.residual[i].x == b.residual[i].x);
        CHECK(a.residual[i].t == b.residual[i].t);
        CHECK(pr.in_domain(a.residual[i].x, 0, a.residual[i].t));
    }
    for (const auto& p : a.ic) {
        CHECK(p.t == 0.0);
        CHECK(pr.in_domain(p.x, 0, 0));
    }
    for (const auto& p : a.bc) CHECK((p.x == pr.x_lo || p.x == pr.x_hi));
    const CollocationSet c = sample_collocation(pr, 50, 20, 10, 100);
    CHECK(a.residual[0].x != c.residual[0].x);
}

TEST_CASE("periodic problems get no boundary points") {
    const Problem pr = problem_by_name("allen-cahn");
    const CollocationSet s = sample_collocation(pr, 10, 5, pr.n_bc, 1);
    CHECK(s.bc.empty());
}

TEST_CASE("2-D boundary points lie on the four edges") {
    const Problem pr = problem_by_name("klein-gordon");
    const CollocationSet s = sample_collocation(pr, 10, 5, 40, 2);
    REQUIRE(s.bc.size() == 40);
    for (const auto& p : s.bc) {
        const bool edge = p.x == pr.x_lo || p.x == pr.x_hi || p.y == pr.y_lo || p.y == pr.y_hi;
        CHECK(edge);
        CHECK(pr.in_domain(p.x, p.y, p.t));
    }
}

TEST_CASE("assembled blocks follow pde, bc, ic order with row scaling") {
    const Problem pr = problem_by_name("burgers");
    const ModelSpec spec = model_for(pr, ModelVariant::Tinn);
    const Vector psi = init(spec, 7);
    const CollocationSet colloc = sample_collocation(pr, 12, 6, 4, 3);
    const ResidualSystem sys = assemble(spec, psi, colloc, pr);

    REQUIRE(sys.blocks.size() == 3);
    CHECK(sys.blocks[0].name == "pde");
    CHECK(sys.blocks[0].size == 12);
    CHECK(sys.blocks[1].name == "bc");
    CHECK(sys.blocks[1].size == 4);
    CHECK(sys.blocks[2].name == "ic");
    CHECK(sys.blocks[2].size == 6);
    CHECK(sys.L.size() == 22);
    CHECK(sys.J.rows() == 22);
    CHECK(sys.J.cols() == psi.size());

    // recompute each row from the raw residual and its block scaling
    const double s_pde = std::sqrt(pr.lambda_r / 12.0);
    const double s_bc = std::sqrt(pr.lambda_b / 4.0);
    const double s_ic = std::sqrt(pr.lambda_ic / 6.0);
    for (int i = 0; i < 12; ++i) {
        const Jet jet = eval_jet(spec, psi, colloc.residual[i], pr.pde.req);
        CHECK(sys.L[i] == doctest::Approx(s_pde * pr.pde.value(jet, colloc.residual[i]))
                              .epsilon(1e-14));
    }
    for (int i = 0; i < 4; ++i) {
        const Jet jet = eval_jet(spec, psi, colloc.bc[i], pr.bc.req);
        CHECK(sys.L[12 + i] ==
              doctest::Approx(s_bc * pr.bc.value(jet, colloc.bc[i])).epsilon(1e-14));
    }
    for (int i = 0; i < 6; ++i) {
        const Jet jet = eval_jet(spec, psi, colloc.ic[i], pr.ic.req);
        CHECK(sys.L[16 + i] ==
              doctest::Approx(s_ic * pr.ic.value(jet, colloc.ic[i])).epsilon(1e-14));
    }
}

TEST_CASE("second-order problems append a velocity block sharing lambda_ic") {
    const Problem pr = problem_by_name("wave");
    const ModelSpec spec = model_for(pr, ModelVariant::Tinn);
    const Vector psi = init(spec, 1);
    const CollocationSet colloc = sample_collocation(pr, 5, 3, 2, 9);
    const ResidualSystem sys = assemble(spec, psi, colloc, pr, false);
    REQUIRE(sys.blocks.size() == 4);
    CHECK(sys.blocks[3].name == "ic_vel");
    CHECK(sys.blocks[3].size == 3);
    CHECK(sys.L.size() == 13);
    CHECK(sys.J.size() == 0);

    const double s_ic = std::sqrt(pr.lambda_ic / 3.0);
    const Jet jet = eval_jet(spec, psi, colloc.ic[0], pr.ic_vel.req);
    CHECK(sys.L[10] ==
          doctest::Approx(s_ic * pr.ic_vel.value(jet, colloc.ic[0])).epsilon(1e-14));
}

TEST_CASE("doubling lambda_ic scales ic rows by sqrt(2)") {
    Problem pr = problem_by_name("burgers");
    const ModelSpec spec = model_for(pr, ModelVariant::Tinn);
    const Vector psi = init(spec, 2);
    const CollocationSet colloc = sample_collocation(pr, 4, 4, 2, 5);
    const ResidualSystem base = assemble(spec, psi, colloc, pr, false);
    pr.lambda_ic *= 2.0;
    const ResidualSystem doubled = assemble(spec, psi, colloc, pr, false);
    for (int i = 6; i < 10; ++i)
        CHECK(doubled.L[i] == doctest::Approx(std::sqrt(2.0) * base.L[i]).epsilon(1e-14));
    for (int i = 0; i < 6; ++i) CHECK(doubled.L[i] == base.L[i]);
}

TEST_CASE("loss is half the squared norm") {
    ResidualSystem sys;
    sys.L = Vector(2);
    sys.L << 3, 4;
    CHECK(loss(sys) == 12.5);

    const Problem pr = problem_by_name("kdv");
    const ModelSpec spec = model_for(pr, ModelVariant::Tinn);
    const Vector psi = init(spec, 4);
    const CollocationSet colloc = sample_collocation(pr, 8, 4, 0, 6);
    const ResidualSystem full = assemble(spec, psi, colloc, pr);
    CHECK(loss_at(spec, psi, colloc, pr) == loss(full));
}

TEST_CASE("assembled jacobian matches finite differences") {
    const Problem pr = problem_by_name("burgers");
    const ModelSpec spec = model_for(pr, ModelVariant::Tinn);
    Vector psi = init(spec, 11);
    const CollocationSet colloc = sample_collocation(pr, 6, 2, 2, 12);
    const ResidualSystem sys = assemble(spec, psi, colloc, pr);

    const double h = 1e-6;
    SplitMix64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int j = int(rng.next() % std::uint64_t(psi.size()));
        Vector pp = psi, pm = psi;
        pp[j] += h;
        pm[j] -= h;
        const ResidualSystem sp = assemble(spec, pp, colloc, pr, false);
        const ResidualSystem sm = assemble(spec, pm, colloc, pr, false);
        for (int i = 0; i < sys.L.size(); ++i) {
            const double fd = (sp.L[i] - sm.L[i]) / (2 * h);
            const double denom = std::max(std::abs(sys.J(i, j)), 1e-4);
            CHECK(std::abs(sys.J(i, j) - fd) / denom <= 1e-5);
        }
    }
}
