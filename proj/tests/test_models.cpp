#include "tinn/models.hpp"
#include "tinn/problems.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace tinn;

namespace {

ModelSpec spec_of(const char* problem, ModelVariant v) {
    return model_for(problem_by_name(problem), v);
}

}  // namespace

TEST_CASE("parameter counts match the published tables") {
    CHECK(param_count(spec_of("burgers", ModelVariant::Tinn)) == 1145);
    CHECK(param_count(spec_of("wave", ModelVariant::Tinn)) == 1145);
    CHECK(param_count(spec_of("allen-cahn", ModelVariant::Tinn)) == 1185);
    CHECK(param_count(spec_of("kdv", ModelVariant::Tinn)) == 1185);
    CHECK(param_count(spec_of("klein-gordon", ModelVariant::Tinn)) == 1185);
    CHECK(param_count(spec_of("burgers", ModelVariant::SpaceTimeMlp)) == 1160);
}

TEST_CASE("layout group numbering skips the absent output bias") {
    MlpLayout lay = backbone_layout(spec_of("burgers", ModelVariant::Tinn));
    CHECK(lay.n_layers() == 3);
    CHECK_FALSE(lay.output_bias);
    CHECK(lay.n_groups() == 5);
    CHECK(backbone_param_count(spec_of("burgers", ModelVariant::Tinn)) == 480);
    CHECK(backbone_param_count(spec_of("allen-cahn", ModelVariant::Tinn)) == 500);
}

TEST_CASE("init: zero biases, bounded weights, deterministic") {
    const ModelSpec spec = spec_of("burgers", ModelVariant::SpaceTimeMlp);
    const Vector psi = init(spec, 42);
    const MlpLayout lay = backbone_layout(spec);
    for (int l = 0; l < lay.n_layers(); ++l) {
        const int ni = lay.sizes[l], no = lay.sizes[l + 1];
        const double bound = std::sqrt(6.0 / (ni + no));
        for (int i = 0; i < ni * no; ++i) {
            CHECK(std::abs(psi[lay.w_offset(l) + i]) <= bound);
        }
        if (lay.has_bias(l))
            for (int i = 0; i < no; ++i) CHECK(psi[lay.b_offset(l) + i] == 0.0);
    }
    CHECK((psi - init(spec, 42)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((psi - init(spec, 43)).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("tinn init gates start half-open") {
    const ModelSpec spec = spec_of("burgers", ModelVariant::Tinn);
    const Vector psi = init(spec, 0);
    const TinnOffsets off = tinn_offsets(spec);
    for (int g = 0; g < 5; ++g) CHECK(psi[off.alpha + g] == 0.5);
}

TEST_CASE("theta_jets th0 agrees with lift(phi)") {
    const ModelSpec spec = spec_of("burgers", ModelVariant::Tinn);
    const Vector psi = init(spec, 5);
    const double t = 0.37;
    const ThetaJets tj = theta_jets(spec, psi, t);
    const Vector th = lift(spec, psi, phi(spec, psi, t));
    CHECK((tj.th0 - th).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("phi_jets derivatives match finite differences") {
    const ModelSpec spec = spec_of("burgers", ModelVariant::Tinn);
    const Vector psi = init(spec, 9);
    const double t = 0.6, h = 1e-5;
    const PhiJets pj = phi_jets(spec, psi, t);
    const Vector d1 = (phi(spec, psi, t + h) - phi(spec, psi, t - h)) / (2 * h);
    const Vector d2 =
        (phi(spec, psi, t + h) - 2.0 * phi(spec, psi, t) + phi(spec, psi, t - h)) / (h * h);
    CHECK((pj.dphi - d1).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((pj.ddphi - d2).lpNorm<Eigen::Infinity>() < 1e-4);
}

TEST_CASE("periodic embedding is bit-exactly periodic") {
    const ModelSpec spec = spec_of("allen-cahn", ModelVariant::Tinn);
    const Vector psi = init(spec, 11);
    SplitMix64 rng(3);
    for (int i = 0; i < 50; ++i) {
        SpaceTimePoint a, b;
        // dyadic x so that x + 2 is exactly representable
        a.x = -1.0 + double(rng.next() % 2048) / 1024.0;
        a.t = rng.uniform();
        b = a;
        b.x = a.x + 2.0;
        CHECK(forward(spec, psi, a) == forward(spec, psi, b));
        b.x = a.x - 2.0;
        CHECK(forward(spec, psi, a) == forward(spec, psi, b));
    }
}

TEST_CASE("embedded space-time mlp reproduces the original") {
    const ModelSpec mlp = spec_of("burgers", ModelVariant::SpaceTimeMlp);
    const Vector psi = init(mlp, 17);
    const EmbeddedTinn emb = embed_spacetime_mlp(mlp, psi);
    SplitMix64 rng(21);
    for (int i = 0; i < 50; ++i) {
        SpaceTimePoint p;
        p.x = 2.0 * rng.uniform() - 1.0;
        p.t = rng.uniform();
        CHECK(std::abs(forward(mlp, psi, p) - forward(emb.spec, emb.psi, p)) <= 1e-13);
    }
}

TEST_CASE("checkpoint round trip and fault injection") {
    const ModelSpec spec = spec_of("allen-cahn", ModelVariant::Tinn);
    Checkpoint ck;
    ck.spec = spec;
    ck.psi = init(spec, 23);
    ck.seed = 23;
    const std::string path = "test_ck.tinnckpt";
    save_checkpoint(path, ck);
    const Checkpoint back = load_checkpoint(path);
    CHECK(back.seed == 23);
    CHECK(back.spec.variant == spec.variant);
    CHECK(back.spec.backbone.periodic == spec.backbone.periodic);
    CHECK((back.psi - ck.psi).lpNorm<Eigen::Infinity>() == 0.0);

    {
        std::ofstream bad("test_bad.tinnckpt", std::ios::binary);
        bad << "NOTMAGIC" << std::string(64, '\0');
    }
    CHECK_THROWS_AS(load_checkpoint("test_bad.tinnckpt"), Error);

    {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        std::ofstream trunc("test_trunc.tinnckpt", std::ios::binary);
        trunc.write(bytes.data(), std::streamsize(bytes.size() / 2));
    }
    CHECK_THROWS_AS(load_checkpoint("test_trunc.tinnckpt"), Error);
    std::remove(path.c_str());
    std::remove("test_bad.tinnckpt");
    std::remove("test_trunc.tinnckpt");
}

TEST_CASE("variant names round trip") {
    for (auto v : {ModelVariant::Tinn, ModelVariant::SpaceTimeMlp, ModelVariant::SubMlp,
                   ModelVariant::LinearTrajectory, ModelVariant::OneNeuronTrajectory})
        CHECK(variant_from_name(variant_name(v)) == v);
    CHECK_THROWS_AS(variant_from_name("nosuch"), Error);
}
