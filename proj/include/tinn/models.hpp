#pragma once

#include "tinn/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tinn {

enum class ModelVariant { Tinn, SpaceTimeMlp, SubMlp, LinearTrajectory, OneNeuronTrajectory };

std::string variant_name(ModelVariant v);
ModelVariant variant_from_name(const std::string& name);

// Spatial backbone: tanh MLP, scalar output. Periodic coordinates are lifted
// to (cos, sin) features before the first layer.
struct BackboneSpec {
    int input_dim = 1;
    std::vector<int> hidden = {20, 20};
    bool output_bias = false;
    std::vector<double> periodic;  // per-coordinate period; 0 or missing = none

    bool is_periodic(int coord) const {
        return coord < static_cast<int>(periodic.size()) && periodic[coord] > 0.0;
    }
    int feature_dim() const;
};

struct ModelSpec {
    ModelVariant variant = ModelVariant::Tinn;
    BackboneSpec backbone;
    std::vector<int> time_hidden = {10, 10};  // hypernetwork N(t); Tinn only
};

// Flat parameter layout of a tanh MLP: (W1, b1, W2, b2, ..., WL[, bL]),
// weights row-major. Groups number the blocks in that order.
struct MlpLayout {
    std::vector<int> sizes;  // l0 .. lL
    bool output_bias = true;

    int n_layers() const { return static_cast<int>(sizes.size()) - 1; }
    int n_groups() const { return 2 * n_layers() - (output_bias ? 0 : 1); }
    bool has_bias(int layer) const { return output_bias || layer + 1 < n_layers(); }
    int n_params() const;
    int w_offset(int layer) const;
    int b_offset(int layer) const;  // valid only when has_bias(layer)
    int w_group(int layer) const { return 2 * layer; }
    int b_group(int layer) const { return 2 * layer + 1; }
};

// Layout of the network that consumes the input features. For SpaceTimeMlp
// and SubMlp the input gains one extra coordinate for t.
MlpLayout backbone_layout(const ModelSpec& spec);
MlpLayout time_net_layout(const ModelSpec& spec);

int backbone_param_count(const ModelSpec& spec);  // N_D
int param_count(const ModelSpec& spec);

// psi segment offsets for trajectory variants.
struct TinnOffsets {
    int time_net = 0, alpha = 0, lift_a = 0, lift_b = 0, total = 0;
};
TinnOffsets tinn_offsets(const ModelSpec& spec);

Vector init(const ModelSpec& spec, std::uint64_t seed);

struct PhiJets {
    Vector phi, dphi, ddphi;
};
// Phi(t) = (1 - alpha) t + alpha .* N(t), with t-derivatives.
PhiJets phi_jets(const ModelSpec& spec, const Vector& psi, double t);
Vector phi(const ModelSpec& spec, const Vector& psi, double t);

// Entrywise affine lift theta = a .* Phi_group + b over the backbone layout.
Vector lift(const ModelSpec& spec, const Vector& psi, const Vector& phi_val);

// Backbone parameters theta(t), theta'(t), theta''(t) for trajectory
// variants; for time-as-input variants th0 = psi and th1 = th2 = 0.
struct ThetaJets {
    Vector th0, th1, th2;
};
ThetaJets theta_jets(const ModelSpec& spec, const Vector& psi, double t);

double forward(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p);

// Exact rewrite of a space-time MLP as a Tinn: the time column of the first
// layer moves into the lift slope of the first-layer bias group.
struct EmbeddedTinn {
    ModelSpec spec;
    Vector psi;
};
EmbeddedTinn embed_spacetime_mlp(const ModelSpec& mlp_spec, const Vector& mlp_psi);

struct Checkpoint {
    ModelSpec spec;
    Vector psi;
    std::uint64_t seed = 0;
};
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tinn
