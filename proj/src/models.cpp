#include "tinn/models.hpp"

#include "tinn/detail/eval.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace tinn {

std::string variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::Tinn: return "tinn";
        case ModelVariant::SpaceTimeMlp: return "mlp";
        case ModelVariant::SubMlp: return "submlp";
        case ModelVariant::LinearTrajectory: return "linear";
        case ModelVariant::OneNeuronTrajectory: return "one-neuron";
    }
    throw Error("variant_name: bad variant");
}

ModelVariant variant_from_name(const std::string& name) {
    if (name == "tinn") return ModelVariant::Tinn;
    if (name == "mlp") return ModelVariant::SpaceTimeMlp;
    if (name == "submlp") return ModelVariant::SubMlp;
    if (name == "linear") return ModelVariant::LinearTrajectory;
    if (name == "one-neuron") return ModelVariant::OneNeuronTrajectory;
    throw Error("unknown model variant: " + name +
                " (valid: tinn mlp submlp linear one-neuron)");
}

int BackboneSpec::feature_dim() const {
    int n = 0;
    for (int i = 0; i < input_dim; ++i) n += is_periodic(i) ? 2 : 1;
    return n;
}

int MlpLayout::n_params() const {
    int n = 0;
    for (int l = 0; l < n_layers(); ++l) {
        n += sizes[l] * sizes[l + 1];
        if (has_bias(l)) n += sizes[l + 1];
    }
    return n;
}

int MlpLayout::w_offset(int layer) const {
    int off = 0;
    for (int l = 0; l < layer; ++l) {
        off += sizes[l] * sizes[l + 1];
        if (has_bias(l)) off += sizes[l + 1];
    }
    return off;
}

int MlpLayout::b_offset(int layer) const {
    return w_offset(layer) + sizes[layer] * sizes[layer + 1];
}

static bool time_as_input(ModelVariant v) {
    return v == ModelVariant::SpaceTimeMlp || v == ModelVariant::SubMlp;
}

MlpLayout backbone_layout(const ModelSpec& spec) {
    MlpLayout lay;
    lay.sizes.push_back(spec.backbone.feature_dim() + (time_as_input(spec.variant) ? 1 : 0));
    for (int h : spec.backbone.hidden) lay.sizes.push_back(h);
    lay.sizes.push_back(1);
    lay.output_bias = spec.backbone.output_bias;
    return lay;
}

// Spatial layout ignoring the time input; this is what the lift acts on.
static MlpLayout spatial_layout(const ModelSpec& spec) {
    MlpLayout lay;
    lay.sizes.push_back(spec.backbone.feature_dim());
    for (int h : spec.backbone.hidden) lay.sizes.push_back(h);
    lay.sizes.push_back(1);
    lay.output_bias = spec.backbone.output_bias;
    return lay;
}

MlpLayout time_net_layout(const ModelSpec& spec) {
    MlpLayout lay;
    lay.sizes.push_back(1);
    for (int h : spec.time_hidden) lay.sizes.push_back(h);
    lay.sizes.push_back(spatial_layout(spec).n_groups());
    lay.output_bias = false;
    return lay;
}

int backbone_param_count(const ModelSpec& spec) { return spatial_layout(spec).n_params(); }

int param_count(const ModelSpec& spec) {
    const int nd = backbone_param_count(spec);
    switch (spec.variant) {
        case ModelVariant::Tinn:
            return 2 * nd + time_net_layout(spec).n_params() + spatial_layout(spec).n_groups();
        case ModelVariant::SpaceTimeMlp:
        case ModelVariant::SubMlp:
            return backbone_layout(spec).n_params();
        case ModelVariant::LinearTrajectory:
            return 2 * nd;
        case ModelVariant::OneNeuronTrajectory:
            return 3 * nd;
    }
    throw Error("param_count: bad variant");
}

TinnOffsets tinn_offsets(const ModelSpec& spec) {
    const int nd = backbone_param_count(spec);
    TinnOffsets off;
    off.time_net = 0;
    off.alpha = time_net_layout(spec).n_params();
    off.lift_a = off.alpha + spatial_layout(spec).n_groups();
    off.lift_b = off.lift_a + nd;
    off.total = off.lift_b + nd;
    return off;
}

// Glorot-uniform weights, zero biases. Draws follow the layout order exactly
// (weights row-major), one uniform per weight entry.
static void init_mlp(SplitMix64& rng, const MlpLayout& lay, double scale,
                     Eigen::Ref<Vector> out) {
    for (int l = 0; l < lay.n_layers(); ++l) {
        const int fan_in = lay.sizes[l], fan_out = lay.sizes[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        const int w0 = lay.w_offset(l);
        for (int i = 0; i < fan_in * fan_out; ++i)
            out[w0 + i] = scale * bound * (2.0 * rng.uniform() - 1.0);
        if (lay.has_bias(l)) out.segment(lay.b_offset(l), fan_out).setZero();
    }
}

Vector init(const ModelSpec& spec, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Vector psi = Vector::Zero(param_count(spec));
    const MlpLayout spat = spatial_layout(spec);
    const int nd = spat.n_params();
    switch (spec.variant) {
        case ModelVariant::Tinn: {
            const TinnOffsets off = tinn_offsets(spec);
            init_mlp(rng, time_net_layout(spec), 1.0, psi.segment(off.time_net, off.alpha));
            psi.segment(off.alpha, spat.n_groups()).setConstant(0.5);
            init_mlp(rng, spat, 0.1, psi.segment(off.lift_a, nd));
            init_mlp(rng, spat, 1.0, psi.segment(off.lift_b, nd));
            break;
        }
        case ModelVariant::SpaceTimeMlp:
        case ModelVariant::SubMlp:
            init_mlp(rng, backbone_layout(spec), 1.0, psi);
            break;
        case ModelVariant::LinearTrajectory:
            init_mlp(rng, spat, 0.1, psi.segment(0, nd));       // slope w
            init_mlp(rng, spat, 1.0, psi.segment(nd, nd));      // offset b
            break;
        case ModelVariant::OneNeuronTrajectory:
            init_mlp(rng, spat, 0.1, psi.segment(0, nd));       // w1
            psi.segment(nd, nd).setOnes();                      // b
            init_mlp(rng, spat, 1.0, psi.segment(2 * nd, nd));  // w2
            break;
    }
    return psi;
}

// Time network N(t) with first and second t-derivatives.
struct TimeNetJets {
    Vector v, d1, d2;
};

static TimeNetJets time_net_jets(const MlpLayout& lay, Eigen::Ref<const Vector> params,
                                 double t) {
    Vector h0(1), h1(1), h2(1);
    h0[0] = t;
    h1[0] = 1.0;
    h2[0] = 0.0;
    for (int l = 0; l < lay.n_layers(); ++l) {
        const int ni = lay.sizes[l], no = lay.sizes[l + 1];
        Eigen::Map<const Matrix> wt(params.data() + lay.w_offset(l), ni, no);
        // row-major storage: map as (ni x no) and use transposed products
        Vector z0 = wt.transpose() * h0;
        Vector z1 = wt.transpose() * h1;
        Vector z2 = wt.transpose() * h2;
        if (lay.has_bias(l)) z0 += params.segment(lay.b_offset(l), no);
        if (l + 1 == lay.n_layers()) {
            return TimeNetJets{z0, z1, z2};
        }
        Vector s = z0.array().tanh();
        Vector d1 = 1.0 - s.array().square();                  // tanh'
        Vector d2 = -2.0 * s.array() * d1.array();             // tanh''
        h0 = s;
        h2 = (d2.array() * z1.array().square() + d1.array() * z2.array()).matrix();
        h1 = (d1.array() * z1.array()).matrix();
    }
    throw Error("time_net_jets: empty layout");
}

PhiJets phi_jets(const ModelSpec& spec, const Vector& psi, double t) {
    if (spec.variant != ModelVariant::Tinn) throw Error("phi_jets: not a Tinn model");
    const TinnOffsets off = tinn_offsets(spec);
    const MlpLayout tlay = time_net_layout(spec);
    const int g = spatial_layout(spec).n_groups();
    TimeNetJets n = time_net_jets(tlay, psi.segment(off.time_net, off.alpha), t);
    Vector alpha = psi.segment(off.alpha, g);
    PhiJets out;
    out.phi = ((1.0 - alpha.array()) * t + alpha.array() * n.v.array()).matrix();
    out.dphi = ((1.0 - alpha.array()) + alpha.array() * n.d1.array()).matrix();
    out.ddphi = (alpha.array() * n.d2.array()).matrix();
    return out;
}

Vector phi(const ModelSpec& spec, const Vector& psi, double t) {
    return phi_jets(spec, psi, t).phi;
}

Vector lift(const ModelSpec& spec, const Vector& psi, const Vector& phi_val) {
    if (spec.variant != ModelVariant::Tinn) throw Error("lift: not a Tinn model");
    const MlpLayout spat = spatial_layout(spec);
    if (phi_val.size() != spat.n_groups()) throw Error("lift: phi size mismatch");
    const TinnOffsets off = tinn_offsets(spec);
    const int nd = spat.n_params();
    auto a = psi.segment(off.lift_a, nd);
    auto b = psi.segment(off.lift_b, nd);
    Vector theta(nd);
    for (int l = 0; l < spat.n_layers(); ++l) {
        const int nw = spat.sizes[l] * spat.sizes[l + 1];
        const int w0 = spat.w_offset(l);
        theta.segment(w0, nw) =
            a.segment(w0, nw) * phi_val[spat.w_group(l)] + b.segment(w0, nw);
        if (spat.has_bias(l)) {
            const int b0 = spat.b_offset(l);
            const int nb = spat.sizes[l + 1];
            theta.segment(b0, nb) =
                a.segment(b0, nb) * phi_val[spat.b_group(l)] + b.segment(b0, nb);
        }
    }
    return theta;
}

ThetaJets theta_jets(const ModelSpec& spec, const Vector& psi, double t) {
    const MlpLayout spat = spatial_layout(spec);
    const int nd = spat.n_params();
    ThetaJets tj;
    switch (spec.variant) {
        case ModelVariant::Tinn: {
            const PhiJets pj = phi_jets(spec, psi, t);
            const TinnOffsets off = tinn_offsets(spec);
            auto a = psi.segment(off.lift_a, nd);
            tj.th0 = lift(spec, psi, pj.phi);
            tj.th1 = Vector(nd);
            tj.th2 = Vector(nd);
            for (int l = 0; l < spat.n_layers(); ++l) {
                const int nw = spat.sizes[l] * spat.sizes[l + 1];
                const int w0 = spat.w_offset(l);
                tj.th1.segment(w0, nw) = a.segment(w0, nw) * pj.dphi[spat.w_group(l)];
                tj.th2.segment(w0, nw) = a.segment(w0, nw) * pj.ddphi[spat.w_group(l)];
                if (spat.has_bias(l)) {
                    const int b0 = spat.b_offset(l);
                    const int nb = spat.sizes[l + 1];
                    tj.th1.segment(b0, nb) = a.segment(b0, nb) * pj.dphi[spat.b_group(l)];
                    tj.th2.segment(b0, nb) = a.segment(b0, nb) * pj.ddphi[spat.b_group(l)];
                }
            }
            break;
        }
        case ModelVariant::SpaceTimeMlp:
        case ModelVariant::SubMlp:
            tj.th0 = psi;
            tj.th1 = Vector::Zero(psi.size());
            tj.th2 = Vector::Zero(psi.size());
            break;
        case ModelVariant::LinearTrajectory: {
            auto a = psi.segment(0, nd);
            auto b = psi.segment(nd, nd);
            tj.th0 = a * t + b;
            tj.th1 = a;
            tj.th2 = Vector::Zero(nd);
            break;
        }
        case ModelVariant::OneNeuronTrajectory: {
            auto w1 = psi.segment(0, nd).array();
            auto b = psi.segment(nd, nd).array();
            auto w2 = psi.segment(2 * nd, nd).array();
            Eigen::ArrayXd s = (w1 * t + b).tanh();
            Eigen::ArrayXd d1 = 1.0 - s.square();
            Eigen::ArrayXd d2 = -2.0 * s * d1;
            tj.th0 = (w2 * s).matrix();
            tj.th1 = (w2 * d1 * w1).matrix();
            tj.th2 = (w2 * d2 * w1.square()).matrix();
            break;
        }
    }
    return tj;
}

// Input features: periodic coordinates become (cos, sin); time-as-input
// variants append t last.
static Vector features(const ModelSpec& spec, const SpaceTimePoint& p) {
    const BackboneSpec& bb = spec.backbone;
    Vector f(bb.feature_dim() + (time_as_input(spec.variant) ? 1 : 0));
    int k = 0;
    for (int i = 0; i < bb.input_dim; ++i) {
        const double c = (i == 0) ? p.x : p.y;
        if (bb.is_periodic(i)) {
            const double w = 2.0 * M_PI / bb.periodic[i];
            const double cr = detail::periodic_reduce(c, bb.periodic[i]);
            f[k++] = std::cos(w * cr);
            f[k++] = std::sin(w * cr);
        } else {
            f[k++] = c;
        }
    }
    if (time_as_input(spec.variant)) f[k++] = p.t;
    return f;
}

double forward(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p) {
    const MlpLayout lay = backbone_layout(spec);
    const Vector theta = time_as_input(spec.variant) ? psi : theta_jets(spec, psi, p.t).th0;
    Vector h = features(spec, p);
    for (int l = 0; l < lay.n_layers(); ++l) {
        const int ni = lay.sizes[l], no = lay.sizes[l + 1];
        Eigen::Map<const Matrix> wt(theta.data() + lay.w_offset(l), ni, no);
        Vector z = wt.transpose() * h;
        if (lay.has_bias(l)) z += theta.segment(lay.b_offset(l), no);
        h = (l + 1 == lay.n_layers()) ? z : Vector(z.array().tanh());
    }
    return h[0];
}

EmbeddedTinn embed_spacetime_mlp(const ModelSpec& mlp_spec, const Vector& mlp_psi) {
    if (!time_as_input(mlp_spec.variant))
        throw Error("embed_spacetime_mlp: source must take t as an input");
    const MlpLayout src = backbone_layout(mlp_spec);
    if (mlp_psi.size() != src.n_params())
        throw Error("embed_spacetime_mlp: parameter size mismatch");

    EmbeddedTinn out;
    out.spec = mlp_spec;
    out.spec.variant = ModelVariant::Tinn;
    const MlpLayout spat = spatial_layout(out.spec);
    const TinnOffsets off = tinn_offsets(out.spec);
    out.psi = Vector::Zero(off.total);  // time net 0, alpha 0 => Phi(t) = t

    auto a = out.psi.segment(off.lift_a, spat.n_params());
    auto b = out.psi.segment(off.lift_b, spat.n_params());
    const int feat = spat.sizes[0];
    const int n1 = spat.sizes[1];
    // first layer: strip the time column (stored last in each row)
    for (int r = 0; r < n1; ++r) {
        for (int c = 0; c < feat; ++c)
            b[spat.w_offset(0) + r * feat + c] = mlp_psi[src.w_offset(0) + r * (feat + 1) + c];
        a[spat.b_offset(0) + r] = mlp_psi[src.w_offset(0) + r * (feat + 1) + feat];
        b[spat.b_offset(0) + r] = mlp_psi[src.b_offset(0) + r];
    }
    for (int l = 1; l < spat.n_layers(); ++l) {
        const int nw = spat.sizes[l] * spat.sizes[l + 1];
        b.segment(spat.w_offset(l), nw) = mlp_psi.segment(src.w_offset(l), nw);
        if (spat.has_bias(l))
            b.segment(spat.b_offset(l), spat.sizes[l + 1]) =
                mlp_psi.segment(src.b_offset(l), spat.sizes[l + 1]);
    }
    return out;
}

namespace {

constexpr char kCkptMagic[8] = {'T', 'I', 'N', 'N', 'C', 'K', 'P', 'T'};

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw Error("checkpoint: truncated file");
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("checkpoint: cannot open " + path);
    os.write(kCkptMagic, 8);
    put<std::uint32_t>(os, 1);  // version
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ck.spec.variant));
    put<std::int32_t>(os, ck.spec.backbone.input_dim);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ck.spec.backbone.hidden.size()));
    for (int h : ck.spec.backbone.hidden) put<std::int32_t>(os, h);
    put<std::uint8_t>(os, ck.spec.backbone.output_bias ? 1 : 0);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ck.spec.backbone.periodic.size()));
    for (double p : ck.spec.backbone.periodic) put<double>(os, p);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ck.spec.time_hidden.size()));
    for (int h : ck.spec.time_hidden) put<std::int32_t>(os, h);
    put<std::uint64_t>(os, ck.seed);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(ck.psi.size()));
    os.write(reinterpret_cast<const char*>(ck.psi.data()),
             static_cast<std::streamsize>(ck.psi.size() * sizeof(double)));
    if (!os) throw Error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCkptMagic, 8) != 0)
        throw Error("checkpoint: bad magic in " + path);
    const auto version = get<std::uint32_t>(is);
    if (version != 1) throw Error("checkpoint: unsupported version");
    Checkpoint ck;
    ck.spec.variant = static_cast<ModelVariant>(get<std::uint32_t>(is));
    ck.spec.backbone.input_dim = get<std::int32_t>(is);
    ck.spec.backbone.hidden.resize(get<std::uint32_t>(is));
    for (int& h : ck.spec.backbone.hidden) h = get<std::int32_t>(is);
    ck.spec.backbone.output_bias = get<std::uint8_t>(is) != 0;
    ck.spec.backbone.periodic.resize(get<std::uint32_t>(is));
    for (double& p : ck.spec.backbone.periodic) p = get<double>(is);
    ck.spec.time_hidden.resize(get<std::uint32_t>(is));
    for (int& h : ck.spec.time_hidden) h = get<std::int32_t>(is);
    ck.seed = get<std::uint64_t>(is);
    const auto n = get<std::uint64_t>(is);
    if (n != static_cast<std::uint64_t>(param_count(ck.spec)))
        throw Error("checkpoint: parameter count mismatch");
    ck.psi.resize(static_cast<Eigen::Index>(n));
    is.read(reinterpret_cast<char*>(ck.psi.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw Error("checkpoint: truncated payload");
    return ck;
}

}  // namespace tinn
