#pragma once

// Templated forward evaluation of all model variants with pure-partial jets.
// Instantiated with S = double for production and S = long double for the
// finite-difference oracles, which need headroom against cancellation.

#include "tinn/jet.hpp"
#include "tinn/models.hpp"

#include <cmath>

namespace tinn::detail {

template <class S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

inline bool has_time_input(ModelVariant v) {
    return v == ModelVariant::SpaceTimeMlp || v == ModelVariant::SubMlp;
}

// Canonical representative in [-P/2, P/2); bit-exact across period shifts.
template <class S>
S periodic_reduce(S x, double period) {
    using std::floor;
    return x - S(period) * floor((x + S(period) / 2) / S(period));
}

template <class S>
struct ThetaJetsT {
    VecT<S> th0, th1, th2;
};

template <class S>
struct TimeNetOut {
    VecT<S> v, d1, d2;
};

template <class S>
TimeNetOut<S> time_net_eval(const MlpLayout& lay, const S* params, S t, int t_order) {
    using std::tanh;
    VecT<S> h0(1), h1(1), h2(1);
    h0[0] = t;
    h1[0] = S(1);
    h2[0] = S(0);
    for (int l = 0;; ++l) {
        const int ni = lay.sizes[l], no = lay.sizes[l + 1];
        Eigen::Map<const MatT<S>> wt(params + lay.w_offset(l), ni, no);
        VecT<S> z0 = wt.transpose() * h0;
        VecT<S> z1, z2;
        if (t_order >= 1) z1 = wt.transpose() * h1;
        if (t_order >= 2) z2 = wt.transpose() * h2;
        if (lay.has_bias(l))
            z0 += Eigen::Map<const VecT<S>>(params + lay.b_offset(l), no);
        if (l + 1 == lay.n_layers()) return TimeNetOut<S>{z0, z1, z2};
        h0 = z0.array().tanh().matrix();
        VecT<S> d1 = (S(1) - h0.array().square()).matrix();
        if (t_order >= 2)
            h2 = (-2.0 * h0.array() * d1.array() * z1.array().square() +
                  d1.array() * z2.array())
                     .matrix();
        if (t_order >= 1) h1 = (d1.array() * z1.array()).matrix();
    }
}

template <class S>
ThetaJetsT<S> theta_jets_eval(const ModelSpec& spec, const VecT<S>& psi, S t, int t_order) {
    using std::tanh;
    MlpLayout spat;
    {
        spat.sizes.push_back(spec.backbone.feature_dim());
        for (int h : spec.backbone.hidden) spat.sizes.push_back(h);
        spat.sizes.push_back(1);
        spat.output_bias = spec.backbone.output_bias;
    }
    const int nd = spat.n_params();
    ThetaJetsT<S> tj;
    switch (spec.variant) {
        case ModelVariant::SpaceTimeMlp:
        case ModelVariant::SubMlp:
            tj.th0 = psi;
            return tj;
        case ModelVariant::LinearTrajectory:
            tj.th0 = psi.segment(0, nd) * t + psi.segment(nd, nd);
            if (t_order >= 1) tj.th1 = psi.segment(0, nd);
            if (t_order >= 2) tj.th2 = VecT<S>::Zero(nd);
            return tj;
        case ModelVariant::OneNeuronTrajectory: {
            auto w1 = psi.segment(0, nd).array();
            auto b = psi.segment(nd, nd).array();
            auto w2 = psi.segment(2 * nd, nd).array();
            Eigen::Array<S, Eigen::Dynamic, 1> s = (w1 * t + b).tanh();
            Eigen::Array<S, Eigen::Dynamic, 1> d1 = S(1) - s.square();
            tj.th0 = (w2 * s).matrix();
            if (t_order >= 1) tj.th1 = (w2 * d1 * w1).matrix();
            if (t_order >= 2) tj.th2 = (w2 * (-2.0) * s * d1 * w1.square()).matrix();
            return tj;
        }
        case ModelVariant::Tinn:
            break;
    }
    const TinnOffsets off = tinn_offsets(spec);
    MlpLayout tlay = time_net_layout(spec);
    TimeNetOut<S> n = time_net_eval<S>(tlay, psi.data() + off.time_net, t, t_order);
    const int g = spat.n_groups();
    auto alpha = psi.segment(off.alpha, g).array();
    VecT<S> phi0 = ((S(1) - alpha) * t + alpha * n.v.array()).matrix();
    VecT<S> phi1, phi2;
    if (t_order >= 1) phi1 = ((S(1) - alpha) + alpha * n.d1.array()).matrix();
    if (t_order >= 2) phi2 = (alpha * n.d2.array()).matrix();

    auto a = psi.segment(off.lift_a, nd);
    auto bb = psi.segment(off.lift_b, nd);
    tj.th0.resize(nd);
    if (t_order >= 1) tj.th1.resize(nd);
    if (t_order >= 2) tj.th2.resize(nd);
    auto fill_group = [&](int o, int n_entries, int grp) {
        tj.th0.segment(o, n_entries) = a.segment(o, n_entries) * phi0[grp] + bb.segment(o, n_entries);
        if (t_order >= 1) tj.th1.segment(o, n_entries) = a.segment(o, n_entries) * phi1[grp];
        if (t_order >= 2) tj.th2.segment(o, n_entries) = a.segment(o, n_entries) * phi2[grp];
    };
    for (int l = 0; l < spat.n_layers(); ++l) {
        fill_group(spat.w_offset(l), spat.sizes[l] * spat.sizes[l + 1], spat.w_group(l));
        if (spat.has_bias(l)) fill_group(spat.b_offset(l), spat.sizes[l + 1], spat.b_group(l));
    }
    return tj;
}

// Per-layer activation jets for the directions in play. Unused slots stay empty.
template <class S>
struct SlotsT {
    VecT<S> v, x1, x2, x3, y1, y2, t1, t2;
};

template <class S>
SlotsT<S> input_features(const ModelSpec& spec, S x, S y, S t, const DerivRequest& req) {
    using std::cos;
    using std::sin;
    const BackboneSpec& bb = spec.backbone;
    const bool tin = has_time_input(spec.variant);
    const int n = bb.feature_dim() + (tin ? 1 : 0);
    SlotsT<S> f;
    f.v = VecT<S>::Zero(n);
    if (req.x_order >= 1) f.x1 = VecT<S>::Zero(n);
    if (req.x_order >= 2) f.x2 = VecT<S>::Zero(n);
    if (req.x_order >= 3) f.x3 = VecT<S>::Zero(n);
    if (req.y_order >= 1) f.y1 = VecT<S>::Zero(n);
    if (req.y_order >= 2) f.y2 = VecT<S>::Zero(n);
    if (req.t_order >= 1) f.t1 = VecT<S>::Zero(n);
    if (req.t_order >= 2) f.t2 = VecT<S>::Zero(n);

    int k = 0;
    for (int i = 0; i < bb.input_dim; ++i) {
        const S c = (i == 0) ? x : y;
        const int ord = (i == 0) ? req.x_order : req.y_order;
        auto slot1 = [&](int j) -> S& { return (i == 0) ? f.x1[j] : f.y1[j]; };
        auto slot2 = [&](int j) -> S& { return (i == 0) ? f.x2[j] : f.y2[j]; };
        if (bb.is_periodic(i)) {
            const double w = 2.0 * M_PI / bb.periodic[i];
            const S cr = periodic_reduce(c, bb.periodic[i]);
            const S cw = cos(S(w) * cr), sw = sin(S(w) * cr);
            f.v[k] = cw;
            f.v[k + 1] = sw;
            if (ord >= 1) {
                slot1(k) = -S(w) * sw;
                slot1(k + 1) = S(w) * cw;
            }
            if (ord >= 2) {
                slot2(k) = -S(w * w) * cw;
                slot2(k + 1) = -S(w * w) * sw;
            }
            if (i == 0 && req.x_order >= 3) {
                f.x3[k] = S(w * w * w) * sw;
                f.x3[k + 1] = -S(w * w * w) * cw;
            }
            k += 2;
        } else {
            f.v[k] = c;
            if (ord >= 1) slot1(k) = S(1);
            k += 1;
        }
    }
    if (tin) {
        f.v[k] = t;
        if (req.t_order >= 1) f.t1[k] = S(1);
    }
    return f;
}

// One evaluation of the composite map (x, y, t) -> u_{theta(t)}(x, y) with all
// requested pure partials.
template <class S>
JetT<S> eval_jet_impl(const ModelSpec& spec, const VecT<S>& psi, S x, S y, S t,
                      const DerivRequest& req) {
    if (req.x_order > 3 || req.y_order > 2 || req.t_order > 2 || req.x_order < 0 ||
        req.y_order < 0 || req.t_order < 0)
        throw Error("eval_jet: derivative order not supported");
    if (spec.backbone.input_dim < 2 && req.y_order > 0)
        throw Error("eval_jet: y derivative requested for 1-D model");

    const bool tin = has_time_input(spec.variant);
    const int weight_t_order = tin ? 0 : req.t_order;
    const ThetaJetsT<S> tj = theta_jets_eval(spec, psi, t, weight_t_order);

    MlpLayout lay = backbone_layout(spec);
    SlotsT<S> h = input_features(spec, x, y, t, req);

    const bool wx1 = req.x_order >= 1, wx2 = req.x_order >= 2, wx3 = req.x_order >= 3;
    const bool wy1 = req.y_order >= 1, wy2 = req.y_order >= 2;
    const bool wt1 = req.t_order >= 1, wt2 = req.t_order >= 2;
    const bool tv = weight_t_order >= 1;  // time-varying weights

    for (int l = 0; l < lay.n_layers(); ++l) {
        const int ni = lay.sizes[l], no = lay.sizes[l + 1];
        Eigen::Map<const MatT<S>> w0(tj.th0.data() + lay.w_offset(l), ni, no);
        SlotsT<S> z;
        z.v = w0.transpose() * h.v;
        if (lay.has_bias(l))
            z.v += tj.th0.segment(lay.b_offset(l), no);
        if (wx1) z.x1 = w0.transpose() * h.x1;
        if (wx2) z.x2 = w0.transpose() * h.x2;
        if (wx3) z.x3 = w0.transpose() * h.x3;
        if (wy1) z.y1 = w0.transpose() * h.y1;
        if (wy2) z.y2 = w0.transpose() * h.y2;
        if (wt1) z.t1 = w0.transpose() * h.t1;
        if (wt2) z.t2 = w0.transpose() * h.t2;
        if (tv) {
            Eigen::Map<const MatT<S>> w1(tj.th1.data() + lay.w_offset(l), ni, no);
            z.t1 += w1.transpose() * h.v;
            if (lay.has_bias(l)) z.t1 += tj.th1.segment(lay.b_offset(l), no);
            if (wt2) {
                Eigen::Map<const MatT<S>> w2(tj.th2.data() + lay.w_offset(l), ni, no);
                z.t2 += S(2) * (w1.transpose() * h.t1) + w2.transpose() * h.v;
                if (lay.has_bias(l)) z.t2 += tj.th2.segment(lay.b_offset(l), no);
            }
        }
        if (l + 1 == lay.n_layers()) {
            JetT<S> out;
            out.u = z.v[0];
            if (wx1) out.ux = z.x1[0];
            if (wx2) out.uxx = z.x2[0];
            if (wx3) out.uxxx = z.x3[0];
            if (wy1) out.uy = z.y1[0];
            if (wy2) out.uyy = z.y2[0];
            if (wt1) out.ut = z.t1[0];
            if (wt2) out.utt = z.t2[0];
            return out;
        }
        // tanh with chain rule per direction
        using Arr = Eigen::Array<S, Eigen::Dynamic, 1>;
        Arr s = z.v.array().tanh();
        Arr d1 = S(1) - s.square();
        Arr d2 = S(-2) * s * d1;
        h.v = s.matrix();
        auto first = [&](const VecT<S>& zd) { return (d1 * zd.array()).matrix(); };
        auto second = [&](const VecT<S>& zd, const VecT<S>& zdd) {
            return (d2 * zd.array().square() + d1 * zdd.array()).matrix();
        };
        if (wx3) {
            Arr d3 = S(-2) * (d1.square() + s * d2);
            h.x3 = (d3 * z.x1.array().cube() +
                    S(3) * d2 * z.x1.array() * z.x2.array() + d1 * z.x3.array())
                       .matrix();
        }
        if (wx2) h.x2 = second(z.x1, z.x2);
        if (wx1) h.x1 = first(z.x1);
        if (wy2) h.y2 = second(z.y1, z.y2);
        if (wy1) h.y1 = first(z.y1);
        if (wt2) h.t2 = second(z.t1, z.t2);
        if (wt1) h.t1 = first(z.t1);
    }
    throw Error("eval_jet: empty network");
}

}  // namespace tinn::detail
