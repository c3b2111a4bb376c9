#include "tinn/diff_engine.hpp"

#include "tinn/detail/eval.hpp"

#include <cmath>

namespace tinn {

namespace {

using detail::has_time_input;

struct Slots {
    Vector v, x1, x2, x3, y1, y2, t1, t2;
};

struct Flags {
    bool x1 = false, x2 = false, x3 = false;
    bool y1 = false, y2 = false;
    bool t1 = false, t2 = false;
    bool tv = false;  // time-varying weights
    bool any_second() const { return x2 || y2 || t2; }
};

Flags flags_for(const DerivRequest& req, bool time_varying) {
    Flags f;
    f.x1 = req.x_order >= 1;
    f.x2 = req.x_order >= 2;
    f.x3 = req.x_order >= 3;
    f.y1 = req.y_order >= 1;
    f.y2 = req.y_order >= 2;
    f.t1 = req.t_order >= 1;
    f.t2 = req.t_order >= 2;
    f.tv = time_varying && f.t1;
    return f;
}

struct LayerTape {
    Slots in;          // activations entering the layer
    Slots z;           // pre-activations
    Vector d1, d2, d3, d4;  // tanh derivatives at z.v (hidden layers only)
};

struct MlpTape {
    std::vector<LayerTape> layers;
    Slots out;
};

// Forward through a tanh MLP whose weights carry t-jets (th1/th2 null for
// constant weights), recording everything the reverse sweep needs.
MlpTape mlp_forward(const MlpLayout& lay, const double* th0, const double* th1,
                    const double* th2, const Flags& fl, Slots input) {
    MlpTape tape;
    tape.layers.resize(lay.n_layers());
    Slots h = std::move(input);
    for (int l = 0; l < lay.n_layers(); ++l) {
        const int ni = lay.sizes[l], no = lay.sizes[l + 1];
        LayerTape& lt = tape.layers[l];
        lt.in = h;
        Eigen::Map<const Matrix> w0(th0 + lay.w_offset(l), ni, no);
        Slots z;
        z.v = w0.transpose() * h.v;
        if (lay.has_bias(l)) z.v += Eigen::Map<const Vector>(th0 + lay.b_offset(l), no);
        if (fl.x1) z.x1 = w0.transpose() * h.x1;
        if (fl.x2) z.x2 = w0.transpose() * h.x2;
        if (fl.x3) z.x3 = w0.transpose() * h.x3;
        if (fl.y1) z.y1 = w0.transpose() * h.y1;
        if (fl.y2) z.y2 = w0.transpose() * h.y2;
        if (fl.t1) z.t1 = w0.transpose() * h.t1;
        if (fl.t2) z.t2 = w0.transpose() * h.t2;
        if (fl.tv) {
            Eigen::Map<const Matrix> w1(th1 + lay.w_offset(l), ni, no);
            z.t1 += w1.transpose() * h.v;
            if (lay.has_bias(l)) z.t1 += Eigen::Map<const Vector>(th1 + lay.b_offset(l), no);
            if (fl.t2) {
                Eigen::Map<const Matrix> w2(th2 + lay.w_offset(l), ni, no);
                z.t2 += 2.0 * (w1.transpose() * h.t1) + w2.transpose() * h.v;
                if (lay.has_bias(l)) z.t2 += Eigen::Map<const Vector>(th2 + lay.b_offset(l), no);
            }
        }
        lt.z = z;
        if (l + 1 == lay.n_layers()) {
            tape.out = std::move(z);
            return tape;
        }
        Eigen::ArrayXd s = z.v.array().tanh();
        lt.d1 = (1.0 - s.square()).matrix();
        lt.d2 = (-2.0 * s * lt.d1.array()).matrix();
        if (fl.any_second() || fl.x3)
            lt.d3 = (-2.0 * (lt.d1.array().square() + s * lt.d2.array())).matrix();
        if (fl.x3)
            lt.d4 = (-2.0 * (3.0 * lt.d1.array() * lt.d2.array() + s * lt.d3.array())).matrix();
        h.v = s.matrix();
        auto first = [&](const Vector& zd) { return (lt.d1.array() * zd.array()).matrix(); };
        auto second = [&](const Vector& zd, const Vector& zdd) {
            return (lt.d2.array() * zd.array().square() + lt.d1.array() * zdd.array()).matrix();
        };
        if (fl.x3)
            h.x3 = (lt.d3.array() * z.x1.array().cube() +
                    3.0 * lt.d2.array() * z.x1.array() * z.x2.array() +
                    lt.d1.array() * z.x3.array())
                       .matrix();
        if (fl.x2) h.x2 = second(z.x1, z.x2);
        if (fl.x1) h.x1 = first(z.x1);
        if (fl.y2) h.y2 = second(z.y1, z.y2);
        if (fl.y1) h.y1 = first(z.y1);
        if (fl.t2) h.t2 = second(z.t1, z.t2);
        if (fl.t1) h.t1 = first(z.t1);
    }
    throw Error("mlp_forward: empty network");
}

struct MlpGrads {
    Vector g0, g1, g2;  // d(seed . out) / d(th0, th1, th2), flat layout
};

// Reverse sweep through the tape; returns flat parameter gradients.
MlpGrads mlp_backward(const MlpLayout& lay, const double* th0, const double* th1,
                      const double* th2, const Flags& fl, const MlpTape& tape,
                      Slots out_adjoint) {
    MlpGrads g;
    g.g0 = Vector::Zero(lay.n_params());
    if (fl.tv) g.g1 = Vector::Zero(lay.n_params());
    if (fl.tv && fl.t2) g.g2 = Vector::Zero(lay.n_params());

    Slots zb = std::move(out_adjoint);  // adjoint of layer pre-activations
    for (int l = lay.n_layers() - 1; l >= 0; --l) {
        const int ni = lay.sizes[l], no = lay.sizes[l + 1];
        const LayerTape& lt = tape.layers[l];
        Eigen::Map<const Matrix> w0(th0 + lay.w_offset(l), ni, no);
        Eigen::Map<Matrix> G0(g.g0.data() + lay.w_offset(l), ni, no);

        G0 += lt.in.v * zb.v.transpose();
        if (fl.x1) G0 += lt.in.x1 * zb.x1.transpose();
        if (fl.x2) G0 += lt.in.x2 * zb.x2.transpose();
        if (fl.x3) G0 += lt.in.x3 * zb.x3.transpose();
        if (fl.y1) G0 += lt.in.y1 * zb.y1.transpose();
        if (fl.y2) G0 += lt.in.y2 * zb.y2.transpose();
        if (fl.t1) G0 += lt.in.t1 * zb.t1.transpose();
        if (fl.t2) G0 += lt.in.t2 * zb.t2.transpose();
        if (lay.has_bias(l)) g.g0.segment(lay.b_offset(l), no) += zb.v;

        if (fl.tv) {
            Eigen::Map<Matrix> G1(g.g1.data() + lay.w_offset(l), ni, no);
            G1 += lt.in.v * zb.t1.transpose();
            if (lay.has_bias(l)) g.g1.segment(lay.b_offset(l), no) += zb.t1;
            if (fl.t2) {
                G1 += 2.0 * (lt.in.t1 * zb.t2.transpose());
                Eigen::Map<Matrix> G2(g.g2.data() + lay.w_offset(l), ni, no);
                G2 += lt.in.v * zb.t2.transpose();
                if (lay.has_bias(l)) g.g2.segment(lay.b_offset(l), no) += zb.t2;
            }
        }

        if (l == 0) break;  // features carry no trainable parameters

        // adjoint of the previous layer's activations
        Slots hb;
        hb.v = w0 * zb.v;
        if (fl.x1) hb.x1 = w0 * zb.x1;
        if (fl.x2) hb.x2 = w0 * zb.x2;
        if (fl.x3) hb.x3 = w0 * zb.x3;
        if (fl.y1) hb.y1 = w0 * zb.y1;
        if (fl.y2) hb.y2 = w0 * zb.y2;
        if (fl.t1) hb.t1 = w0 * zb.t1;
        if (fl.t2) hb.t2 = w0 * zb.t2;
        if (fl.tv) {
            Eigen::Map<const Matrix> w1(th1 + lay.w_offset(l), ni, no);
            hb.v += w1 * zb.t1;
            if (fl.t2) {
                Eigen::Map<const Matrix> w2(th2 + lay.w_offset(l), ni, no);
                hb.v += w2 * zb.t2;
                hb.t1 += 2.0 * (w1 * zb.t2);
            }
        }

        // through tanh of layer l-1
        const LayerTape& pt = tape.layers[l - 1];
        const auto& d1 = pt.d1.array();
        const auto& d2 = pt.d2.array();
        Slots nzb;
        Eigen::ArrayXd vb = hb.v.array() * d1;
        auto pair_back = [&](const Vector& hb1, const Vector& hb2, const Vector& zf,
                             const Vector& zs, bool has2, Vector& out1, Vector& out2) {
            vb += hb1.array() * d2 * zf.array();
            out1 = (hb1.array() * d1).matrix();
            if (has2) {
                const auto& d3 = pt.d3.array();
                vb += hb2.array() * (d3 * zf.array().square() + d2 * zs.array());
                out1 += (hb2.array() * 2.0 * d2 * zf.array()).matrix();
                out2 = (hb2.array() * d1).matrix();
            }
        };
        if (fl.x1) pair_back(hb.x1, hb.x2, pt.z.x1, pt.z.x2, fl.x2, nzb.x1, nzb.x2);
        if (fl.y1) pair_back(hb.y1, hb.y2, pt.z.y1, pt.z.y2, fl.y2, nzb.y1, nzb.y2);
        if (fl.t1) pair_back(hb.t1, hb.t2, pt.z.t1, pt.z.t2, fl.t2, nzb.t1, nzb.t2);
        if (fl.x3) {
            const auto& d3 = pt.d3.array();
            const auto& d4 = pt.d4.array();
            vb += hb.x3.array() * (d4 * pt.z.x1.array().cube() +
                                   3.0 * d3 * pt.z.x1.array() * pt.z.x2.array() +
                                   d2 * pt.z.x3.array());
            nzb.x1 += (hb.x3.array() *
                       (3.0 * d3 * pt.z.x1.array().square() + 3.0 * d2 * pt.z.x2.array()))
                          .matrix();
            nzb.x2 += (hb.x3.array() * 3.0 * d2 * pt.z.x1.array()).matrix();
            nzb.x3 = (hb.x3.array() * d1).matrix();
        }
        nzb.v = vb.matrix();
        zb = std::move(nzb);
    }
    return g;
}

Slots seed_slots(const Jet& seed, const Flags& fl) {
    Slots s;
    auto one = [](double v) {
        Vector u(1);
        u[0] = v;
        return u;
    };
    s.v = one(seed.u);
    if (fl.x1) s.x1 = one(seed.ux);
    if (fl.x2) s.x2 = one(seed.uxx);
    if (fl.x3) s.x3 = one(seed.uxxx);
    if (fl.y1) s.y1 = one(seed.uy);
    if (fl.y2) s.y2 = one(seed.uyy);
    if (fl.t1) s.t1 = one(seed.ut);
    if (fl.t2) s.t2 = one(seed.utt);
    return s;
}

Slots input_slots(const ModelSpec& spec, const SpaceTimePoint& p, const DerivRequest& req) {
    auto f = detail::input_features<double>(spec, p.x, p.y, p.t, req);
    Slots s;
    s.v = std::move(f.v);
    s.x1 = std::move(f.x1);
    s.x2 = std::move(f.x2);
    s.x3 = std::move(f.x3);
    s.y1 = std::move(f.y1);
    s.y2 = std::move(f.y2);
    s.t1 = std::move(f.t1);
    s.t2 = std::move(f.t2);
    return s;
}

}  // namespace

Jet eval_jet(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
             const DerivRequest& req) {
    return detail::eval_jet_impl<double>(spec, psi, p.x, p.y, p.t, req);
}

JetT<long double> eval_jet_hp(const ModelSpec& spec,
                              const Eigen::Matrix<long double, Eigen::Dynamic, 1>& psi,
                              long double x, long double y, long double t,
                              const DerivRequest& req) {
    return detail::eval_jet_impl<long double>(spec, psi, x, y, t, req);
}

Vector param_grad(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
                  const DerivRequest& req, const Jet& seed) {
    if (req.x_order > 3 || req.y_order > 2 || req.t_order > 2)
        throw Error("param_grad: derivative order not supported");
    const bool tin = has_time_input(spec.variant);
    const Flags fl = flags_for(req, !tin);
    const MlpLayout lay = backbone_layout(spec);

    const detail::ThetaJetsT<double> tj =
        detail::theta_jets_eval<double>(spec, psi, p.t, tin ? 0 : req.t_order);
    const double* th1 = fl.tv ? tj.th1.data() : nullptr;
    const double* th2 = (fl.tv && fl.t2) ? tj.th2.data() : nullptr;

    MlpTape tape = mlp_forward(lay, tj.th0.data(), th1, th2, fl, input_slots(spec, p, req));
    MlpGrads bg = mlp_backward(lay, tj.th0.data(), th1, th2, fl, tape, seed_slots(seed, fl));

    const int nd = tj.th0.size();
    Vector out = Vector::Zero(psi.size());
    switch (spec.variant) {
        case ModelVariant::SpaceTimeMlp:
        case ModelVariant::SubMlp:
            out = bg.g0;
            break;
        case ModelVariant::LinearTrajectory: {
            auto ab = out.segment(0, nd);
            ab = bg.g0 * p.t;
            if (bg.g1.size()) ab += bg.g1;
            out.segment(nd, nd) = bg.g0;
            break;
        }
        case ModelVariant::OneNeuronTrajectory: {
            auto w1 = psi.segment(0, nd).array();
            auto b = psi.segment(nd, nd).array();
            auto w2 = psi.segment(2 * nd, nd).array();
            Eigen::ArrayXd s = (w1 * p.t + b).tanh();
            Eigen::ArrayXd d1 = 1.0 - s.square();
            Eigen::ArrayXd d2 = -2.0 * s * d1;
            Eigen::ArrayXd d3 = -2.0 * (d1.square() + s * d2);
            Eigen::ArrayXd t0 = bg.g0.array();
            Eigen::ArrayXd t1 = bg.g1.size() ? Eigen::ArrayXd(bg.g1.array())
                                             : Eigen::ArrayXd::Zero(nd);
            Eigen::ArrayXd t2 = bg.g2.size() ? Eigen::ArrayXd(bg.g2.array())
                                             : Eigen::ArrayXd::Zero(nd);
            Eigen::ArrayXd zbar = t0 * w2 * d1 + t1 * w2 * d2 * w1 + t2 * w2 * d3 * w1.square();
            out.segment(0, nd) = (zbar * p.t + t1 * w2 * d1 + t2 * 2.0 * w2 * d2 * w1).matrix();
            out.segment(nd, nd) = zbar.matrix();
            out.segment(2 * nd, nd) = (t0 * s + t1 * d1 * w1 + t2 * d2 * w1.square()).matrix();
            break;
        }
        case ModelVariant::Tinn: {
            const TinnOffsets off = tinn_offsets(spec);
            const MlpLayout tlay = time_net_layout(spec);
            const int ng = tlay.sizes.back();
            auto alpha = psi.segment(off.alpha, ng).array();
            auto a = psi.segment(off.lift_a, nd);

            // recompute Phi jets with a tape for the chain back through N(t)
            DerivRequest treq{0, 0, req.t_order};
            Flags tfl = flags_for(treq, false);
            Slots tin_slots;
            tin_slots.v = Vector::Constant(1, p.t);
            if (tfl.t1) tin_slots.t1 = Vector::Constant(1, 1.0);
            if (tfl.t2) tin_slots.t2 = Vector::Constant(1, 0.0);
            MlpTape ttape = mlp_forward(tlay, psi.data() + off.time_net, nullptr, nullptr,
                                        tfl, std::move(tin_slots));
            const Vector& nv = ttape.out.v;
            Vector phi0 = ((1.0 - alpha) * p.t + alpha * nv.array()).matrix();
            Vector phi1, phi2;
            if (tfl.t1) phi1 = ((1.0 - alpha) + alpha * ttape.out.t1.array()).matrix();
            if (tfl.t2) phi2 = (alpha * ttape.out.t2.array()).matrix();

            // group sums Phi-bar_k[g] = sum_{e in g} thetabar_k[e] * a[e]
            MlpLayout spat = lay;  // trajectory variants: layout == spatial layout
            Vector pb0 = Vector::Zero(ng), pb1 = Vector::Zero(ng), pb2 = Vector::Zero(ng);
            auto ab = out.segment(off.lift_a, nd);
            auto bbar = out.segment(off.lift_b, nd);
            auto chain_block = [&](int o, int n, int grp) {
                pb0[grp] += bg.g0.segment(o, n).dot(a.segment(o, n));
                ab.segment(o, n) = bg.g0.segment(o, n) * phi0[grp];
                bbar.segment(o, n) = bg.g0.segment(o, n);
                if (bg.g1.size()) {
                    pb1[grp] += bg.g1.segment(o, n).dot(a.segment(o, n));
                    ab.segment(o, n) += bg.g1.segment(o, n) * phi1[grp];
                }
                if (bg.g2.size()) {
                    pb2[grp] += bg.g2.segment(o, n).dot(a.segment(o, n));
                    ab.segment(o, n) += bg.g2.segment(o, n) * phi2[grp];
                }
            };
            for (int l = 0; l < spat.n_layers(); ++l) {
                chain_block(spat.w_offset(l), spat.sizes[l] * spat.sizes[l + 1], spat.w_group(l));
                if (spat.has_bias(l))
                    chain_block(spat.b_offset(l), spat.sizes[l + 1], spat.b_group(l));
            }

            // gate
            auto abar = out.segment(off.alpha, ng);
            abar = (pb0.array() * (nv.array() - p.t)).matrix();
            if (bg.g1.size()) abar += (pb1.array() * (ttape.out.t1.array() - 1.0)).matrix();
            if (bg.g2.size()) abar += (pb2.array() * ttape.out.t2.array()).matrix();

            // time network
            Slots tseed;
            tseed.v = (pb0.array() * alpha).matrix();
            if (tfl.t1) tseed.t1 = (pb1.array() * alpha).matrix();
            if (tfl.t2) tseed.t2 = (pb2.array() * alpha).matrix();
            MlpGrads tg = mlp_backward(tlay, psi.data() + off.time_net, nullptr, nullptr,
                                       tfl, ttape, std::move(tseed));
            out.segment(off.time_net, tlay.n_params()) = tg.g0;
            break;
        }
    }
    return out;
}

Vector jacobian_row(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
                    const ResidualOp& op) {
    const Jet jet = eval_jet(spec, psi, p, op.req);
    const Jet seed = op.grad(jet, p);
    return param_grad(spec, psi, p, op.req, seed);
}

namespace {

double residual_at(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
                   const ResidualOp& op) {
    return op.value(eval_jet(spec, psi, p, op.req), p);
}

long double residual_at_hp(const ModelSpec& spec,
                           const Eigen::Matrix<long double, Eigen::Dynamic, 1>& psi,
                           const SpaceTimePoint& p, const ResidualOp& op) {
    auto jet = detail::eval_jet_impl<long double>(spec, psi, (long double)p.x,
                                                  (long double)p.y, (long double)p.t, op.req);
    return op.value_hp(jet, p);
}

}  // namespace

double fd_deviation(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
                    const ResidualOp& op, const Vector& row) {
    const int n = static_cast<int>(psi.size());
    double worst = 0.0;
    Vector work = psi;
    Eigen::Matrix<long double, Eigen::Dynamic, 1> work_hp;
    // Richardson-extrapolated central differences; double first, retried in
    // long double where cancellation leaves the double estimate ambiguous.
    auto central = [&](int i, double h) {
        work[i] = psi[i] + h;
        double rp = residual_at(spec, work, p, op);
        work[i] = psi[i] - h;
        double rm = residual_at(spec, work, p, op);
        work[i] = psi[i];
        return (rp - rm) / (2.0 * h);
    };
    auto central_hp = [&](int i, long double h) {
        const long double base = work_hp[i];
        work_hp[i] = base + h;
        long double rp = residual_at_hp(spec, work_hp, p, op);
        work_hp[i] = base - h;
        long double rm = residual_at_hp(spec, work_hp, p, op);
        work_hp[i] = base;
        return (rp - rm) / (2.0L * h);
    };
    for (int i = 0; i < n; ++i) {
        const double h = 1e-3 * std::max(1.0, std::abs(psi[i]));
        const double fd = (4.0 * central(i, h / 2) - central(i, h)) / 3.0;
        double dev = std::abs(row[i] - fd) / std::max(std::abs(row[i]), 1e-8);
        if (dev > 5e-6) {
            if (!work_hp.size()) work_hp = psi.cast<long double>();
            const long double hh = 1e-3L * std::max(1.0, std::abs(psi[i]));
            const long double fd2 = (4.0L * central_hp(i, hh / 2) - central_hp(i, hh)) / 3.0L;
            dev = std::abs(row[i] - (double)fd2) / std::max(std::abs(row[i]), 1e-8);
        }
        worst = std::max(worst, dev);
    }
    return worst;
}

double fd_validate(const ModelSpec& spec, const Vector& psi, const SpaceTimePoint& p,
                   const ResidualOp& op) {
    return fd_deviation(spec, psi, p, op, jacobian_row(spec, psi, p, op));
}

}  // namespace tinn
