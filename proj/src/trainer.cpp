#include "tinn/trainer.hpp"

#include "tinn/optim.hpp"
#include "tinn/textio.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace tinn {

bool resample_check(double val_loss, double train_loss, double factor) {
    if (val_loss < 0 || train_loss < 0) throw Error("resample_check: losses must be >= 0");
    return val_loss > factor * train_loss;
}

TrainOutcome train(const TrainConfig& cfg, const std::string& out_dir) {
    const auto wall0 = std::chrono::steady_clock::now();
    ResolvedConfig rc = resolve(cfg);
    const Problem& pr = rc.problem;

    std::filesystem::create_directories(out_dir);
    TrainOutcome out;
    out.manifest_path = out_dir + "/manifest.txt";
    out.history_path = out_dir + "/history.txt";
    out.checkpoint_path = out_dir + "/checkpoint.tinnckpt";
    out.eval_path = out_dir + "/eval.txt";

    {
        std::ofstream mf(out.manifest_path);
        if (!mf) throw Error("train: cannot write " + out.manifest_path);
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        mf << "# tinn run manifest\n";
        mf << "# created_unix = "
           << std::chrono::duration_cast<std::chrono::seconds>(now).count() << "\n";
        mf << "# artifacts: history.txt checkpoint.tinnckpt eval.txt\n";
        mf << manifest_body(rc);
    }

    Vector psi = init(rc.model, cfg.seed);
    CollocationSet colloc = sample_collocation(pr, rc.n_r, rc.n_ic, rc.n_bc, cfg.seed);
    const CollocationSet val_set =
        sample_collocation(pr, rc.n_r, rc.n_ic, rc.n_bc, validation_seed(cfg.seed));
    SplitMix64 resample_stream(cfg.seed);

    std::ofstream hist(out.history_path);
    if (!hist) throw Error("train: cannot write " + out.history_path);

    Checkpoint ck;
    ck.spec = rc.model;
    ck.seed = cfg.seed;

    double final_loss = 0;
    // Validation check, resample rule, and periodic checkpoint; returns the
    // suffix appended to this iteration's history line.
    auto cadence_hook = [&](long iteration, double train_loss, const Vector& cur_psi) {
        std::string suffix;
        if (cfg.val_cadence > 0 && (iteration + 1) % cfg.val_cadence == 0) {
            const double val_loss = loss_at(rc.model, cur_psi, val_set, pr);
            suffix += " val_loss=" + fmt_double(val_loss);
            if (resample_check(val_loss, train_loss, cfg.resample_factor)) {
                colloc = sample_collocation(pr, rc.n_r, rc.n_ic, rc.n_bc,
                                            resample_stream.next());
                colloc.resample_count = int(++out.resample_events);
                suffix += " event=resample";
            }
            ck.psi = cur_psi;
            save_checkpoint(out.checkpoint_path, ck);
        }
        return suffix;
    };

    try {
        if (cfg.optimizer == "lm") {
            SystemFn system = [&](const Vector& p, Vector& L, Matrix& J) {
                ResidualSystem sys = assemble(rc.model, p, colloc, pr, true);
                L = std::move(sys.L);
                J = std::move(sys.J);
            };
            auto callback = [&](const StepLog& log, const Vector& cur_psi) {
                hist << "iteration=" << log.iteration << " loss=" << fmt_double(log.loss)
                     << " mu=" << fmt_double(log.mu)
                     << " dpsi_norm=" << fmt_double(log.dpsi_norm)
                     << cadence_hook(log.iteration, log.loss, cur_psi) << "\n";
                final_loss = log.loss;
            };
            lm_run(system, psi, rc.lm, rc.iterations, callback);
        } else {
            AdamState state;
            for (long k = 0; k < rc.iterations; ++k) {
                ResidualSystem sys = assemble(rc.model, psi, colloc, pr, true);
                const double train_loss = loss(sys);
                const Vector grad = sys.J.transpose() * sys.L;
                const Vector prev = psi;
                adam_step(psi, grad, state, rc.adam);
                hist << "iteration=" << k << " loss=" << fmt_double(train_loss)
                     << " lr=" << fmt_double(adam_lr(rc.adam, k))
                     << " dpsi_norm=" << fmt_double((psi - prev).norm())
                     << cadence_hook(k, train_loss, psi) << "\n";
                final_loss = train_loss;
            }
        }
    } catch (...) {
        hist.flush();
        throw;
    }

    ck.psi = psi;
    save_checkpoint(out.checkpoint_path, ck);
    out.checkpoint = ck;
    out.final_loss = final_loss;
    out.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    {
        std::ofstream ef(out.eval_path);
        ef << "problem=" << pr.name << " variant=" << variant_name(rc.variant)
           << " final_loss=" << fmt_double(final_loss)
           << " resample_events=" << out.resample_events
           << " runtime_seconds=" << fmt_double(out.runtime_seconds) << "\n";
        if (pr.reference == ReferenceKind::GridFile && cfg.grid.empty()) {
            ef << "rel_l2=unavailable note=reference grid not configured; generate with: "
                  "tinn oracle --problem "
               << pr.name << " --modes 512 --out " << pr.name << ".tinngrid\n";
        } else {
            EvalOptions eo;
            eo.grid_path = cfg.grid;
            const EvalResult res = evaluate(ck, pr, eo);
            ef << "rel_l2=" << fmt_double(res.rel_l2) << " n_test=" << res.n_test
               << " reference=" << res.reference << " params=" << res.params
               << " eval_seed=" << res.seed << "\n";
        }
    }
    return out;
}

}  // namespace tinn
