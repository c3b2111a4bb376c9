#include "tinn/evalreport.hpp"
#include "tinn/oracles.hpp"
#include "tinn/textio.hpp"
#include "tinn/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

namespace {

using namespace tinn;

int default_threads() {
    if (const char* env = std::getenv("TINN_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            return 1;
        }
    }
    return 1;
}

// "0..4" or "0,1,2" -> list of seeds
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t lo = std::stoull(s.substr(0, dots));
        const std::uint64_t hi = std::stoull(s.substr(dots + 2));
        for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
    return out;
}

struct TrainFlags {
    std::string config_path, out_dir = "run";
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_train_flags(CLI::App* cmd, TrainFlags& tf) {
    cmd->add_option("--config", tf.config_path, "key=value config file");
    cmd->add_option("--out", tf.out_dir, "output directory");
    auto kv = [&tf](const std::string& key) {
        return [&tf, key](const std::string& v) { tf.overrides.emplace_back(key, v); };
    };
    cmd->add_option_function<std::string>("--problem", kv("problem"),
                                          "burgers | allen-cahn | kdv | klein-gordon | wave");
    cmd->add_option_function<std::string>("--model", kv("model"),
                                          "tinn | mlp | submlp | linear | one-neuron");
    cmd->add_option_function<std::string>("--optimizer", kv("optimizer"), "lm | adam");
    cmd->add_option_function<std::string>("--seed", kv("seed"));
    cmd->add_option_function<std::string>("--iters", kv("iters"));
    cmd->add_option_function<std::string>("--points-r", kv("points_r"));
    cmd->add_option_function<std::string>("--points-ic", kv("points_ic"));
    cmd->add_option_function<std::string>("--points-bc", kv("points_bc"));
    cmd->add_option_function<std::string>("--lambda-r", kv("lambda_r"));
    cmd->add_option_function<std::string>("--lambda-b", kv("lambda_b"));
    cmd->add_option_function<std::string>("--lambda-ic", kv("lambda_ic"));
    cmd->add_option_function<std::string>("--threads", kv("threads"));
    cmd->add_option_function<std::string>("--grid", kv("grid"), "reference grid for evaluation");
    cmd->add_option_function<std::string>("--resample-factor", kv("resample_factor"));
}

TrainConfig build_config(const TrainFlags& tf) {
    TrainConfig cfg;
    cfg.threads = default_threads();
    if (!tf.config_path.empty())
        for (const auto& [k, v] : read_kv_file(tf.config_path)) apply_kv(cfg, k, v);
    for (const auto& [k, v] : tf.overrides) apply_kv(cfg, k, v);
    return cfg;
}

int cmd_train(const TrainFlags& tf) {
    TrainConfig cfg;
    try {
        cfg = build_config(tf);
        resolve(cfg);  // fail fast on config errors before touching the disk
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const TrainOutcome out = train(cfg, tf.out_dir);
    std::cout << "final_loss=" << fmt_double(out.final_loss)
              << " resample_events=" << out.resample_events
              << " runtime_seconds=" << fmt_double(out.runtime_seconds) << "\n"
              << "artifacts: " << out.manifest_path << " " << out.history_path << " "
              << out.checkpoint_path << " " << out.eval_path << "\n";
    return 0;
}

std::string eval_record(const EvalResult& r, std::uint64_t train_seed) {
    std::ostringstream os;
    os << "problem=" << r.problem << " variant=" << r.variant << " seed=" << train_seed
       << " rel_l2=" << fmt_double(r.rel_l2) << " n_test=" << r.n_test
       << " params=" << r.params << " reference=" << r.reference
       << " runtime_seconds=" << fmt_double(r.runtime_seconds);
    return os.str();
}

int cmd_eval(const std::string& ck_path, const std::string& problem, const std::string& grid,
             int n_test, std::uint64_t seed, const std::string& table) {
    Problem pr = problem_by_name(problem);
    const Checkpoint ck = load_checkpoint(ck_path);
    EvalOptions opt;
    opt.grid_path = grid;
    opt.n_test = n_test;
    opt.seed = seed;
    const EvalResult res = evaluate(ck, pr, opt);
    const std::string rec = eval_record(res, ck.seed);
    std::cout << rec << "\n";
    if (!table.empty()) {
        std::ofstream tf(table, std::ios::app);
        if (!tf) throw Error("eval: cannot append to " + table);
        tf << rec << "\n";
    }
    return 0;
}

int cmd_oracle(const std::string& problem, int modes, double dt, const std::string& out_path,
               int nx, int nt, bool csv) {
    Problem pr = problem_by_name(problem);
    SolutionGrid grid;
    std::vector<double> xs(nx), ts(nt);
    for (int i = 0; i < nx; ++i) xs[i] = pr.x_lo + (pr.x_hi - pr.x_lo) * i / nx;
    for (int i = 0; i < nt; ++i) ts[i] = pr.t_hi * (i + 1) / nt;
    if (pr.reference == ReferenceKind::GridFile) {
        grid = spectral_reference(problem, modes, dt, xs, ts);
    } else if (pr.reference == ReferenceKind::ColeHopf) {
        grid.problem = problem;
        grid.x_grid = xs;
        grid.t_grid = ts;
        for (double t : ts)
            for (double x : xs) grid.values.push_back(burgers_reference(x, t, 256));
    } else {
        throw Error("oracle: " + problem + " has an analytic solution; no grid needed");
    }
    save_grid(grid, out_path);
    std::cout << "wrote " << out_path << " (" << nx << "x" << nt << ")\n";
    if (csv) {
        const std::string csv_path = out_path + ".csv";
        std::ofstream os(csv_path);
        dump_csv(grid, os);
        std::cout << "wrote " << csv_path << "\n";
    }
    return 0;
}

int cmd_bench(const std::vector<std::string>& problems, const std::vector<std::string>& variants,
              const std::string& seeds_arg, const TrainFlags& tf) {
    const auto seeds = parse_seeds(seeds_arg);
    std::filesystem::create_directories(tf.out_dir);
    const std::string table_path = tf.out_dir + "/bench.txt";
    std::ofstream table(table_path);
    std::cout << std::left << std::setw(14) << "problem" << std::setw(12) << "variant"
              << std::setw(6) << "seed" << std::setw(14) << "rel_l2" << "params\n";
    for (const auto& problem : problems) {
        for (const auto& variant : variants) {
            std::vector<double> errs;
            for (std::uint64_t seed : seeds) {
                TrainFlags cell = tf;
                cell.overrides.emplace_back("problem", problem);
                cell.overrides.emplace_back("model", variant);
                cell.overrides.emplace_back("seed", std::to_string(seed));
                cell.out_dir = tf.out_dir + "/" + problem + "-" + variant + "-s" +
                               std::to_string(seed);
                const TrainConfig cfg = build_config(cell);
                const TrainOutcome out = train(cfg, cell.out_dir);
                Problem pr = problem_by_name(problem);
                EvalOptions opt;
                opt.grid_path = cfg.grid;
                const EvalResult res = evaluate(out.checkpoint, pr, opt);
                errs.push_back(res.rel_l2);
                table << eval_record(res, seed) << "\n";
                std::cout << std::left << std::setw(14) << problem << std::setw(12) << variant
                          << std::setw(6) << seed << std::setw(14) << fmt_double(res.rel_l2)
                          << res.params << "\n";
            }
            std::sort(errs.begin(), errs.end());
            const double mean =
                std::accumulate(errs.begin(), errs.end(), 0.0) / double(errs.size());
            const double median = errs[errs.size() / 2];
            table << "summary problem=" << problem << " variant=" << variant
                  << " mean_rel_l2=" << fmt_double(mean)
                  << " median_rel_l2=" << fmt_double(median) << " runs=" << errs.size() << "\n";
            std::cout << "  " << problem << "/" << variant << ": mean=" << fmt_double(mean)
                      << " median=" << fmt_double(median) << "\n";
        }
    }
    std::cout << "table: " << table_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mesh-free PDE solver with time-induced neural networks"};
    app.require_subcommand(1);

    TrainFlags train_flags;
    CLI::App* train_cmd = app.add_subcommand("train", "train a model on a benchmark PDE");
    add_train_flags(train_cmd, train_flags);

    std::string eval_ck, eval_problem, eval_grid, eval_table;
    int eval_n_test = 10000;
    std::uint64_t eval_seed = 0xE7A1u;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
    eval_cmd->add_option("checkpoint", eval_ck, "checkpoint file")->required();
    eval_cmd->add_option("--problem", eval_problem, "problem name")->required();
    eval_cmd->add_option("--grid", eval_grid, "reference grid file");
    eval_cmd->add_option("--n-test", eval_n_test, "test-set size for point references");
    eval_cmd->add_option("--seed", eval_seed, "test-set seed");
    eval_cmd->add_option("--table", eval_table, "append the record to this table file");

    std::string or_problem, or_out = "reference.tinngrid";
    int or_modes = 512, or_nx = 256, or_nt = 100;
    double or_dt = 1e-4;
    bool or_csv = false;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "write a reference solution grid");
    oracle_cmd->add_option("--problem", or_problem, "burgers | allen-cahn | kdv")->required();
    oracle_cmd->add_option("--modes", or_modes, "retained Fourier modes (power of two)");
    oracle_cmd->add_option("--dt", or_dt, "ETDRK4 step size");
    oracle_cmd->add_option("--out", or_out, "output grid path");
    oracle_cmd->add_option("--nx", or_nx, "output x resolution");
    oracle_cmd->add_option("--nt", or_nt, "output t resolution");
    oracle_cmd->add_flag("--dump-csv", or_csv, "also write a CSV dump");

    TrainFlags bench_flags;
    bench_flags.out_dir = "bench";
    std::vector<std::string> bench_problems{"burgers"};
    std::vector<std::string> bench_variants{"submlp", "mlp", "tinn"};
    std::string bench_seeds = "0..4";
    CLI::App* bench_cmd = app.add_subcommand("bench", "variant x seed ablation table");
    bench_cmd->add_option("--problems", bench_problems, "problems to run")->delimiter(',');
    bench_cmd->add_option("--variants", bench_variants, "model variants")->delimiter(',');
    bench_cmd->add_option("--seeds", bench_seeds, "e.g. 0..4 or 0,1,2");
    add_train_flags(bench_cmd, bench_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*train_cmd) return cmd_train(train_flags);
        if (*eval_cmd)
            return cmd_eval(eval_ck, eval_problem, eval_grid, eval_n_test, eval_seed, eval_table);
        if (*oracle_cmd)
            return cmd_oracle(or_problem, or_modes, or_dt, or_out, or_nx, or_nt, or_csv);
        if (*bench_cmd) return cmd_bench(bench_problems, bench_variants, bench_seeds, bench_flags);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
