#include "tinn/trainer.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace tinn;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

TrainConfig tiny_config() {
    TrainConfig cfg;
    cfg.problem = "burgers";
    cfg.seed = 7;
    apply_kv(cfg, "iters", "6");
    apply_kv(cfg, "points_r", "40");
    apply_kv(cfg, "points_ic", "10");
    apply_kv(cfg, "points_bc", "8");
    apply_kv(cfg, "val_cadence", "3");
    return cfg;
}

}  // namespace

TEST_CASE("resample rule fires strictly above the factor") {
    CHECK(resample_check(5.1, 1.0, 5.0));
    CHECK_FALSE(resample_check(4.9, 1.0, 5.0));
    CHECK_FALSE(resample_check(5.0, 1.0, 5.0));
    CHECK_FALSE(resample_check(1e30, 1.0, std::numeric_limits<double>::infinity()));
    CHECK_THROWS_AS(resample_check(-1.0, 1.0, 5.0), Error);
}

TEST_CASE("a tiny run produces the full artifact set") {
    const std::string dir = "test_run_a";
    std::filesystem::remove_all(dir);
    const TrainOutcome out = train(tiny_config(), dir);

    CHECK(std::filesystem::exists(out.manifest_path));
    CHECK(std::filesystem::exists(out.history_path));
    CHECK(std::filesystem::exists(out.checkpoint_path));
    CHECK(std::filesystem::exists(out.eval_path));
    CHECK(out.final_loss > 0.0);
    CHECK(out.runtime_seconds > 0.0);

    // the history has one line per iteration with a loss and a step norm
    std::ifstream hist(out.history_path);
    std::string line;
    int lines = 0;
    while (std::getline(hist, line)) {
        CHECK(line.find("iteration=" + std::to_string(lines)) == 0);
        CHECK(line.find(" loss=") != std::string::npos);
        CHECK(line.find(" mu=") != std::string::npos);
        CHECK(line.find(" dpsi_norm=") != std::string::npos);
        if ((lines + 1) % 3 == 0) CHECK(line.find(" val_loss=") != std::string::npos);
        ++lines;
    }
    CHECK(lines == 6);

    // checkpoint reloads and evaluates
    const Checkpoint ck = load_checkpoint(out.checkpoint_path);
    CHECK(ck.seed == 7);
    CHECK(ck.psi.size() == 1145);

    // the manifest's key=value section reproduces the configuration
    TrainConfig back;
    for (const auto& [k, v] : read_kv_file(out.manifest_path)) apply_kv(back, k, v);
    CHECK(back.problem == "burgers");
    CHECK(*back.iters == 6);
    CHECK(*back.points_r == 40);
    CHECK(back.val_cadence == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("identical seeds give byte-identical histories across thread settings") {
    const std::string dir_a = "test_run_b1", dir_b = "test_run_b2";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    TrainConfig cfg = tiny_config();
    cfg.threads = 1;
    const TrainOutcome a = train(cfg, dir_a);
    cfg.threads = 4;
    const TrainOutcome b = train(cfg, dir_b);
    CHECK(slurp(a.history_path) == slurp(b.history_path));
    CHECK(slurp(a.checkpoint_path) == slurp(b.checkpoint_path));

    cfg.threads = 1;
    cfg.seed = 8;
    const std::string dir_c = "test_run_b3";
    std::filesystem::remove_all(dir_c);
    const TrainOutcome c = train(cfg, dir_c);
    CHECK(slurp(a.history_path) != slurp(c.history_path));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    std::filesystem::remove_all(dir_c);
}

TEST_CASE("adam runs log the learning rate instead of mu") {
    const std::string dir = "test_run_adam";
    std::filesystem::remove_all(dir);
    TrainConfig cfg = tiny_config();
    cfg.optimizer = "adam";
    apply_kv(cfg, "iters", "3");
    apply_kv(cfg, "warmup", "0");
    const TrainOutcome out = train(cfg, dir);
    const std::string hist = slurp(out.history_path);
    CHECK(hist.find(" lr=") != std::string::npos);
    CHECK(hist.find(" mu=") == std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("grid-referenced problems without a grid note it in eval.txt") {
    const std::string dir = "test_run_ac";
    std::filesystem::remove_all(dir);
    TrainConfig cfg;
    cfg.problem = "allen-cahn";
    apply_kv(cfg, "iters", "2");
    apply_kv(cfg, "points_r", "30");
    apply_kv(cfg, "points_ic", "10");
    const TrainOutcome out = train(cfg, dir);
    const std::string ev = slurp(out.eval_path);
    CHECK(ev.find("rel_l2=unavailable") != std::string::npos);
    CHECK(ev.find("tinn oracle") != std::string::npos);
    std::filesystem::remove_all(dir);
}
