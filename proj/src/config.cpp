#include "tinn/config.hpp"

#include "tinn/textio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tinn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error("config: key '" + key + "': cannot parse '" + value + "' as a number");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    long v = 0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw Error("config: key '" + key + "': cannot parse '" + value + "' as an integer");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw Error("config: key '" + key + "': cannot parse '" + value +
                    "' as an unsigned integer");
    return v;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("config: cannot open " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error("config: " + path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
        out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return out;
}

void apply_kv(TrainConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "problem") cfg.problem = value;
    else if (key == "model") cfg.model = value;
    else if (key == "optimizer") cfg.optimizer = value;
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "iters") cfg.iters = parse_long(key, value);
    else if (key == "points_r") cfg.points_r = int(parse_long(key, value));
    else if (key == "points_ic") cfg.points_ic = int(parse_long(key, value));
    else if (key == "points_bc") cfg.points_bc = int(parse_long(key, value));
    else if (key == "lambda_r") cfg.lambda_r = parse_double(key, value);
    else if (key == "lambda_b") cfg.lambda_b = parse_double(key, value);
    else if (key == "lambda_ic") cfg.lambda_ic = parse_double(key, value);
    else if (key == "mu0") cfg.mu0 = parse_double(key, value);
    else if (key == "gamma_up") cfg.gamma_up = parse_double(key, value);
    else if (key == "gamma_down") cfg.gamma_down = parse_double(key, value);
    else if (key == "mu_max") cfg.mu_max = parse_double(key, value);
    else if (key == "mu_min") cfg.mu_min = parse_double(key, value);
    else if (key == "eta") cfg.eta = parse_double(key, value);
    else if (key == "resample_factor") {
        cfg.resample_factor = value == "inf" ? std::numeric_limits<double>::infinity()
                                             : parse_double(key, value);
    } else if (key == "val_cadence") cfg.val_cadence = parse_long(key, value);
    else if (key == "grid") cfg.grid = value;
    else if (key == "threads") cfg.threads = int(parse_long(key, value));
    else if (key == "lr") cfg.lr = parse_double(key, value);
    else if (key == "decay_rate") cfg.decay_rate = parse_double(key, value);
    else if (key == "warmup") cfg.warmup = parse_long(key, value);
    else if (key == "decay_step") cfg.decay_step = parse_long(key, value);
    else throw Error("config: unknown key '" + key + "'");
}

TrainConfig parse_config_file(const std::string& path) {
    TrainConfig cfg;
    for (const auto& [k, v] : read_kv_file(path)) apply_kv(cfg, k, v);
    return cfg;
}

ResolvedConfig resolve(const TrainConfig& cfg) {
    if (cfg.problem.empty()) throw Error("config: missing required key 'problem'");
    ResolvedConfig rc;
    rc.problem = problem_by_name(cfg.problem);
    rc.variant = variant_from_name(cfg.model);
    if (cfg.optimizer != "lm" && cfg.optimizer != "adam")
        throw Error("config: optimizer must be 'lm' or 'adam'");

    Problem& pr = rc.problem;
    if (cfg.lambda_r) pr.lambda_r = *cfg.lambda_r;
    if (cfg.lambda_b) pr.lambda_b = *cfg.lambda_b;
    if (cfg.lambda_ic) pr.lambda_ic = *cfg.lambda_ic;
    if (cfg.mu0) pr.lm.mu0 = *cfg.mu0;
    if (cfg.gamma_up) pr.lm.gamma_up = *cfg.gamma_up;
    if (cfg.gamma_down) pr.lm.gamma_down = *cfg.gamma_down;
    if (cfg.mu_max) pr.lm.mu_max = *cfg.mu_max;
    if (cfg.mu_min) pr.lm.mu_min = *cfg.mu_min;
    if (cfg.eta) pr.lm.eta = *cfg.eta;
    pr.lm.validate();

    rc.model = model_for(pr, rc.variant);
    rc.n_r = cfg.points_r.value_or(pr.n_collocation);
    rc.n_ic = cfg.points_ic.value_or(pr.n_ic);
    rc.n_bc = cfg.points_bc.value_or(pr.n_bc);
    rc.iterations = cfg.iters.value_or(pr.iterations);
    if (rc.iterations < 1) throw Error("config: iters must be >= 1");
    rc.lm = pr.lm;
    rc.adam.lr = cfg.lr;
    rc.adam.decay_rate = cfg.decay_rate;
    rc.adam.warmup = cfg.warmup;
    rc.adam.decay_step = cfg.decay_step;

    rc.cfg = cfg;
    rc.cfg.iters = rc.iterations;
    rc.cfg.points_r = rc.n_r;
    rc.cfg.points_ic = rc.n_ic;
    rc.cfg.points_bc = rc.n_bc;
    rc.cfg.lambda_r = pr.lambda_r;
    rc.cfg.lambda_b = pr.lambda_b;
    rc.cfg.lambda_ic = pr.lambda_ic;
    rc.cfg.mu0 = pr.lm.mu0;
    rc.cfg.gamma_up = pr.lm.gamma_up;
    rc.cfg.gamma_down = pr.lm.gamma_down;
    rc.cfg.mu_max = pr.lm.mu_max;
    rc.cfg.mu_min = pr.lm.mu_min;
    rc.cfg.eta = pr.lm.eta;
    return rc;
}

std::string manifest_body(const ResolvedConfig& rc) {
    const TrainConfig& c = rc.cfg;
    std::ostringstream os;
    os << "problem = " << c.problem << "\n";
    os << "model = " << c.model << "\n";
    os << "optimizer = " << c.optimizer << "\n";
    os << "seed = " << c.seed << "\n";
    os << "iters = " << *c.iters << "\n";
    os << "points_r = " << *c.points_r << "\n";
    os << "points_ic = " << *c.points_ic << "\n";
    os << "points_bc = " << *c.points_bc << "\n";
    os << "lambda_r = " << fmt_double(*c.lambda_r) << "\n";
    os << "lambda_b = " << fmt_double(*c.lambda_b) << "\n";
    os << "lambda_ic = " << fmt_double(*c.lambda_ic) << "\n";
    os << "mu0 = " << fmt_double(*c.mu0) << "\n";
    os << "gamma_up = " << fmt_double(*c.gamma_up) << "\n";
    os << "gamma_down = " << fmt_double(*c.gamma_down) << "\n";
    os << "mu_max = " << fmt_double(*c.mu_max) << "\n";
    os << "mu_min = " << fmt_double(*c.mu_min) << "\n";
    os << "eta = " << fmt_double(*c.eta) << "\n";
    os << "resample_factor = "
       << (std::isinf(c.resample_factor) ? "inf" : fmt_double(c.resample_factor)) << "\n";
    os << "val_cadence = " << c.val_cadence << "\n";
    if (!c.grid.empty()) os << "grid = " << c.grid << "\n";
    os << "threads = " << c.threads << "\n";
    if (c.optimizer == "adam") {
        os << "lr = " << fmt_double(c.lr) << "\n";
        os << "decay_rate = " << fmt_double(c.decay_rate) << "\n";
        os << "warmup = " << c.warmup << "\n";
        os << "decay_step = " << c.decay_step << "\n";
    }
    return os.str();
}

}  // namespace tinn
