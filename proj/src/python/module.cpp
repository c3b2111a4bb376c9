#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tinn/evalreport.hpp"
#include "tinn/oracles.hpp"
#include "tinn/trainer.hpp"

namespace py = pybind11;
using namespace tinn;

namespace {

ModelSpec spec_for(const std::string& problem, const std::string& variant) {
    return model_for(problem_by_name(problem), variant_from_name(variant));
}

SpaceTimePoint mkpoint(double x, double y, double t) {
    SpaceTimePoint p;
    p.x = x;
    p.y = y;
    p.t = t;
    return p;
}

py::dict jet_dict(const Jet& j) {
    py::dict d;
    d["u"] = j.u;
    d["ux"] = j.ux;
    d["uxx"] = j.uxx;
    d["uxxx"] = j.uxxx;
    d["uy"] = j.uy;
    d["uyy"] = j.uyy;
    d["ut"] = j.ut;
    d["utt"] = j.utt;
    return d;
}

py::dict eval_dict(const EvalResult& r) {
    py::dict d;
    d["problem"] = r.problem;
    d["variant"] = r.variant;
    d["reference"] = r.reference;
    d["rel_l2"] = r.rel_l2;
    d["n_test"] = r.n_test;
    d["params"] = r.params;
    d["seed"] = r.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_tinn, m) {
    m.doc() = "Mesh-free PDE solving with time-induced neural networks";

    py::register_exception<Error>(m, "TinnError");

    m.def("problem_names", [] { return problem_names(); });
    m.def(
        "param_count",
        [](const std::string& problem, const std::string& variant) {
            return param_count(spec_for(problem, variant));
        },
        py::arg("problem"), py::arg("variant") = "tinn");
    m.def(
        "init_params",
        [](const std::string& problem, const std::string& variant, std::uint64_t seed) {
            return init(spec_for(problem, variant), seed);
        },
        py::arg("problem"), py::arg("variant") = "tinn", py::arg("seed") = 0);
    m.def(
        "forward",
        [](const std::string& problem, const std::string& variant, const Vector& psi, double x,
           double y, double t) { return forward(spec_for(problem, variant), psi, mkpoint(x, y, t)); },
        py::arg("problem"), py::arg("variant"), py::arg("psi"), py::arg("x"), py::arg("y"),
        py::arg("t"));
    m.def(
        "eval_jet",
        [](const std::string& problem, const std::string& variant, const Vector& psi, double x,
           double y, double t, int x_order, int y_order, int t_order) {
            return jet_dict(eval_jet(spec_for(problem, variant), psi, mkpoint(x, y, t),
                                     DerivRequest{x_order, y_order, t_order}));
        },
        py::arg("problem"), py::arg("variant"), py::arg("psi"), py::arg("x"), py::arg("y"),
        py::arg("t"), py::arg("x_order") = 2, py::arg("y_order") = 0, py::arg("t_order") = 1);
    m.def(
        "fd_validate_pde",
        [](const std::string& problem, const std::string& variant, const Vector& psi, double x,
           double y, double t) {
            const Problem pr = problem_by_name(problem);
            return fd_validate(spec_for(problem, variant), psi, mkpoint(x, y, t), pr.pde);
        },
        py::arg("problem"), py::arg("variant"), py::arg("psi"), py::arg("x"), py::arg("y"),
        py::arg("t"));

    m.def("burgers_reference", &burgers_reference, py::arg("x"), py::arg("t"),
          py::arg("nodes") = 128);
    m.def(
        "spectral_reference",
        [](const std::string& problem, int modes, double dt, const std::vector<double>& x_out,
           const std::vector<double>& t_out) {
            const SolutionGrid g = spectral_reference(problem, modes, dt, x_out, t_out);
            py::dict d;
            d["x"] = g.x_grid;
            d["t"] = g.t_grid;
            d["values"] = g.values;
            return d;
        },
        py::arg("problem"), py::arg("modes"), py::arg("dt"), py::arg("x_out"), py::arg("t_out"));

    m.def("relative_l2", &relative_l2, py::arg("pred"), py::arg("ref"));
    m.def("acc_imp", &acc_imp, py::arg("e_baseline"), py::arg("e_tinn"));

    m.def(
        "train",
        [](const py::dict& options, const std::string& out_dir) {
            TrainConfig cfg;
            for (auto item : options)
                apply_kv(cfg, py::cast<std::string>(item.first),
                         py::cast<std::string>(py::str(item.second)));
            const TrainOutcome out = train(cfg, out_dir);
            py::dict d;
            d["final_loss"] = out.final_loss;
            d["resample_events"] = out.resample_events;
            d["runtime_seconds"] = out.runtime_seconds;
            d["checkpoint"] = out.checkpoint_path;
            d["history"] = out.history_path;
            d["manifest"] = out.manifest_path;
            return d;
        },
        py::arg("options"), py::arg("out_dir"));
    m.def(
        "evaluate_checkpoint",
        [](const std::string& path, const std::string& problem, const std::string& grid,
           int n_test, std::uint64_t seed) {
            EvalOptions opt;
            opt.grid_path = grid;
            opt.n_test = n_test;
            opt.seed = seed;
            return eval_dict(evaluate(load_checkpoint(path), problem_by_name(problem), opt));
        },
        py::arg("path"), py::arg("problem"), py::arg("grid") = "", py::arg("n_test") = 10000,
        py::arg("seed") = 0xE7A1u);
}
