#include "retrialq/closed_form.hpp"
#include "retrialq/error.hpp"
#include "retrialq/genfun.hpp"
#include "retrialq/model.hpp"
#include "retrialq/qbd_solver.hpp"
#include "retrialq/simulator.hpp"
#include "retrialq/tail.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace retrialq;

namespace {

py::dict verdict_dict(const ErgodicityVerdict& v) {
  py::dict d;
  d["verdict"] = to_string(v.verdict);
  d["reason"] = v.reason;
  d["xi"] = v.xi ? py::cast(*v.xi) : py::none();
  d["z_r"] = v.z_r ? py::cast(*v.z_r) : py::none();
  d["hanschke"] = v.hanschke ? py::cast(*v.hanschke) : py::none();
  d["ergodic"] = v.ergodic();
  return d;
}

py::dict fit_dict(const PowerGeometricFit& f) {
  py::dict d;
  d["eta"] = f.eta;
  d["beta"] = f.beta;
  d["log_c"] = f.log_c;
  d["residual"] = f.residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "retrialq core bindings";

  static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, (e.code() + ": " + e.what()).c_str());
    }
  });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &ModelParams::lambda)
      .def_readwrite("mu", &ModelParams::mu)
      .def_readwrite("nu", &ModelParams::nu)
      .def_readwrite("s", &ModelParams::s)
      .def_readwrite("K", &ModelParams::K)
      .def_readwrite("p_a", &ModelParams::p_a)
      .def_readwrite("pt_a", &ModelParams::pt_a)
      .def_readwrite("pb_a", &ModelParams::pb_a)
      .def_readwrite("at_0", &ModelParams::at_0)
      .def_readwrite("p", &ModelParams::p)
      .def_readwrite("pb", &ModelParams::pb)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("ab", &ModelParams::ab)
      .def_readwrite("theta", &ModelParams::theta)
      .def_readwrite("thb", &ModelParams::thb)
      .def_readwrite("tht", &ModelParams::tht)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(lambda=" + std::to_string(p.lambda) + ", mu=" + std::to_string(p.mu) +
               ", nu=" + std::to_string(p.nu) + ", s=" + std::to_string(p.s) + ")";
      });

  m.def("classic_params", &classic_params, py::arg("lambda_"), py::arg("mu"), py::arg("nu"), py::arg("s") = 1);
  m.def(
      "validate",
      [](const ModelParams& p) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : validate(p).violations) out.emplace_back(v.field, v.message);
        return out;
      },
      "List of (field, message) violations; empty when valid.");
  m.def("ergodicity", [](const ModelParams& p) { return verdict_dict(ergodicity(p)); });

  py::class_<StationaryDistribution>(m, "StationaryDistribution")
      .def_readonly("J", &StationaryDistribution::J)
      .def_readonly("pi", &StationaryDistribution::pi, "Levels x phases probability matrix")
      .def_readonly("residual", &StationaryDistribution::residual)
      .def_readonly("captured_mass", &StationaryDistribution::captured_mass)
      .def_readonly("warnings", &StationaryDistribution::warnings)
      .def("total_mass", &StationaryDistribution::total_mass)
      .def("mean_orbit", &StationaryDistribution::mean_orbit)
      .def("phase_marginals", &StationaryDistribution::phase_marginals);

  m.def(
      "solve",
      [](const ModelParams& p, std::size_t J0, std::size_t Jmax, double eps) {
        SolverOptions o;
        o.J0 = J0;
        o.Jmax = Jmax;
        o.eps = eps;
        o.tail_eps = eps;
        return solve(p, o);
      },
      py::arg("params"), py::arg("J0") = 64, py::arg("Jmax") = std::size_t{1} << 20, py::arg("eps") = 1e-12);
  m.def(
      "solve_truncated", [](const ModelParams& p, std::size_t J) { return solve_truncated(build_blocks(p), J); },
      py::arg("params"), py::arg("J"));

  m.def(
      "ode_residual",
      [](const StationaryDistribution& d, const ModelParams& p, const std::string& variant, double z) {
        return ode_residual(d, p, variant_from_string(variant), z);
      },
      py::arg("dist"), py::arg("params"), py::arg("variant"), py::arg("z"));
  m.def(
      "det_V", [](const ModelParams& p, const std::string& v, double z) { return det_V(p, variant_from_string(v), z); },
      py::arg("params"), py::arg("variant"), py::arg("z"));
  m.def(
      "det_V_formula",
      [](const ModelParams& p, const std::string& v, double z) { return det_V_formula(p, variant_from_string(v), z); },
      py::arg("params"), py::arg("variant"), py::arg("z"));
  m.def("mmoo_moments", &mmoo_moments, py::arg("A"), py::arg("B"), py::arg("C"), py::arg("kmax"));

  m.def("s1_classic_pmf", &s1_classic_pmf_table, py::arg("params"), py::arg("n"));
  m.def(
      "s1_coefficients", [](const ModelParams& p, int n) { return s1_solution(p).coefficients(n); }, py::arg("params"),
      py::arg("n"));
  m.def(
      "s2_coefficients",
      [](const ModelParams& p, std::size_t n) {
        const S2Solution s = s2_solution(p, n);
        return std::make_tuple(s.q, s.p1, s.p2);
      },
      py::arg("params"), py::arg("n") = 128);

  m.def("analytic_singularity", [](const ModelParams& p) {
    const SingularityReport r = analytic_singularity(p);
    py::dict d;
    d["z_r"] = r.z_r;
    d["regime"] = to_string(r.regime);
    return d;
  });
  m.def(
      "fit_tail",
      [](const StationaryDistribution& d, std::optional<std::pair<std::size_t, std::size_t>> window) {
        std::optional<FitWindow> w;
        if (window) w = FitWindow{window->first, window->second};
        const TailEstimate t = fit_tail(d, w);
        py::dict out = fit_dict(t.level);
        py::list phases;
        for (const auto& ph : t.phases) phases.append(ph ? py::object(fit_dict(*ph)) : py::none());
        out["phases"] = phases;
        out["window"] = py::make_tuple(t.window.lo, t.window.hi);
        out["ratios"] = t.ratios;
        return out;
      },
      py::arg("dist"), py::arg("window") = py::none());

  py::class_<SimResult>(m, "SimResult")
      .def_readonly("estimate", &SimResult::estimate)
      .def_readonly("half_width", &SimResult::half_width)
      .def_readonly("time", &SimResult::time)
      .def_readonly("events", &SimResult::events)
      .def_readonly("cap_fraction", &SimResult::cap_fraction);

  m.def(
      "simulate",
      [](const ModelParams& p, std::uint64_t events, std::uint64_t seed, int jcap, int batches, double warmup) {
        SimConfig c;
        c.params = p;
        c.events = events;
        c.seed = seed;
        c.jcap = jcap;
        c.batches = batches;
        c.warmup = warmup;
        py::gil_scoped_release release;
        return simulate(c);
      },
      py::arg("params"), py::arg("events") = 1'000'000, py::arg("seed") = 1, py::arg("jcap") = 1000,
      py::arg("batches") = 20, py::arg("warmup") = 0.1);
  m.def("compare", [](const SimResult& s, const StationaryDistribution& d) {
    const ComparisonReport r = compare(s, d);
    py::dict out;
    out["cells"] = r.cells;
    out["within"] = r.within;
    out["fraction"] = r.fraction;
    out["tv"] = r.tv;
    out["pass"] = r.pass;
    return out;
  });
}
