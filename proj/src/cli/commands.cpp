#include "commands.hpp"

#include "output.hpp"
#include "params_file.hpp"

#include "retrialq/error.hpp"
#include "retrialq/genfun.hpp"
#include "retrialq/qbd_solver.hpp"
#include "retrialq/reduction.hpp"
#include "retrialq/simulator.hpp"
#include "retrialq/tail.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace retrialq::cli {

using nlohmann::json;

int exit_code_for(const std::string& code) {
  if (code == "invalid-params" || code == "bad-param-file" || code == "unsupported-K" || code == "invalid-config") {
    return kInvalidParams;
  }
  if (code == "not-ergodic") return kNotErgodic;
  if (code == "truncation-limit" || code == "no-null-vector" || code == "singular-block" ||
      code == "negative-probability") {
    return kConvergence;
  }
  return kCheckFailed;
}

namespace {

json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

json verdict_json(const ErgodicityVerdict& v) {
  json j{{"verdict", to_string(v.verdict)}, {"reason", v.reason}, {"xi", optional_number(v.xi)},
         {"z_r", optional_number(v.z_r)}};
  j["hanschke"] = v.hanschke ? json(*v.hanschke) : json(nullptr);
  j["hanschke_disagrees"] = v.disagreement;
  return j;
}

json row_json(const RowVector& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

/// Loads and validates a parameter file, reporting problems on err.
std::optional<ParamFile> load_valid(const std::string& path, std::ostream& err) {
  try {
    ParamFile pf = load_param_file(path);
    const ValidationReport rep = validate(pf.params);
    if (!rep.ok()) {
      err << "invalid parameters: " << rep.summary() << '\n';
      return std::nullopt;
    }
    return pf;
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
    return std::nullopt;
  }
}

std::string not_ergodic_message(const ErgodicityVerdict& v) {
  std::ostringstream msg;
  msg << std::setprecision(10) << "not ergodic: " << v.reason;
  if (v.z_r) msg << "; z_r = " << *v.z_r;
  if (v.xi) msg << "; xi = " << *v.xi;
  return msg.str();
}

}  // namespace

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  const auto pf = load_valid(args.paramfile, err);
  if (!pf) return kInvalidParams;
  const ModelParams& m = pf->params;
  ErgodicityVerdict verdict;
  StationaryDistribution dist;
  try {
    verdict = ergodicity(m);
    if (!verdict.ergodic()) {
      err << not_ergodic_message(verdict) << '\n';
      return kNotErgodic;
    }
    SolverOptions opts;
    opts.Jmax = args.jmax;
    opts.eps = args.eps;
    opts.tail_eps = args.eps;
    dist = solve(m, opts);
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }

  Manifest manifest("solve", args.out);
  manifest.record()["params"] = params_to_json(m);
  manifest.record()["seed"] = nullptr;
  manifest.record()["tolerances"] = {{"eps", args.eps}, {"tail_eps", args.eps}, {"jmax", args.jmax}};

  {
    std::ofstream csv(manifest.path("distribution.csv"));
    csv << manifest_comment() << '\n';
    write_distribution_csv(csv, dist);
  }
  manifest.add_output("distribution.csv");

  const RowVector marg = dist.phase_marginals();
  json summary{{"schema", "retrialq.summary/1"},
               {"manifest", kManifestName},
               {"params", params_to_json(m)},
               {"J", dist.J},
               {"total_mass", dist.total_mass()},
               {"captured_mass", dist.captured_mass},
               {"phase_marginals", row_json(marg)},
               {"mean_orbit", dist.mean_orbit()},
               {"blocking_probability", marg(m.s)},
               {"residual", dist.residual},
               {"boundary_residual", dist.boundary_residual},
               {"clamped_entries", dist.clamped},
               {"z_r", optional_number(verdict.z_r)},
               {"xi", optional_number(verdict.xi)},
               {"ergodicity", verdict_json(verdict)},
               {"warnings", dist.warnings}};
  write_json_file(manifest.path("summary.json"), summary);
  manifest.add_output("summary.json");
  manifest.write();
  for (const auto& w : dist.warnings) err << "warning: " << w << '\n';
  out << std::setprecision(10) << "J = " << dist.J << ", mean orbit = " << dist.mean_orbit()
      << ", blocking = " << marg(m.s) << ", residual = " << dist.residual << '\n';
  return kOk;
}

namespace {

class CheckList {
 public:
  void add(const std::string& name, double value, double tol, const std::string& note = "") {
    const bool pass = std::isfinite(value) && value <= tol;
    all_pass_ = all_pass_ && pass;
    items_.push_back({{"name", name}, {"status", pass ? "pass" : "fail"}, {"value", value}, {"tolerance", tol},
                      {"note", note}});
  }
  void skip(const std::string& name, const std::string& why) {
    items_.push_back({{"name", name}, {"status", "skipped"}, {"value", nullptr}, {"tolerance", nullptr},
                      {"note", "skipped (" + why + ")"}});
  }
  void error(const std::string& name, const Error& e) {
    all_pass_ = false;
    items_.push_back({{"name", name}, {"status", "fail"}, {"value", nullptr}, {"tolerance", nullptr},
                      {"note", e.code() + std::string(": ") + e.what()}});
  }
  json to_json() const { return {{"checks", items_}, {"all_pass", all_pass_}}; }

 private:
  json items_ = json::array();
  bool all_pass_ = true;
};

std::vector<double> sample_points(std::uint64_t seed, int n, double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::vector<double> z;
  for (int k = 0; k < n; ++k) z.push_back(lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53));
  return z;
}

double det_error(const ModelParams& m, SystemVariant variant, bool corrupt) {
  double worst = 0.0;
  const PolyMatrixSystem sys = build_system(m, variant, true);
  for (double z : sample_points(20240501, 20, 0.05, 1.95)) {
    Matrix V = sys.V(z);
    if (corrupt) V(V.rows() - 1, V.cols() - 1) += 1e-6;
    const double f = det_V_formula(m, variant, z);
    worst = std::max(worst, std::abs(V.determinant() - f) / std::max(1.0, std::abs(f)));
  }
  return worst;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

json run_checks(const ModelParams& m, bool corrupt) {
  require_valid(m);
  CheckList checks;
  const bool persistent = m.ab == 0.0;

  for (auto variant : {SystemVariant::Full, SystemVariant::Simplified}) {
    const std::string name = "det_v_" + to_string(variant);
    try {
      checks.add(name, det_error(m, variant, corrupt), 1e-12, "max relative error at 20 points");
    } catch (const Error& e) {
      checks.error(name, e);
    }
  }
  if (!persistent) {
    checks.skip("det_v_reduced", "not persistent");
  } else {
    try {
      const ReducedSystem red = reduce_persistent(m);
      double worst = 0.0;
      for (double z : sample_points(20240502, 20, 0.05, 1.95)) {
        Matrix V = red.V(z);
        if (corrupt) V(V.rows() - 1, V.cols() - 1) += 1e-6;
        const double f = det_V_formula(m, SystemVariant::Reduced, z);
        worst = std::max(worst, std::abs(V.determinant() - f) / std::max(1.0, std::abs(f)));
      }
      checks.add("det_v_reduced", worst, 1e-12, "max relative error at 20 points");
    } catch (const Error& e) {
      checks.skip("det_v_reduced", e.what());
    }
  }

  std::optional<OkuboSystem> okubo;
  std::string okubo_skip = persistent ? "not of Okubo type" : "not persistent";
  if (persistent) {
    try {
      okubo = okubo_form(m);
    } catch (const Error& e) {
      okubo_skip = e.what();
    }
  }
  if (okubo) {
    const int s = okubo->s;
    const Matrix N = okubo->T - okubo->pbar * Matrix::Identity(s, s);
    Matrix Nk = Matrix::Identity(s, s);
    for (int k = 1; k < s; ++k) Nk = Nk * N;
    const Matrix lhs = Nk * N, rhs = okubo->rho_tilde * Nk;
    checks.add("okubo_power_identity", (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff()),
               1e-12, "(T - pbar I)^s = rho_tilde (T - pbar I)^{s-1}");

    std::vector<double> got, want(static_cast<size_t>(s - 1), okubo->pbar);
    want.push_back(okubo->pbar + okubo->rho_tilde);
    for (const auto& b : okubo->jordan_structure()) {
      for (int k = 0; k < b.algebraic_multiplicity; ++k) got.push_back(b.eigenvalue);
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    double spectrum_gap = got.size() == want.size() ? 0.0 : std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < std::min(got.size(), want.size()); ++k) spectrum_gap = std::max(spectrum_gap, std::abs(got[k] - want[k]));
    checks.add("okubo_spectrum", spectrum_gap, 1e-10, "spectrum {pbar, pbar + rho_tilde}");

    Matrix erlang = okubo->U;
    erlang(s - 1, s - 1) += okubo->lt;
    checks.add("okubo_erlang_rows", erlang.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12,
               "U plus the loss corner has zero row sums");

    if (s >= 3) {
      const OkuboSystem st = standardize(*okubo);
      const ResolventDecomposition dec = resolvent_decomposition(st);
      double worst = 0.0;
      for (double f : sample_points(20240503, 10, 0.1, 3.0)) {
        const double y = f * st.rho_tilde + 0.37;
        const Matrix dense = (y * Matrix::Identity(s, s) - st.T).inverse();
        const Matrix ur = st.U * dense;
        worst = std::max(worst, (okubo_resolvent(st, y) - dense).cwiseAbs().maxCoeff() /
                                    std::max(1.0, dense.cwiseAbs().maxCoeff()));
        worst = std::max(worst, (dec.evaluate(y) - ur).cwiseAbs().maxCoeff() / std::max(1.0, ur.cwiseAbs().maxCoeff()));
      }
      checks.add("resolvent_identity", worst, 1e-10, "partial fractions against dense inverse at 10 points");
    } else {
      checks.skip("resolvent_identity", "needs s >= 3");
    }
  } else {
    for (const char* name : {"okubo_power_identity", "okubo_spectrum", "okubo_erlang_rows", "resolvent_identity"}) {
      checks.skip(name, okubo_skip);
    }
  }

  const ErgodicityVerdict verdict = ergodicity(m);
  if (!verdict.ergodic()) {
    for (const char* name : {"balance_residual", "total_mass", "ode_full", "ode_simplified", "ode_reduced", "ode_okubo",
                             "bivariate"}) {
      checks.skip(name, "not ergodic");
    }
  } else {
    try {
      const StationaryDistribution d = solve(m);
      checks.add("balance_residual", d.residual, 1e-10, "sup-norm of pi Q below the truncation level");
      checks.add("total_mass", std::abs(d.total_mass() - 1.0), 1e-12);
      for (auto variant : {SystemVariant::Full, SystemVariant::Simplified}) {
        const auto res = ode_residual_grid(d, build_system(m, variant, true));
        checks.add("ode_" + to_string(variant), max_of(res), 1e-8, "z = 0.1..0.9");
      }
      if (persistent) {
        try {
          const ReducedSystem red = reduce_persistent(m);
          double worst = 0.0;
          for (int k = 1; k <= 9; ++k) worst = std::max(worst, reduced_residual(d, red, 0.1 * k));
          checks.add("ode_reduced", worst, 1e-8, "z = 0.1..0.9");
        } catch (const Error& e) {
          checks.skip("ode_reduced", e.what());
        }
      } else {
        checks.skip("ode_reduced", "not persistent");
      }
      if (okubo) {
        double worst = 0.0;
        for (int k = 1; k <= 9; ++k) worst = std::max(worst, okubo_residual(d, *okubo, 0.1 * k));
        checks.add("ode_okubo", worst, 1e-8, "z = 0.1..0.9");
      } else {
        checks.skip("ode_okubo", okubo_skip);
      }
      checks.add("bivariate", bivariate_residual(d, m, 0.5, 0.5), 1e-8, "(y, z) = (0.5, 0.5)");
    } catch (const Error& e) {
      checks.error("solve", e);
    }
  }
  json report = checks.to_json();
  report["schema"] = "retrialq.check/1";
  report["params"] = params_to_json(m);
  report["ergodicity"] = verdict_json(verdict);
  report["corrupted"] = corrupt;
  return report;
}

int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
  const auto pf = load_valid(args.paramfile, err);
  if (!pf) return kInvalidParams;
  json report;
  try {
    report = run_checks(pf->params, args.corrupt);
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  out << report.dump(2) << '\n';
  if (!args.out.empty()) write_json_file(args.out, report);
  return report["all_pass"].get<bool>() ? kOk : kCheckFailed;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> file) {
  if (flag) return *flag;
  if (const char* env = std::getenv("RETRIALQ_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error("bad-param-file", std::string("RETRIALQ_SEED is not an integer: ") + env);
  }
  return file.value_or(1);
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  const auto pf = load_valid(args.paramfile, err);
  if (!pf) return kInvalidParams;
  SimConfig cfg;
  cfg.params = pf->params;
  cfg.events = args.events;
  cfg.jcap = args.jcap;
  cfg.batches = args.batches;
  cfg.warmup = args.warmup;
  SimResult sim;
  std::vector<std::uint64_t> seeds;
  try {
    cfg.seed = resolve_seed(args.seed, pf->seed);
    for (int k = 0; k < std::max(1, args.replications); ++k) seeds.push_back(cfg.seed + static_cast<std::uint64_t>(k));
    sim = seeds.size() == 1 ? simulate(cfg) : simulate_replications(cfg, seeds, args.jobs);
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }

  Manifest manifest("simulate", args.out);
  manifest.record()["params"] = params_to_json(cfg.params);
  manifest.record()["seed"] = seeds;
  manifest.record()["tolerances"] = {{"events", cfg.events}, {"jcap", cfg.jcap}, {"batches", cfg.batches},
                                     {"warmup", cfg.warmup}};
  {
    std::ofstream csv(manifest.path("simulation.csv"));
    csv << manifest_comment() << '\n';
    write_occupancy_csv(csv, sim);
  }
  manifest.add_output("simulation.csv");
  const EventCounts& c = sim.counts;
  json counts{{"arrival_accept", c.arrival_accept},
              {"arrival_orbit", c.arrival_orbit},
              {"arrival_blocked_orbit", c.arrival_blocked_orbit},
              {"arrival_balk", c.arrival_balk},
              {"arrival_blocked_balk", c.arrival_blocked_balk},
              {"retrial_success", c.retrial_success},
              {"retrial_abandon", c.retrial_abandon},
              {"retrial_blocked", c.retrial_blocked},
              {"retrial_blocked_abandon", c.retrial_blocked_abandon},
              {"service_repeat", c.service_repeat},
              {"service_leave", c.service_leave},
              {"service_orbit", c.service_orbit}};
  json summary{{"schema", "retrialq.simulation/1"},
               {"manifest", kManifestName},
               {"params", params_to_json(cfg.params)},
               {"seeds", seeds},
               {"events", sim.events},
               {"time", sim.time},
               {"cap_fraction", sim.cap_fraction},
               {"counts", counts},
               {"orbit_joins", c.orbit_joins()},
               {"orbit_departures", c.orbit_departures()}};
  write_json_file(manifest.path("summary.json"), summary);
  manifest.add_output("summary.json");
  manifest.write();
  out << "events = " << sim.events << ", simulated time = " << sim.time << ", pi(0,0) = " << sim.estimate_at(0, 0)
      << " +- " << sim.half_width(0, 0) << '\n';
  return kOk;
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  ComparisonReport rep;
  try {
    const StationaryDistribution dist = read_distribution_file(args.dist_csv);
    std::ifstream in(args.sim_csv);
    if (!in) throw Error("io", "cannot read " + args.sim_csv);
    rep = compare(read_occupancy_csv(in), dist);
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
    return kInvalidParams;
  }
  json report{{"schema", "retrialq.compare/1"},
              {"cells", rep.cells},
              {"within", rep.within},
              {"fraction", rep.fraction},
              {"tv", rep.tv},
              {"max_abs_z", std::isfinite(rep.max_abs_z) ? json(rep.max_abs_z) : json(nullptr)},
              {"pass", rep.pass}};
  out << report.dump(2) << '\n';
  if (!args.out.empty()) write_json_file(args.out, report);
  return rep.pass ? kOk : kCheckFailed;
}

namespace {

FitWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error("bad-param-file", "window must be lo:hi");
  try {
    return {std::stoul(text.substr(0, colon)), std::stoul(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error("bad-param-file", "window must be lo:hi");
  }
}

json fit_json(const PowerGeometricFit& f) {
  return {{"eta", f.eta}, {"beta", f.beta}, {"log_c", f.log_c}, {"residual", f.residual}};
}

}  // namespace

int cmd_tail(const TailArgs& args, std::ostream& out, std::ostream& err) {
  const auto pf = load_valid(args.paramfile, err);
  if (!pf) return kInvalidParams;
  const ModelParams& m = pf->params;
  json report{{"schema", "retrialq.tail/1"}, {"params", params_to_json(m)}};
  try {
    std::optional<SingularityReport> sing;
    try {
      sing = analytic_singularity(m);
      report["z_r"] = sing->z_r;
      report["inverse_z_r"] = 1.0 / sing->z_r;
      report["regime"] = to_string(sing->regime);
    } catch (const Error& e) {
      report["z_r"] = nullptr;
      report["regime"] = e.code();
    }
    const ErgodicityVerdict v = ergodicity(m);
    if (!v.ergodic()) {
      err << not_ergodic_message(v) << '\n';
      out << report.dump(2) << '\n';
      return kNotErgodic;
    }
    StationaryDistribution d = solve(m);
    if (args.J > d.J) d = solve_truncated(build_blocks(m), args.J);
    std::optional<FitWindow> window;
    if (!args.window.empty()) window = parse_window(args.window);
    const TailEstimate t = fit_tail(d, window);
    report["J"] = d.J;
    report["window"] = {t.window.lo, t.window.hi};
    report["level"] = fit_json(t.level);
    json phases = json::array();
    for (const auto& p : t.phases) phases.push_back(p ? fit_json(*p) : json(nullptr));
    report["phases"] = phases;
    if (sing) {
      report["gap"] = std::abs(t.level.eta - 1.0 / sing->z_r);
      report["link"] = m.s <= 2 && m.ab == 0.0 ? "asserted (s <= 2)" : "diagnostic";
    }
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  out << report.dump(2) << '\n';
  return kOk;
}

int cmd_moments(const MomentsArgs& args, std::ostream& out, std::ostream& err) {
  json in;
  try {
    std::ifstream f(args.phasefile);
    if (!f) throw Error("bad-param-file", "cannot read " + args.phasefile);
    in = json::parse(f);
    const auto arrival = in.at("arrival").get<std::vector<double>>();
    const auto departure = in.at("departure").get<std::vector<double>>();
    const auto gen = in.at("generator").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(arrival.size());
    if (static_cast<Eigen::Index>(departure.size()) != n || static_cast<Eigen::Index>(gen.size()) != n) {
      throw Error("bad-param-file", "arrival, departure and generator sizes differ");
    }
    Matrix A = Matrix::Zero(n, n), B(n, n), C = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      A(k, k) = arrival[static_cast<size_t>(k)];
      C(k, k) = departure[static_cast<size_t>(k)];
      if (static_cast<Eigen::Index>(gen[static_cast<size_t>(k)].size()) != n) {
        throw Error("bad-param-file", "generator must be square");
      }
      for (Eigen::Index l = 0; l < n; ++l) B(k, l) = gen[static_cast<size_t>(k)][static_cast<size_t>(l)];
    }
    const auto moments = mmoo_moments(A, B, C, args.kmax);
    json ms = json::array(), totals = json::array();
    for (const auto& m : moments) {
      ms.push_back(row_json(m));
      totals.push_back(m.sum());
    }
    out << json{{"schema", "retrialq.moments/1"}, {"moments", ms}, {"total", totals}}.dump(2) << '\n';
  } catch (const json::exception& e) {
    err << "bad-param-file: " << e.what() << '\n';
    return kInvalidParams;
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
    return kInvalidParams;
  }
  return kOk;
}

namespace {

struct Vary {
  std::string key;
  double lo = 0.0, hi = 0.0;
  int n = 0;
};

Vary parse_vary(const std::string& text) {
  Vary v;
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw Error("bad-param-file", "--vary must be key=lo:hi:n");
  v.key = text.substr(0, eq);
  std::string rest = text.substr(eq + 1);
  std::replace(rest.begin(), rest.end(), ':', ' ');
  std::istringstream in(rest);
  in >> v.lo >> v.hi >> v.n;
  if (in.fail() || v.n < 1) throw Error("bad-param-file", "--vary must be key=lo:hi:n with n >= 1");
  return v;
}

struct SweepRow {
  double value = 0.0;
  std::string status = "ok";
  std::size_t J = 0;
  double mean_orbit = std::numeric_limits<double>::quiet_NaN();
  double blocking = std::numeric_limits<double>::quiet_NaN();
  double xi = std::numeric_limits<double>::quiet_NaN();
  double z_r = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  const auto pf = load_valid(args.paramfile, err);
  if (!pf) return kInvalidParams;
  Vary vary;
  try {
    vary = parse_vary(args.vary);
    ModelParams probe = pf->params;
    set_param(probe, vary.key, vary.lo);
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
    return kInvalidParams;
  }

  std::vector<SweepRow> rows(static_cast<size_t>(vary.n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < vary.n; k = next++) {
      SweepRow& row = rows[static_cast<size_t>(k)];
      row.value = vary.n == 1 ? vary.lo : vary.lo + (vary.hi - vary.lo) * k / (vary.n - 1);
      try {
        ModelParams m = pf->params;
        set_param(m, vary.key, row.value);
        const ErgodicityVerdict v = ergodicity(m);
        if (v.xi) row.xi = *v.xi;
        if (v.z_r) row.z_r = *v.z_r;
        const StationaryDistribution d = solve(m);
        row.J = d.J;
        row.mean_orbit = d.mean_orbit();
        row.blocking = d.phase_marginals()(m.s);
      } catch (const Error& e) {
        row.status = e.code();
      }
    }
  };
  const int jobs = std::clamp(args.jobs, 1, vary.n);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "index," << vary.key << ",status,J,mean_orbit,blocking,xi,z_r\n" << std::setprecision(17);
  for (size_t k = 0; k < rows.size(); ++k) {
    const SweepRow& r = rows[k];
    csv << k << ',' << r.value << ',' << r.status << ',' << r.J << ',' << r.mean_orbit << ',' << r.blocking << ','
        << r.xi << ',' << r.z_r << '\n';
  }
  if (args.out.empty()) {
    out << csv.str();
  } else {
    Manifest manifest("sweep", args.out);
    manifest.record()["params"] = params_to_json(pf->params);
    manifest.record()["vary"] = {{"key", vary.key}, {"lo", vary.lo}, {"hi", vary.hi}, {"n", vary.n}};
    manifest.record()["seed"] = nullptr;
    manifest.record()["tolerances"] = {{"eps", SolverOptions{}.eps}, {"jobs", jobs}};
    {
      std::ofstream f(manifest.path("sweep.csv"));
      f << manifest_comment() << '\n' << csv.str();
    }
    manifest.add_output("sweep.csv");
    manifest.write();
    out << "wrote " << manifest.path("sweep.csv") << '\n';
  }
  return kOk;
}

}  // namespace retrialq::cli
