#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cli = retrialq::cli;

int main(int argc, char** argv) {
  CLI::App app{"Stationary analysis of Markovian multiserver retrial queues"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "retrialq 0.1.0");

  cli::SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Stationary distribution, summary and manifest");
  solve_cmd->add_option("paramfile", solve.paramfile, "Parameter file")->required();
  solve_cmd->add_option("--jmax", solve.jmax, "Largest truncation level")->capture_default_str();
  solve_cmd->add_option("--eps", solve.eps, "Convergence tolerance")->capture_default_str();
  solve_cmd->add_option("--out", solve.out, "Output directory")->capture_default_str();

  cli::CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Identity checks of the generating-function systems");
  check_cmd->add_option("paramfile", check.paramfile, "Parameter file")->required();
  check_cmd->add_flag("--corrupt", check.corrupt, "Perturb V(z) to exercise the determinant checks");
  check_cmd->add_option("--out", check.out, "Also write the JSON report to this file");

  cli::SimulateArgs sim;
  std::uint64_t seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Discrete-event simulation");
  sim_cmd->add_option("paramfile", sim.paramfile, "Parameter file")->required();
  auto* seed_opt = sim_cmd->add_option("--seed", seed, "Random seed (overrides RETRIALQ_SEED)");
  sim_cmd->add_option("--events", sim.events, "Number of events")->capture_default_str();
  sim_cmd->add_option("--jcap", sim.jcap, "Largest orbit size with stored occupancy")->capture_default_str();
  sim_cmd->add_option("--batches", sim.batches, "Batch count")->capture_default_str();
  sim_cmd->add_option("--warmup", sim.warmup, "Warmup fraction")->capture_default_str();
  sim_cmd->add_option("--replications", sim.replications, "Independent replications")->capture_default_str();
  sim_cmd->add_option("--jobs", sim.jobs, "Parallel replications")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output directory")->capture_default_str();

  cli::CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare a distribution with simulated occupancy");
  cmp_cmd->add_option("dist", cmp.dist_csv, "Distribution CSV")->required();
  cmp_cmd->add_option("sim", cmp.sim_csv, "Simulation (or distribution) CSV")->required();
  cmp_cmd->add_option("--out", cmp.out, "Also write the JSON report to this file");

  cli::TailArgs tail;
  auto* tail_cmd = app.add_subcommand("tail", "Dominant singularity and fitted tail decay");
  tail_cmd->add_option("paramfile", tail.paramfile, "Parameter file")->required();
  tail_cmd->add_option("--J", tail.J, "Truncation level (default: adaptive)");
  tail_cmd->add_option("--window", tail.window, "Fit window lo:hi");

  cli::MomentsArgs mom;
  auto* mom_cmd = app.add_subcommand("moments", "Factorial moments of a Markov-modulated infinite-server queue");
  mom_cmd->add_option("phasefile", mom.phasefile, "JSON with arrival, generator, departure")->required();
  mom_cmd->add_option("--kmax", mom.kmax, "Highest moment order")->capture_default_str();

  cli::SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve over a one-parameter grid");
  sweep_cmd->add_option("paramfile", sweep.paramfile, "Parameter file")->required();
  sweep_cmd->add_option("--vary", sweep.vary, "key=lo:hi:n")->required();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Concurrent solves")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "Output directory (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInvalidParams;
  }

  try {
    if (*solve_cmd) return cli::cmd_solve(solve, std::cout, std::cerr);
    if (*check_cmd) return cli::cmd_check(check, std::cout, std::cerr);
    if (*sim_cmd) {
      if (*seed_opt) sim.seed = seed;
      return cli::cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*cmp_cmd) return cli::cmd_compare(cmp, std::cout, std::cerr);
    if (*tail_cmd) return cli::cmd_tail(tail, std::cout, std::cerr);
    if (*mom_cmd) return cli::cmd_moments(mom, std::cout, std::cerr);
    if (*sweep_cmd) return cli::cmd_sweep(sweep, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kCheckFailed;
  }
  return cli::kCheckFailed;
}
