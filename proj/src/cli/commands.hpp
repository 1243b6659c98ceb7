#pragma once

#include "retrialq/model.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace retrialq::cli {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kInvalidParams = 2,
  kNotErgodic = 3,
  kConvergence = 4,
};

/// Maps an Error code to the exit code of the failure class.
int exit_code_for(const std::string& error_code);

struct SolveArgs {
  std::string paramfile;
  std::size_t jmax = std::size_t{1} << 20;
  double eps = 1e-12;
  std::string out = "retrialq-out";
};
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);

struct CheckArgs {
  std::string paramfile;
  bool corrupt = false;  ///< adds 1e-6 to the last diagonal entry of V(z) in the determinant checks
  std::string out;       ///< optional report path
};
int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err);

/// Runs every applicable identity check; each entry carries name, status
/// ("pass", "fail" or "skipped"), value, tolerance and a note.
nlohmann::json run_checks(const ModelParams& params, bool corrupt = false);

struct SimulateArgs {
  std::string paramfile;
  std::optional<std::uint64_t> seed;
  std::uint64_t events = 1'000'000;
  int jcap = 1000;
  int batches = 20;
  double warmup = 0.1;
  int replications = 1;
  int jobs = 1;
  std::string out = "retrialq-sim";
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

/// Seed precedence: explicit flag, then RETRIALQ_SEED, then the parameter
/// file, then 1.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> file);

struct CompareArgs {
  std::string dist_csv;
  std::string sim_csv;
  std::string out;  ///< optional report path
};
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

struct TailArgs {
  std::string paramfile;
  std::size_t J = 0;   ///< 0: use the adaptive truncation
  std::string window;  ///< "lo:hi", empty for the default
};
int cmd_tail(const TailArgs& args, std::ostream& out, std::ostream& err);

struct MomentsArgs {
  std::string phasefile;
  int kmax = 3;
};
int cmd_moments(const MomentsArgs& args, std::ostream& out, std::ostream& err);

struct SweepArgs {
  std::string paramfile;
  std::string vary;  ///< key=lo:hi:n
  int jobs = 1;
  std::string out;  ///< directory; CSV goes to stdout when empty
};
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

}  // namespace retrialq::cli
