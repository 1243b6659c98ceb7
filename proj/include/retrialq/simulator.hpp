#pragma once

#include "retrialq/linalg.hpp"
#include "retrialq/model.hpp"
#include "retrialq/qbd_solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace retrialq {

/// Discrete-event simulation settings. The horizon is an event count unless
/// time_horizon > 0. Random numbers come from std::mt19937_64 (the standard
/// fixes its output sequence); a uniform on (0,1) is ((x >> 11) + 0.5) * 2^-53.
struct SimConfig {
  ModelParams params;
  std::uint64_t events = 1'000'000;
  double time_horizon = 0.0;
  std::uint64_t seed = 1;
  double warmup = 0.1;
  int batches = 20;
  int jcap = 1000;
};

struct EventCounts {
  std::uint64_t arrival_accept = 0;
  std::uint64_t arrival_orbit = 0;  ///< free server, sent to orbit
  std::uint64_t arrival_blocked_orbit = 0;
  std::uint64_t arrival_balk = 0;
  std::uint64_t arrival_blocked_balk = 0;
  std::uint64_t retrial_success = 0;
  std::uint64_t retrial_abandon = 0;  ///< free server, orbit customer leaves
  std::uint64_t retrial_blocked = 0;  ///< blocked retrial, stays in orbit
  std::uint64_t retrial_blocked_abandon = 0;
  std::uint64_t service_repeat = 0;  ///< theta branch
  std::uint64_t service_leave = 0;
  std::uint64_t service_orbit = 0;

  std::uint64_t total() const;
  std::uint64_t orbit_joins() const { return arrival_orbit + arrival_blocked_orbit + service_orbit; }
  std::uint64_t orbit_departures() const { return retrial_success + retrial_abandon + retrial_blocked_abandon; }
};

struct SimResult {
  int s = 0;
  int jcap = 0;
  /// (jcap + 1) x (s + 1) time-average occupancy, row j, column i.
  Matrix estimate;
  Matrix half_width;
  EventCounts counts;  ///< after warmup
  double time = 0.0;   ///< simulated time after warmup
  /// Fraction of post-warmup time spent with j > jcap.
  double cap_fraction = 0.0;
  /// Time integral of j over blocked states (i = s) after warmup.
  double blocked_orbit_exposure = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t events = 0;

  double estimate_at(int i, int j) const;
};

/// Batch-means half-width multiplier: 0.975 quantile of Student t with b-1
/// degrees of freedom.
double t_quantile_975(int dof);

/// Throws Error("invalid-config") for batches < 10 or warmup outside
/// [0, 0.5], Error("cap-exceeded") when j > jcap for more than 0.1% of time.
SimResult simulate(const SimConfig& config);

/// Independent replications with distinct seeds, run on up to jobs threads
/// and merged by inverse-variance weighting.
SimResult simulate_replications(const SimConfig& config, const std::vector<std::uint64_t>& seeds, int jobs);

SimResult merge_replications(const std::vector<SimResult>& runs);

struct ComparisonReport {
  std::size_t cells = 0;   ///< cells with mass > 1e-6 on either side
  std::size_t within = 0;  ///< of those, |diff| <= 3 half-widths
  double fraction = 1.0;
  double tv = 0.0;  ///< total-variation distance on the common support
  double max_abs_z = 0.0;
  bool pass = true;
};

ComparisonReport compare(const SimResult& sim, const StationaryDistribution& dist);

/// CSV with header "i,j,estimate,half_width", 17 significant digits; cells
/// with zero estimate and zero half-width are omitted.
void write_occupancy_csv(std::ostream& out, const SimResult& sim);

/// Reads the four-column occupancy CSV, or a three-column "i,j,probability"
/// file (half-widths zero). Lines starting with '#' are skipped.
SimResult read_occupancy_csv(std::istream& in);

}  // namespace retrialq
