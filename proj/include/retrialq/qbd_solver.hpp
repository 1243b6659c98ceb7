#pragma once

#include "retrialq/linalg.hpp"
#include "retrialq/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace retrialq {

/// R_1..R_J of the level-dependent QBD, pi_j = pi_{j-1} R_j.
struct RLadder {
  std::vector<Matrix> R;  ///< R[j-1] holds R_j

  std::size_t depth() const { return R.size(); }
  const Matrix& at(std::size_t j) const { return R.at(j - 1); }
  /// Smallest j such that every R_k with k >= j has spectral radius < 1
  /// (depth() + 1 when none qualifies).
  std::size_t contraction_index() const;
};

/// Backward matrix continued fraction with zero seed R_{J+1} = 0:
///   R_j = A (-(local_j + R_{j+1} down_{j+1}))^{-1},  j = J..1.
/// Throws Error("singular-block") when a block cannot be inverted.
RLadder r_ladder(const QbdBlocks& blocks, std::size_t J);

struct SolverOptions {
  std::size_t J0 = 64;
  std::size_t Jmax = std::size_t{1} << 20;
  double eps = 1e-12;
  double tail_eps = 1e-12;
};

struct StationaryDistribution {
  std::size_t J = 0;
  /// Row j is the level vector pi_j (length s+1).
  Matrix pi;
  /// Mass sum_j pi_j 1 before normalization, with pi_0 scaled to unit mass.
  double captured_mass = 0.0;
  /// max over levels 0..J-1 of the sup-norm of the balance rows.
  double residual = 0.0;
  /// Same for the truncation level J alone.
  double boundary_residual = 0.0;
  bool normalized = false;
  /// Entries in (-1e-14, 0) clamped to zero, and the most negative raw value.
  std::size_t clamped = 0;
  double min_raw = 0.0;
  std::vector<std::string> warnings;

  int phases() const { return static_cast<int>(pi.cols()); }
  RowVector level(std::size_t j) const { return pi.row(static_cast<Eigen::Index>(j)); }
  double level_mass(std::size_t j) const { return pi.row(static_cast<Eigen::Index>(j)).sum(); }
  double total_mass() const { return pi.sum(); }
  /// Phase marginals p_i(1).
  RowVector phase_marginals() const { return pi.colwise().sum(); }
  /// sum_j j * (level j mass).
  double mean_orbit() const;
};

/// Solution for a single fixed truncation level J (no adaptivity).
StationaryDistribution solve_truncated(const QbdBlocks& blocks, std::size_t J);

/// Adaptive solve: J doubles from opts.J0 until the normalized distribution
/// moves by less than opts.eps and the mass at level J is below opts.tail_eps.
/// Throws Error("truncation-limit") past opts.Jmax, Error("no-null-vector")
/// on a rank anomaly at level 0.
StationaryDistribution solve(const QbdBlocks& blocks, const SolverOptions& opts = {});

/// Checks ergodicity first (Error("not-ergodic")), builds the blocks and
/// attaches a slow-mixing warning when z_r - 1 < 1e-3.
StationaryDistribution solve(const ModelParams& params, const SolverOptions& opts = {});

struct BalanceResidual {
  double interior = 0.0;  ///< levels 0..J-1
  double boundary = 0.0;  ///< level J
};

/// Sup-norm of pi_{j-1} up_{j-1} + pi_j local_j + pi_{j+1} down_{j+1}.
BalanceResidual balance_residual(const QbdBlocks& blocks, const StationaryDistribution& dist);

/// Wraps a caller-provided level matrix (rows = levels) as a normalized distribution.
StationaryDistribution distribution_from_levels(const Matrix& levels);

}  // namespace retrialq
