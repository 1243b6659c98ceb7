#pragma once

#include "retrialq/linalg.hpp"
#include "retrialq/model.hpp"
#include "retrialq/qbd_solver.hpp"

#include <vector>

namespace retrialq {

/// Persistent (ab = 0) system in the first s unknowns p~ = (p_0, ..., p_{s-1}):
///   p~'(z) V(z) = p~(z) U(z),
///   V = V_{s-1} - kappa L,  U = U_{s-1} - kappa (lt pt_a L + tht mt l_1),
/// with p_s recovered from
///   (lt_ob + s tht mt) p_s = sum_i p_i' - sum_i (lt pt_a + i tht mt) p_i.
struct ReducedSystem {
  int s = 0;
  PolyMatrix V;
  PolyMatrix U;
  double kappa0 = 0.0;  ///< kappa(z) = kappa0 + kappa1 z
  double kappa1 = 0.0;
  RowVector recovery_weights;  ///< lt pt_a + i tht mt, i = 0..s-1
  double recovery_denominator = 0.0;

  double kappa(double z) const { return kappa0 + kappa1 * z; }
  /// p_s(z) from p~(z) and p~'(z).
  double recover_ps(const RowVector& p, const RowVector& dp) const;
};

/// Throws Error("not-persistent") when ab > 0 and Error("no-orbit-inflow")
/// when lambda_ob + s tht mu = 0.
ReducedSystem reduce_persistent(const ModelParams& params);

/// Sup-norm residual of the reduced system at z for a computed distribution.
double reduced_residual(const StationaryDistribution& dist, const ReducedSystem& sys, double z);

/// |p_s(z) from the recovery row - p_s(z) from the series|.
double recovery_error(const StationaryDistribution& dist, const ReducedSystem& sys, double z);

/// Matrix with ones in the last column.
Matrix last_column_ones(int s);
/// Matrix with 0, 1, ..., s-1 in the last column.
Matrix last_column_ramp(int s);
/// Shift matrix with ones on the superdiagonal.
Matrix upper_shift(int s);

struct JordanBlockInfo {
  double eigenvalue = 0.0;
  int algebraic_multiplicity = 0;
  std::vector<int> block_sizes;  ///< descending
};

/// p~'(z) (z I - T) = p~(z) U with constant T and U.
struct OkuboSystem {
  int s = 0;
  Matrix T;
  Matrix U;
  bool standardized = false;
  double pbar = 0.0;
  double p = 1.0;
  double rho_tilde = 0.0;  ///< last-column weight of T (rho-bar once standardized)
  double theta = 0.0;
  double thb = 1.0;
  double lt = 0.0;
  double mb = 0.0;  ///< mt * thb

  /// Regular singular point pbar + rho_tilde.
  double regular_point() const { return pbar + rho_tilde; }
  /// xi = p thb / rho_tilde + theta; unchanged by standardization.
  double xi() const { return p * thb / rho_tilde + theta; }
  /// Diagonal of the triangular T (its eigenvalues) with Jordan block sizes
  /// from rank tests of (T - e I)^k at tolerance 1e-10.
  std::vector<JordanBlockInfo> jordan_structure() const;
};

/// Requires ab = 0, tht = 0, pt_a = 0, p_a = 1; throws Error("not-okubo").
OkuboSystem okubo_form(const ModelParams& params);

/// Affine change y = (z - pbar)/p. Throws Error("pure-orbit") when p = 0.
OkuboSystem standardize(const OkuboSystem& sys);

/// Residual of p~'(z)(zI - T) - p~(z) U for a computed distribution
/// (unstandardized systems only).
double okubo_residual(const StationaryDistribution& dist, const OkuboSystem& sys, double z);

/// U (yI - T)^{-1} = (y - rho_bar)^{-1} D + sum_{k=1}^{s-1} y^{-k} D_k
/// for the standardized system, from the finite Neumann series terminated by
/// T^s = rho_bar T^{s-1}.
struct ResolventDecomposition {
  int s = 0;
  double rho_bar = 0.0;
  Matrix D;
  std::vector<Matrix> polar;  ///< polar[k-1] = D_k, coefficient of y^{-k}
  int poincare_rank_zero = 0;
  int poincare_rank_regular = 0;

  const Matrix& D1() const { return polar.at(0); }
  const Matrix& D2() const { return polar.at(1); }
  Matrix evaluate(double y) const;
};

/// Partial-fraction resolvent (yI - T)^{-1} of a standardized system.
Matrix okubo_resolvent(const OkuboSystem& sys, double y);

/// Throws Error("dimension") for s < 3 and Error("not-standardized").
ResolventDecomposition resolvent_decomposition(const OkuboSystem& sys);

}  // namespace retrialq
