#pragma once

#include "retrialq/linalg.hpp"
#include "retrialq/model.hpp"
#include "retrialq/qbd_solver.hpp"

#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace retrialq {

enum class SystemVariant { Full, Simplified, Reduced, Okubo };

std::string to_string(SystemVariant v);
SystemVariant variant_from_string(const std::string& name);

/// p'(z) V(z) = p(z) U(z) + pi_0 (inhom_const + z^{-1} inhom_inverse).
struct PolyMatrixSystem {
  SystemVariant variant = SystemVariant::Full;
  int dim = 0;
  PolyMatrix V;
  PolyMatrix U;
  /// Factor the generator-level matrices were divided by (nu, or 1 when unscaled).
  double scale = 1.0;
  /// Inhomogeneous term from a constant-retrial block C0; zero when C0 = 0.
  Matrix inhom_const;
  Matrix inhom_inverse;

  bool homogeneous() const;
};

/// Full system from QBD blocks: V = (z Ct - C)/scale,
/// U = (B - At - C0t + z A + z^{-1} C0)/scale, inhomogeneous pi_0 (C0t - z^{-1} C0)/scale.
PolyMatrixSystem full_system(const QbdBlocks& blocks, double scale);

/// Full or simplified system of the model, divided by nu when scaled.
/// Reduced and Okubo variants live in reduction.hpp; requesting them here
/// throws Error("unsupported-variant").
PolyMatrixSystem build_system(const ModelParams& params, SystemVariant variant, bool scaled = true);

/// Generating-function values p(z), p'(z) of a truncated distribution.
struct GfValue {
  std::complex<double> z;
  CRowVector p;
  CRowVector dp;
  /// Bound on the neglected tail: level-J mass times max(1, |z|^J).
  double tail_bound = 0.0;

  RowVector p_real() const { return p.real(); }
  RowVector dp_real() const { return dp.real(); }
};

/// Throws Error("divergence-risk") when |z| >= z_r.
GfValue eval_gf(const StationaryDistribution& dist, std::complex<double> z,
                double z_r = std::numeric_limits<double>::infinity());

/// Second derivative p''(z) of the truncated series (real z).
RowVector eval_gf_second(const StationaryDistribution& dist, double z);

/// Sup-norm of p'(z) V(z) - p(z) U(z) - inhomogeneous term.
double ode_residual(const StationaryDistribution& dist, const PolyMatrixSystem& sys, double z);
double ode_residual(const StationaryDistribution& dist, const ModelParams& params, SystemVariant variant,
                    double z);

/// Residuals on the fixed grid z = 0.1, 0.2, ..., 0.9.
std::vector<double> ode_residual_grid(const StationaryDistribution& dist, const PolyMatrixSystem& sys);

/// Both sides of the bivariate equation for phi(y, z) = sum_i y^i p_i(z):
///   nu (z - pb - p y) phi_z + nu y^s (pb - ab + z (ab - 1) + p y) p_s'
///     = lambda phi (pt_a z - p_a - pt_a + p_a y) + mu phi_y (thb + tht z - y (thb + tht))
///       + y^s (z (lambda_ob - lambda pt_a) - lambda_ob + lambda (p_a + pt_a) - lambda p_a y) p_s.
struct BivariateSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

BivariateSides bivariate_sides(const StationaryDistribution& dist, const ModelParams& params, double y,
                               double z);

/// The single-server-family equation of Falin and Templeton, valid for
/// p = p_a = thb = 1, at_0 = 1, ab = 0:
///   nu (z - y) phi_z - nu y^s (z - y) p_s' = lambda phi (y - 1) + mu phi_y (1 - y) + lambda y^s (z - y) p_s.
BivariateSides falin_sides(const StationaryDistribution& dist, const ModelParams& params, double y, double z);

double bivariate_residual(const StationaryDistribution& dist, const ModelParams& params, double y, double z);

/// Numeric determinant of V(z) of the full, simplified or reduced system.
double det_V(const ModelParams& params, SystemVariant variant, double z);

/// Closed forms: full abar (z - pb)^s (z - 1); simplified abar (z - pb)^s;
/// reduced (z - pb)^{s-1} (r/(r+tht)) (z - pb - rho_tilde (1 + (tht/thb) pb)).
/// Throws Error("undefined") for the reduced form when thb = 0.
double det_V_formula(const ModelParams& params, SystemVariant variant, double z);

struct Singularities {
  double pbar = 0.0;
  int pbar_multiplicity = 0;  ///< s - 1 in the reduced persistent system
  bool pbar_irregular = false;
  std::optional<double> z_r;  ///< dominant regular singularity
};

Singularities singularities(const ModelParams& params);

/// Factorial moments of a Markov-modulated M/M/infinity queue:
/// m_0 B = 0, m_0 1 = 1 and m_k (k C - B) = k m_{k-1} A.
/// A and C must be diagonal and nonnegative. Throws Error("singular-shift").
std::vector<RowVector> mmoo_moments(const Matrix& A, const Matrix& B, const Matrix& C, int kmax);

/// Coefficients (constant, j-slope) of the block recurrence obtained by
/// expanding p'(z)V(z) = p(z)U(z) + inhomogeneous term in powers of z:
///   pi_{j-1} prev + pi_j (cur0 + j cur1) + pi_{j+1} (next0 + j next1) = 0.
struct CoefficientRecurrence {
  Matrix prev;
  Matrix cur0, cur1;
  Matrix next0, next1;
  /// Level-0 row: pi_0 boundary_cur + pi_1 boundary_next = 0.
  Matrix boundary_cur, boundary_next;
};

CoefficientRecurrence expand_recurrence(const PolyMatrixSystem& sys);

}  // namespace retrialq
