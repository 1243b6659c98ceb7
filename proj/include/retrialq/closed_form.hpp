#pragma once

#include "retrialq/model.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace retrialq {

/// Exact single-server persistent solution
///   q(z) = c u^{-lbar} exp(-(lt pt_a / r) u),  p(z) = (lambda/mu)(sigma - pb pt_a) q(z) / u(z),
/// u(z) = thb + pb tht - r (z - pb),  r = lambda_ob / mu,  sigma = p_a + pt_a,
/// lbar = lt (sigma - pb pt_a)(1 + tht / r).
struct S1Solution {
  double r = 0.0;
  double sigma = 1.0;
  double a = 0.0;  ///< u(0) = thb + pb tht + r pb
  double z_r = 0.0;  ///< root of u, a / r
  double lambda_bar = 0.0;
  double lt_pta = 0.0;  ///< lt * pt_a
  double p_factor = 0.0;  ///< (lambda/mu)(sigma - pb pt_a)
  double log_c = 0.0;  ///< log of the normalization constant c

  double u(double z) const { return a - r * z; }
  /// (q(z), p(z)); requires z < z_r.
  std::pair<double, double> value(double z) const;
  /// (q'(z), p'(z)).
  std::pair<double, double> derivative(double z) const;
  /// First n Taylor coefficients of q and p by series composition.
  std::pair<std::vector<double>, std::vector<double>> coefficients(int n) const;
};

/// Requires s = 1, ab = 0, nu > 0, lambda_ob > 0 and xi < 1; otherwise
/// throws Error("not-applicable").
S1Solution s1_solution(const ModelParams& params);

/// (pi_{0,j}, pi_{1,j}) of the classic model (p = p_a = thb = at_0 = 1, ab = 0):
///   (1-rho)^{lt+1} (rho^j (lt)_j / j!, rho^{j+1} (lt+1)_j / j!).
std::pair<double, double> s1_classic_pmf(const ModelParams& params, int j);
/// Same for j = 0..n-1.
std::pair<std::vector<double>, std::vector<double>> s1_classic_pmf_table(const ModelParams& params, int n);

struct S1Asymptotic {
  /// c a^{-lbar} (lbar)_j / j! z_r^{-j} and its companion for phase 1.
  std::pair<double, double> pre_limit;
  /// Same with (lbar)_j / j! replaced by j^{lbar-1} / Gamma(lbar).
  std::pair<double, double> power_limit;
  double decay = 0.0;  ///< 1 / z_r
};

S1Asymptotic s1_asymptotic(const ModelParams& params, int j);

/// s = 2 persistent pure-retrial solution (p = p_a = 1, tht = pt_a = 0) from
/// the Gauss series q(z) = c 2F1(a, b; c3; rho z) with a + b = 2 lt + mb,
/// a b = lt^2, c3 = lt + mb + 1 + mb rho; p_1 and p_2 follow from the
/// reduced system and the recovery row.
struct S2Solution {
  double rho = 0.0;  ///< lambda_ob / (2 mu thb)
  std::vector<double> q, p1, p2;  ///< normalized Taylor coefficients

  /// (p_0(z), p_1(z), p_2(z)); throws Error("series-divergence") when |rho z| >= 1 and
  /// Error("not-applicable") for |z| > 1.
  std::vector<double> value(double z) const;
};

/// Keeps at least min_terms coefficients and continues until the terms are
/// negligible on the unit disk. Throws Error("not-applicable") outside the
/// preconditions.
S2Solution s2_solution(const ModelParams& params, std::size_t min_terms = 128);

/// p_0(z) of the s = 2 solution.
double s2_hypergeometric(const ModelParams& params, double z);

}  // namespace retrialq
