#pragma once

// Reference computations for the tests. None of these use the library's
// block construction, generating functions or closed forms.

#include "retrialq/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;

/// Stationary distribution of the CTMC truncated at orbit size jt (jumps
/// above jt are dropped), built from the transition rules and solved by
/// dense LU. Row j, column i.
Matrix dense_ctmc(const retrialq::ModelParams& m, int jt);

/// Classic single-server pmf through log-gamma:
///   pi_{0,j} = (1-rho)^{lt+1} rho^j Gamma(lt+j) / (Gamma(lt) j!)
///   pi_{1,j} = (1-rho)^{lt+1} rho^{j+1} Gamma(lt+1+j) / (Gamma(lt+1) j!)
double classic_pi0(double rho, double lt, int j);
double classic_pi1(double rho, double lt, int j);

/// Erlang loss occupancy pi_i proportional to a^i / i!, i = 0..s.
std::vector<double> erlang_loss(int s, double a);

/// Truncated dense solve of a Markov-modulated infinite-server queue with
/// phase generator B, arrival rates a and per-customer departure rates c.
/// Returns the level-phase matrix (rows = customers 0..n).
Matrix mmoo_dense(const std::vector<double>& a, const Matrix& B, const std::vector<double>& c, int n);

/// p(z) per phase from a level-phase matrix.
Eigen::RowVectorXd series_at(const Matrix& levels, double z);

struct Sampler {
  explicit Sampler(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  std::mt19937_64 gen;
};

/// Random valid parameters with xi (or the load for ab > 0) at most xi_max.
retrialq::ModelParams random_params(Sampler& rng, int s, bool persistent, double xi_max = 0.9);

/// Random s = 1 persistent instance with pb, tht, pt_a, theta free.
retrialq::ModelParams random_s1(Sampler& rng, double xi_max = 0.9);

/// Random s = 2 pure-retrial instance (p = p_a = 1, tht = pt_a = ab = 0).
retrialq::ModelParams random_s2_pure(Sampler& rng, double xi_max = 0.85);

/// Random persistent Okubo instance (ab = tht = pt_a = 0, p_a = 1).
retrialq::ModelParams random_okubo(Sampler& rng, int s, double xi_max = 0.9);

}  // namespace oracle
