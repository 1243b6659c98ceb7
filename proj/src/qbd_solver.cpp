#include "retrialq/qbd_solver.hpp"

#include "retrialq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace retrialq {

std::size_t RLadder::contraction_index() const {
  std::size_t idx = R.size() + 1;
  for (std::size_t k = R.size(); k >= 1; --k) {
    Eigen::EigenSolver<Matrix> es(R[k - 1], false);
    if (es.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) break;
    idx = k;
  }
  return idx;
}

RLadder r_ladder(const QbdBlocks& b, std::size_t J) {
  if (J < 1) throw Error("invalid-argument", "truncation level must be >= 1");
  RLadder ladder;
  ladder.R.assign(J, Matrix());
  const bool no_inflow = b.A.cwiseAbs().maxCoeff() == 0.0;
  Matrix next = Matrix::Zero(b.n, b.n);  // R_{j+1}
  for (std::size_t j = J; j >= 1; --j) {
    if (no_inflow) {
      ladder.R[j - 1] = Matrix::Zero(b.n, b.n);
      continue;
    }
    const long jl = static_cast<long>(j);
    Matrix m = b.local(jl);
    if (j < J) m += next * b.down(jl + 1);
    Matrix r = b.A * checked_inverse(-m);
    ladder.R[j - 1] = r;
    next = std::move(r);
  }
  return ladder;
}

double StationaryDistribution::mean_orbit() const {
  double m = 0.0;
  for (Eigen::Index j = 0; j < pi.rows(); ++j) m += static_cast<double>(j) * pi.row(j).sum();
  return m;
}

namespace {

constexpr double kClampFloor = -1e-14;

/// Left null vector x of M (x M = 0) with x 1 = 1: one column of M is
/// replaced by ones, picking the replacement with the best conditioning.
RowVector boundary_vector(const Matrix& M) {
  const Eigen::Index n = M.rows();
  if (n == 1) return RowVector::Ones(1);
  double best_rc = -1.0;
  RowVector best;
  for (Eigen::Index k = 0; k < n; ++k) {
    Matrix Mk = M;
    Mk.col(k).setOnes();
    Eigen::PartialPivLU<Matrix> lu(Mk.transpose());
    const double rc = lu.rcond();
    if (rc > best_rc) {
      best_rc = rc;
      Vector rhs = Vector::Zero(n);
      rhs(k) = 1.0;
      best = lu.solve(rhs).transpose();
    }
  }
  if (!(best_rc > 1e-14)) throw Error("no-null-vector", "boundary system is rank deficient");
  return best;
}

}  // namespace

StationaryDistribution solve_truncated(const QbdBlocks& b, std::size_t J) {
  const RLadder ladder = r_ladder(b, J);
  Matrix boundary = b.local(0) + ladder.at(1) * b.down(1);
  RowVector pi0 = boundary_vector(boundary);

  StationaryDistribution d;
  d.J = J;
  d.pi = Matrix::Zero(static_cast<Eigen::Index>(J + 1), b.n);
  d.pi.row(0) = pi0;
  for (std::size_t j = 1; j <= J; ++j) {
    d.pi.row(static_cast<Eigen::Index>(j)) = d.pi.row(static_cast<Eigen::Index>(j - 1)) * ladder.at(j);
  }

  d.min_raw = d.pi.minCoeff();
  if (d.min_raw < kClampFloor) {
    throw Error("negative-probability", "solver produced entry " + std::to_string(d.min_raw));
  }
  for (Eigen::Index i = 0; i < d.pi.size(); ++i) {
    double& v = d.pi.data()[i];
    if (v < 0.0) {
      v = 0.0;
      ++d.clamped;
    }
  }

  d.captured_mass = d.pi.sum();
  d.pi /= d.captured_mass;
  d.normalized = true;
  const BalanceResidual res = balance_residual(b, d);
  d.residual = res.interior;
  d.boundary_residual = res.boundary;
  return d;
}

StationaryDistribution solve(const QbdBlocks& b, const SolverOptions& opts) {
  if (opts.J0 < 1) throw Error("invalid-argument", "J0 must be >= 1");
  StationaryDistribution prev = solve_truncated(b, opts.J0);
  std::size_t J = opts.J0;
  while (true) {
    if (J > opts.Jmax / 2) {
      throw Error("truncation-limit", "no convergence up to J = " + std::to_string(opts.Jmax));
    }
    J *= 2;
    StationaryDistribution cur = solve_truncated(b, J);
    const auto rows = prev.pi.rows();
    const double change = (cur.pi.topRows(rows) - prev.pi).cwiseAbs().maxCoeff();
    const double tail = cur.level_mass(cur.J);
    if (change < opts.eps && tail < opts.tail_eps) return cur;
    prev = std::move(cur);
  }
}

StationaryDistribution solve(const ModelParams& params, const SolverOptions& opts) {
  require_valid(params);
  const ErgodicityVerdict v = ergodicity(params);
  if (!v.ergodic()) {
    std::string msg = v.reason;
    if (v.z_r) msg += " (z_r = " + std::to_string(*v.z_r) + ")";
    throw Error("not-ergodic", msg);
  }
  StationaryDistribution d = solve(build_blocks(params), opts);
  if (v.z_r && params.ab == 0.0 && *v.z_r - 1.0 < 1e-3) {
    d.warnings.push_back("slow-mixing: z_r - 1 < 1e-3, truncation grows like 1/(z_r - 1)");
  }
  return d;
}

BalanceResidual balance_residual(const QbdBlocks& b, const StationaryDistribution& d) {
  BalanceResidual out;
  const auto last = static_cast<long>(d.J);
  for (long j = 0; j <= last; ++j) {
    RowVector row = d.pi.row(j) * b.local(j);
    if (j > 0) row += d.pi.row(j - 1) * b.up(j - 1);
    if (j < last) row += d.pi.row(j + 1) * b.down(j + 1);
    const double r = row.cwiseAbs().maxCoeff();
    if (j < last) {
      out.interior = std::max(out.interior, r);
    } else {
      out.boundary = r;
    }
  }
  return out;
}

StationaryDistribution distribution_from_levels(const Matrix& levels) {
  if (levels.rows() < 1) throw Error("invalid-argument", "empty level matrix");
  StationaryDistribution d;
  d.J = static_cast<std::size_t>(levels.rows() - 1);
  d.pi = levels;
  d.captured_mass = levels.sum();
  d.min_raw = levels.minCoeff();
  d.normalized = std::abs(d.captured_mass - 1.0) <= 1e-12;
  return d;
}

}  // namespace retrialq
