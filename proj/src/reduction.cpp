#include "retrialq/reduction.hpp"

#include "retrialq/error.hpp"
#include "retrialq/genfun.hpp"

#include <algorithm>
#include <cmath>

namespace retrialq {

Matrix last_column_ones(int s) {
  Matrix L = Matrix::Zero(s, s);
  L.col(s - 1).setOnes();
  return L;
}

Matrix last_column_ramp(int s) {
  Matrix L = Matrix::Zero(s, s);
  for (int i = 0; i < s; ++i) L(i, s - 1) = i;
  return L;
}

Matrix upper_shift(int s) {
  Matrix T = Matrix::Zero(s, s);
  for (int i = 0; i + 1 < s; ++i) T(i, i + 1) = 1.0;
  return T;
}

double ReducedSystem::recover_ps(const RowVector& p, const RowVector& dp) const {
  return (dp.head(s).sum() - p.head(s).dot(recovery_weights)) / recovery_denominator;
}

ReducedSystem reduce_persistent(const ModelParams& m) {
  require_valid(m);
  if (m.ab != 0.0) throw Error("not-persistent", "dimension reduction requires ab = 0");
  if (!(m.nu > 0.0)) throw Error("zero-nu", "reduced system requires nu > 0");
  const int s = m.s;
  const double smu = s * m.mu;
  const double inflow = m.lambda_ob() + smu * m.tht;
  if (!(inflow > 0.0)) throw Error("no-orbit-inflow", "lambda_ob + s tht mu must be positive");

  const PolyMatrixSystem full = build_system(m, SystemVariant::Full, true);
  const double lt = m.lambda / m.nu;
  const double mt = m.mu / m.nu;

  ReducedSystem r;
  r.s = s;
  r.kappa0 = smu * m.thb / inflow;
  r.kappa1 = smu * m.tht / inflow;
  const Matrix L = last_column_ones(s);
  const Matrix W = lt * m.pt_a * L + m.tht * mt * last_column_ramp(s);

  r.V.min_power = 0;
  r.V.coeffs = {full.V.coeff(0).topLeftCorner(s, s) - r.kappa0 * L,
                full.V.coeff(1).topLeftCorner(s, s) - r.kappa1 * L};
  r.U.min_power = 0;
  r.U.coeffs = {full.U.coeff(0).topLeftCorner(s, s) - r.kappa0 * W,
                full.U.coeff(1).topLeftCorner(s, s) - r.kappa1 * W};

  r.recovery_weights.resize(s);
  for (int i = 0; i < s; ++i) r.recovery_weights(i) = lt * m.pt_a + i * m.tht * mt;
  r.recovery_denominator = inflow / m.nu;
  return r;
}

double reduced_residual(const StationaryDistribution& dist, const ReducedSystem& sys, double z) {
  const GfValue g = eval_gf(dist, z);
  const RowVector p = g.p_real().head(sys.s);
  const RowVector dp = g.dp_real().head(sys.s);
  return (dp * sys.V(z) - p * sys.U(z)).cwiseAbs().maxCoeff();
}

double recovery_error(const StationaryDistribution& dist, const ReducedSystem& sys, double z) {
  const GfValue g = eval_gf(dist, z);
  return std::abs(sys.recover_ps(g.p_real(), g.dp_real()) - g.p_real()(sys.s));
}

OkuboSystem okubo_form(const ModelParams& m) {
  require_valid(m);
  if (m.ab != 0.0 || m.tht != 0.0 || m.pt_a != 0.0 || std::abs(m.p_a - 1.0) > kSplitTolerance) {
    throw Error("not-okubo", "Okubo form needs ab = 0, tht = 0, pt_a = 0 and p_a = 1");
  }
  const ReducedSystem red = reduce_persistent(m);
  if (red.kappa1 != 0.0 || red.U.coeff(1).cwiseAbs().maxCoeff() != 0.0) {
    throw Error("not-okubo", "kappa or U depends on z");
  }
  const int s = m.s;
  OkuboSystem o;
  o.s = s;
  o.pbar = m.pb;
  o.p = m.p;
  o.rho_tilde = red.kappa0;
  o.theta = m.theta;
  o.thb = m.thb;
  o.lt = m.lambda / m.nu;
  o.mb = m.mu / m.nu * m.thb;
  o.T = m.pb * Matrix::Identity(s, s) + m.p * upper_shift(s) + o.rho_tilde * last_column_ones(s);
  o.U = red.U.coeff(0);
  return o;
}

OkuboSystem standardize(const OkuboSystem& sys) {
  if (!(sys.p > 0.0)) throw Error("pure-orbit", "standardization requires p > 0");
  OkuboSystem out = sys;
  out.standardized = true;
  if (sys.pbar == 0.0 && sys.p == 1.0) return out;
  out.rho_tilde = sys.rho_tilde / sys.p;
  out.pbar = 0.0;
  out.p = 1.0;
  out.T = upper_shift(sys.s) + out.rho_tilde * last_column_ones(sys.s);
  return out;
}

double okubo_residual(const StationaryDistribution& dist, const OkuboSystem& sys, double z) {
  if (sys.standardized && (sys.pbar != 0.0 || sys.p != 1.0)) {
    throw Error("not-standardized", "inconsistent Okubo system");
  }
  const GfValue g = eval_gf(dist, z);
  const RowVector p = g.p_real().head(sys.s);
  const RowVector dp = g.dp_real().head(sys.s);
  const Matrix zt = z * Matrix::Identity(sys.s, sys.s) - sys.T;
  return (dp * zt - p * sys.U).cwiseAbs().maxCoeff();
}

namespace {

int numeric_rank(const Matrix& m, double tol) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(tol);
  return static_cast<int>(qr.rank());
}

}  // namespace

std::vector<JordanBlockInfo> OkuboSystem::jordan_structure() const {
  constexpr double tol = 1e-10;
  std::vector<JordanBlockInfo> out;
  std::vector<double> diag;
  for (int k = 0; k < s; ++k) diag.push_back(T(k, k));
  for (double e : diag) {
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const JordanBlockInfo& b) { return std::abs(b.eigenvalue - e) <= tol * std::max(1.0, std::abs(e)); });
    if (seen) continue;
    JordanBlockInfo info;
    info.eigenvalue = e;
    info.algebraic_multiplicity = static_cast<int>(std::count_if(
        diag.begin(), diag.end(), [&](double d) { return std::abs(d - e) <= tol * std::max(1.0, std::abs(e)); }));
    const Matrix N = T - e * Matrix::Identity(s, s);
    std::vector<int> ranks{s};
    Matrix Nk = Matrix::Identity(s, s);
    for (int k = 1; k <= info.algebraic_multiplicity + 1; ++k) {
      Nk = Nk * N;
      ranks.push_back(numeric_rank(Nk, tol));
    }
    // blocks of size >= k: ranks[k-1] - ranks[k]
    std::vector<int> at_least;
    for (size_t k = 1; k < ranks.size(); ++k) at_least.push_back(ranks[k - 1] - ranks[k]);
    for (size_t k = 0; k < at_least.size(); ++k) {
      const int exact = at_least[k] - (k + 1 < at_least.size() ? at_least[k + 1] : 0);
      for (int c = 0; c < exact; ++c) info.block_sizes.push_back(static_cast<int>(k) + 1);
    }
    std::sort(info.block_sizes.rbegin(), info.block_sizes.rend());
    out.push_back(std::move(info));
  }
  return out;
}

Matrix okubo_resolvent(const OkuboSystem& sys, double y) {
  if (!sys.standardized) throw Error("not-standardized", "resolvent expansion needs the standardized system");
  const int s = sys.s;
  Matrix out = Matrix::Zero(s, s);
  Matrix Tk = Matrix::Identity(s, s);
  for (int k = 0; k <= s - 2; ++k) {
    out += Tk / std::pow(y, k + 1);
    Tk = Tk * sys.T;
  }
  // Tk = T^{s-1}
  out += Tk / (std::pow(y, s - 1) * (y - sys.rho_tilde));
  return out;
}

Matrix ResolventDecomposition::evaluate(double y) const {
  Matrix out = D / (y - rho_bar);
  for (size_t k = 0; k < polar.size(); ++k) out += polar[k] / std::pow(y, static_cast<double>(k + 1));
  return out;
}

ResolventDecomposition resolvent_decomposition(const OkuboSystem& sys) {
  if (sys.s < 3) throw Error("dimension", "resolvent decomposition needs s >= 3");
  if (!sys.standardized) throw Error("not-standardized", "standardize the system first");
  const int s = sys.s;
  const double rb = sys.rho_tilde;

  std::vector<Matrix> powers{Matrix::Identity(s, s)};
  for (int k = 1; k <= s - 1; ++k) powers.push_back(powers.back() * sys.T);
  const Matrix& top = powers[static_cast<size_t>(s - 1)];

  ResolventDecomposition r;
  r.s = s;
  r.rho_bar = rb;
  r.D = sys.U * top / std::pow(rb, s - 1);
  // 1/(y^{s-1}(y - rb)) = rb^{-(s-1)}/(y - rb) - sum_{m=1}^{s-1} rb^{-(s-m)} y^{-m}
  for (int m = 1; m <= s - 1; ++m) {
    r.polar.push_back(sys.U * (powers[static_cast<size_t>(m - 1)] - top / std::pow(rb, s - m)));
  }
  int highest = 0;
  for (int m = 1; m <= s - 1; ++m) {
    if (r.polar[static_cast<size_t>(m - 1)].cwiseAbs().maxCoeff() > 0.0) highest = m;
  }
  r.poincare_rank_zero = std::max(0, highest - 1);
  r.poincare_rank_regular = 0;
  return r;
}

}  // namespace retrialq
