#include "retrialq/genfun.hpp"

#include "retrialq/error.hpp"
#include "retrialq/reduction.hpp"

#include <algorithm>
#include <cmath>

namespace retrialq {

std::string to_string(SystemVariant v) {
  switch (v) {
    case SystemVariant::Full:
      return "full";
    case SystemVariant::Simplified:
      return "simplified";
    case SystemVariant::Reduced:
      return "reduced";
    case SystemVariant::Okubo:
      return "okubo";
  }
  return "unknown";
}

SystemVariant variant_from_string(const std::string& name) {
  if (name == "full") return SystemVariant::Full;
  if (name == "simplified") return SystemVariant::Simplified;
  if (name == "reduced") return SystemVariant::Reduced;
  if (name == "okubo") return SystemVariant::Okubo;
  throw Error("unsupported-variant", "unknown system variant '" + name + "'");
}

bool PolyMatrixSystem::homogeneous() const {
  return (inhom_const.size() == 0 || inhom_const.cwiseAbs().maxCoeff() == 0.0) &&
         (inhom_inverse.size() == 0 || inhom_inverse.cwiseAbs().maxCoeff() == 0.0);
}

PolyMatrixSystem full_system(const QbdBlocks& b, double scale) {
  PolyMatrixSystem sys;
  sys.variant = SystemVariant::Full;
  sys.dim = b.n;
  sys.scale = scale;
  const double inv = 1.0 / scale;
  sys.V.min_power = 0;
  sys.V.coeffs = {-b.C * inv, b.Ct * inv};
  const bool has_c0 = b.C0.cwiseAbs().maxCoeff() != 0.0;
  if (has_c0) {
    sys.U.min_power = -1;
    sys.U.coeffs = {b.C0 * inv, (b.B - b.At - b.C0t) * inv, b.A * inv};
  } else {
    sys.U.min_power = 0;
    sys.U.coeffs = {(b.B - b.At) * inv, b.A * inv};
  }
  sys.inhom_const = b.C0t * inv;
  sys.inhom_inverse = -b.C0 * inv;
  return sys;
}

PolyMatrixSystem build_system(const ModelParams& params, SystemVariant variant, bool scaled) {
  require_valid(params);
  if (variant == SystemVariant::Reduced || variant == SystemVariant::Okubo) {
    throw Error("unsupported-variant", to_string(variant) + " systems are built by reduce_persistent/okubo_form");
  }
  double scale = 1.0;
  if (scaled) {
    if (!(params.nu > 0.0)) throw Error("zero-nu", "scaled systems require nu > 0");
    scale = params.nu;
  }
  const QbdBlocks b = build_blocks(params);
  PolyMatrixSystem sys = full_system(b, scale);
  if (variant == SystemVariant::Full) return sys;

  if (std::abs(params.p + params.pb - 1.0) > kSplitTolerance) {
    throw Error("invalid-params", "simplified system requires p + pb = 1");
  }
  // Replace the last column by the sum of all columns, divided by z - 1:
  // V 1 = (z - 1) Ct 1 and U 1 = (z - 1) At 1 because B is conservative.
  const int last = b.n - 1;
  sys.variant = SystemVariant::Simplified;
  Matrix& v0 = sys.V.coeffs[0];
  Matrix& v1 = sys.V.coeffs[1];
  v0.col(last) = b.C.rowwise().sum() / scale;
  v1.col(last).setZero();
  Matrix& u0 = sys.U.coeffs[0];
  Matrix& u1 = sys.U.coeffs[1];
  u0.col(last) = b.A.rowwise().sum() / scale;
  u1.col(last).setZero();
  return sys;
}

GfValue eval_gf(const StationaryDistribution& dist, std::complex<double> z, double z_r) {
  if (std::abs(z) >= z_r) throw Error("divergence-risk", "|z| >= z_r");
  GfValue g;
  g.z = z;
  const auto n = dist.pi.cols();
  const auto J = dist.pi.rows() - 1;
  g.p = CRowVector::Zero(n);
  g.dp = CRowVector::Zero(n);
  for (Eigen::Index j = J; j >= 0; --j) {
    g.p = g.p * z + dist.pi.row(j).cast<std::complex<double>>();
    if (j >= 1) g.dp = g.dp * z + static_cast<double>(j) * dist.pi.row(j).cast<std::complex<double>>();
  }
  g.tail_bound = dist.pi.row(J).sum() * std::max(1.0, std::pow(std::abs(z), static_cast<double>(J)));
  return g;
}

RowVector eval_gf_second(const StationaryDistribution& dist, double z) {
  const auto J = dist.pi.rows() - 1;
  RowVector out = RowVector::Zero(dist.pi.cols());
  for (Eigen::Index j = J; j >= 2; --j) {
    out = out * z + static_cast<double>(j) * static_cast<double>(j - 1) * dist.pi.row(j);
  }
  return out;
}

double ode_residual(const StationaryDistribution& dist, const PolyMatrixSystem& sys, double z) {
  const GfValue g = eval_gf(dist, z);
  const int d = sys.dim;
  const RowVector p = g.p_real().head(d);
  const RowVector dp = g.dp_real().head(d);
  RowVector r = dp * sys.V(z) - p * sys.U(z);
  if (!sys.homogeneous()) {
    const RowVector pi0 = dist.pi.row(0).head(d);
    r -= pi0 * (sys.inhom_const + sys.inhom_inverse / z);
  }
  return r.cwiseAbs().maxCoeff();
}

double ode_residual(const StationaryDistribution& dist, const ModelParams& params, SystemVariant variant,
                    double z) {
  if (variant == SystemVariant::Reduced) {
    return reduced_residual(dist, reduce_persistent(params), z);
  }
  if (variant == SystemVariant::Okubo) {
    return okubo_residual(dist, okubo_form(params), z);
  }
  return ode_residual(dist, build_system(params, variant), z);
}

std::vector<double> ode_residual_grid(const StationaryDistribution& dist, const PolyMatrixSystem& sys) {
  std::vector<double> out;
  for (int k = 1; k <= 9; ++k) out.push_back(ode_residual(dist, sys, 0.1 * k));
  return out;
}

namespace {

struct PhiTerms {
  double phi = 0.0, phi_y = 0.0, phi_z = 0.0;
  double ps = 0.0, dps = 0.0;
};

PhiTerms phi_terms(const StationaryDistribution& dist, int s, double y, double z) {
  const GfValue g = eval_gf(dist, z);
  const RowVector p = g.p_real();
  const RowVector dp = g.dp_real();
  PhiTerms t;
  for (int i = 0; i <= s; ++i) {
    const double yi = std::pow(y, i);
    t.phi += yi * p(i);
    t.phi_z += yi * dp(i);
    if (i > 0) t.phi_y += i * std::pow(y, i - 1) * p(i);
  }
  t.ps = p(s);
  t.dps = dp(s);
  return t;
}

}  // namespace

BivariateSides bivariate_sides(const StationaryDistribution& dist, const ModelParams& m, double y, double z) {
  const PhiTerms t = phi_terms(dist, m.s, y, z);
  const double ys = std::pow(y, m.s);
  BivariateSides out;
  out.lhs = m.nu * (z - m.pb - m.p * y) * t.phi_z + m.nu * ys * (m.pb - m.ab + z * (m.ab - 1.0) + m.p * y) * t.dps;
  const double lob = m.lambda_ob();
  out.rhs = m.lambda * t.phi * (m.pt_a * z - m.p_a - m.pt_a + m.p_a * y) +
            m.mu * t.phi_y * (m.thb + m.tht * z - y * (m.thb + m.tht)) +
            ys * (z * (lob - m.lambda * m.pt_a) - lob + m.lambda * (m.p_a + m.pt_a) - m.lambda * m.p_a * y) * t.ps;
  return out;
}

BivariateSides falin_sides(const StationaryDistribution& dist, const ModelParams& m, double y, double z) {
  const PhiTerms t = phi_terms(dist, m.s, y, z);
  const double ys = std::pow(y, m.s);
  BivariateSides out;
  out.lhs = m.nu * (z - y) * t.phi_z - m.nu * ys * (z - y) * t.dps;
  out.rhs = m.lambda * t.phi * (y - 1.0) + m.mu * t.phi_y * (1.0 - y) + m.lambda * ys * (z - y) * t.ps;
  return out;
}

double bivariate_residual(const StationaryDistribution& dist, const ModelParams& params, double y, double z) {
  const BivariateSides b = bivariate_sides(dist, params, y, z);
  return std::abs(b.lhs - b.rhs);
}

double det_V(const ModelParams& params, SystemVariant variant, double z) {
  switch (variant) {
    case SystemVariant::Full:
    case SystemVariant::Simplified:
      return build_system(params, variant).V(z).determinant();
    case SystemVariant::Reduced:
      return reduce_persistent(params).V(z).determinant();
    case SystemVariant::Okubo:
      break;
  }
  throw Error("unsupported-variant", "det_V is defined for full, simplified and reduced systems");
}

double det_V_formula(const ModelParams& m, SystemVariant variant, double z) {
  const double pbar = m.pb;
  switch (variant) {
    case SystemVariant::Full:
      return m.ab * std::pow(z - pbar, m.s) * (z - 1.0);
    case SystemVariant::Simplified:
      return m.ab * std::pow(z - pbar, m.s);
    case SystemVariant::Reduced: {
      if (!(m.thb > 0.0) || !(m.lambda_ob() > 0.0) || !(m.mu > 0.0)) {
        throw Error("undefined", "reduced determinant formula requires thb > 0 and lambda_ob > 0");
      }
      const double r = m.lambda_ob() / (m.s * m.mu);
      const double rho_tilde = m.thb / r;
      return std::pow(z - pbar, m.s - 1) * (r / (r + m.tht)) * (z - pbar - rho_tilde * (1.0 + (m.tht / m.thb) * pbar));
    }
    case SystemVariant::Okubo:
      break;
  }
  throw Error("unsupported-variant", "det_V_formula is defined for full, simplified and reduced systems");
}

Singularities singularities(const ModelParams& m) {
  Singularities s;
  s.pbar = m.pb;
  s.pbar_multiplicity = m.s - 1;
  s.pbar_irregular = m.s >= 3;
  if (m.thb > 0.0 && m.lambda_ob() > 0.0 && m.mu > 0.0) {
    const double rho = m.lambda_ob() / (m.s * m.mu * m.thb);
    s.z_r = m.pb + (1.0 + (m.tht / m.thb) * m.pb) / rho;
  }
  return s;
}

std::vector<RowVector> mmoo_moments(const Matrix& A, const Matrix& B, const Matrix& C, int kmax) {
  const auto n = B.rows();
  if (A.rows() != n || C.rows() != n || B.cols() != n) throw Error("invalid-argument", "phase matrices differ in size");
  const auto offdiag = [](const Matrix& m) {
    Matrix o = m;
    o.diagonal().setZero();
    return o.cwiseAbs().maxCoeff();
  };
  if ((n > 1 && (offdiag(A) != 0.0 || offdiag(C) != 0.0)) || A.minCoeff() < 0.0 || C.minCoeff() < 0.0) {
    throw Error("invalid-argument", "A and C must be nonnegative diagonal matrices");
  }
  if (B.rowwise().sum().cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, B.cwiseAbs().maxCoeff())) {
    throw Error("invalid-argument", "B must be a conservative generator");
  }

  std::vector<RowVector> m;
  // m_0: stationary vector of B (last balance column replaced by normalization).
  Matrix Bn = B;
  Bn.col(n - 1).setOnes();
  Eigen::PartialPivLU<Matrix> lu0(Bn.transpose());
  if (!(lu0.rcond() > 1e-14)) throw Error("singular-shift", "B is not irreducible");
  Vector e = Vector::Zero(n);
  e(n - 1) = 1.0;
  m.push_back(lu0.solve(e).transpose());

  for (int k = 1; k <= kmax; ++k) {
    Matrix shift = static_cast<double>(k) * C - B;
    Eigen::PartialPivLU<Matrix> lu(shift.transpose());
    if (!(lu.rcond() > 1e-14)) throw Error("singular-shift", "kC - B singular at k = " + std::to_string(k));
    RowVector rhs = static_cast<double>(k) * m.back() * A;
    m.push_back(lu.solve(rhs.transpose()).transpose());
  }
  return m;
}

CoefficientRecurrence expand_recurrence(const PolyMatrixSystem& sys) {
  if (sys.V.min_power < 0 || sys.V.max_power() > 1 || sys.U.min_power < -1 || sys.U.max_power() > 1) {
    throw Error("invalid-argument", "recurrence expansion needs V of degree <= 1 and U in span{1/z, 1, z}");
  }
  const Matrix V0 = sys.V.coeff(0);
  const Matrix V1 = sys.V.coeff(1);
  const Matrix Um1 = sys.U.coeff(-1);
  const Matrix U0 = sys.U.coeff(0);
  const Matrix U1 = sys.U.coeff(1);

  CoefficientRecurrence rec;
  rec.prev = U1;
  rec.cur0 = U0;
  rec.cur1 = -V1;
  rec.next0 = Um1 - V0;
  rec.next1 = -V0;
  rec.boundary_cur = sys.homogeneous() ? U0 : Matrix(U0 + sys.inhom_const);
  rec.boundary_next = Um1 - V0;
  return rec;
}

}  // namespace retrialq
