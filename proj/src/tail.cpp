#include "retrialq/tail.hpp"

#include "retrialq/error.hpp"

#include <cmath>

namespace retrialq {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "unknown";
}

SingularityReport analytic_singularity(const ModelParams& m) {
  require_valid(m);
  if (!(m.thb > 0.0) || !(m.lambda_ob() > 0.0) || !(m.mu > 0.0)) {
    throw Error("undefined-rho", "z_r needs thb > 0, lambda_ob > 0 and mu > 0");
  }
  const double rho = m.lambda_ob() / (m.s * m.mu * m.thb);
  SingularityReport out;
  out.z_r = m.pb + (1.0 + m.tht / m.thb * m.pb) / rho;
  if (std::abs(out.z_r - 1.0) <= 1e-12) {
    out.regime = Regime::Critical;
  } else {
    out.regime = out.z_r > 1.0 ? Regime::Subcritical : Regime::Supercritical;
  }
  return out;
}

FitWindow default_window(std::size_t J) { return {(2 * J) / 3, (9 * J) / 10}; }

PowerGeometricFit fit_power_geometric(const std::vector<double>& m, FitWindow w) {
  const auto n = static_cast<Eigen::Index>(w.hi - w.lo + 1);
  Matrix X(n, 3);
  Vector y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double j = static_cast<double>(w.lo) + static_cast<double>(k);
    const double v = m.at(w.lo + static_cast<std::size_t>(k));
    if (!(v >= 1e-300)) throw Error("tail-underflow", "mass below 1e-300 at level " + std::to_string(j));
    X(k, 0) = 1.0;
    X(k, 1) = std::log(j);
    X(k, 2) = j;
    y(k) = std::log(v);
  }
  const Vector coef = X.colPivHouseholderQr().solve(y);
  PowerGeometricFit f;
  f.log_c = coef(0);
  f.beta = coef(1);
  f.eta = std::exp(coef(2));
  f.residual = std::sqrt((X * coef - y).squaredNorm() / static_cast<double>(n));
  return f;
}

TailEstimate fit_tail(const StationaryDistribution& dist, std::optional<FitWindow> window) {
  const FitWindow w = window.value_or(default_window(dist.J));
  if (w.lo == 0 || w.hi < w.lo + 4 || w.hi > dist.J) {
    throw Error("window-too-small", "window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi) +
                                        "] unusable for J = " + std::to_string(dist.J));
  }
  if (dist.J < 4 * (w.hi - w.lo)) {
    throw Error("window-too-small", "truncation J = " + std::to_string(dist.J) + " below 4 window widths");
  }

  TailEstimate out;
  out.window = w;
  std::vector<double> mass(dist.J + 1);
  for (std::size_t j = 0; j <= dist.J; ++j) mass[j] = dist.level_mass(j);
  out.level = fit_power_geometric(mass, w);
  for (std::size_t j = w.lo; j < w.hi; ++j) out.ratios.push_back(mass[j + 1] / mass[j]);

  for (int i = 0; i < dist.phases(); ++i) {
    std::vector<double> col(dist.J + 1);
    bool positive = true;
    for (std::size_t j = 0; j <= dist.J; ++j) {
      col[j] = dist.pi(static_cast<Eigen::Index>(j), i);
      if (j >= w.lo && j <= w.hi && !(col[j] >= 1e-300)) positive = false;
    }
    if (positive) {
      out.phases.emplace_back(fit_power_geometric(col, w));
    } else {
      out.phases.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace retrialq
