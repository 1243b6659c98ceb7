#pragma once

#include "retrialq/model.hpp"
#include "retrialq/qbd_solver.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace retrialq {

enum class Regime { Subcritical, Critical, Supercritical };

std::string to_string(Regime r);

struct SingularityReport {
  double z_r = 0.0;
  Regime regime = Regime::Subcritical;
};

/// z_r = pb + (1 + (tht/thb) pb) / rho with rho = lambda_ob / (s mu thb).
/// Critical means |z_r - 1| <= 1e-12. Throws Error("undefined-rho") when
/// thb = 0, lambda_ob = 0 or mu = 0.
SingularityReport analytic_singularity(const ModelParams& params);

struct FitWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;  ///< inclusive
};

/// Default window: [2J/3, 0.9 J].
FitWindow default_window(std::size_t J);

struct PowerGeometricFit {
  double eta = 0.0;   ///< geometric decay rate
  double beta = 0.0;  ///< power exponent
  double log_c = 0.0;
  double residual = 0.0;  ///< RMS residual of the log-linear fit
};

/// log m_j = log C + beta log j + j log eta over the window.
struct TailEstimate {
  FitWindow window;
  PowerGeometricFit level;  ///< fit of the level masses
  /// Per-phase fits; empty when a phase has a zero entry in the window.
  std::vector<std::optional<PowerGeometricFit>> phases;
  /// m_{j+1} / m_j for j = lo..hi-1.
  std::vector<double> ratios;
};

/// Throws Error("window-too-small") when the window has fewer than 5 levels,
/// exceeds J, starts at 0, or J < 4 (hi - lo); Error("tail-underflow") when
/// a level mass in the window is below 1e-300.
TailEstimate fit_tail(const StationaryDistribution& dist, std::optional<FitWindow> window = std::nullopt);

/// Fit of an arbitrary positive sequence m[lo..hi].
PowerGeometricFit fit_power_geometric(const std::vector<double>& m, FitWindow window);

}  // namespace retrialq
