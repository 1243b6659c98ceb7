#pragma once

#include "retrialq/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace retrialq {

/// Rates and routing probabilities of the Markovian multiserver retrial queue.
///
/// Level j is the orbit size, phase i the number of busy servers (0..s).
/// Field names mirror the parameter-file keys.
struct ModelParams {
  double lambda = 0.0;  ///< arrival rate
  double mu = 1.0;      ///< per-server service rate
  double nu = 1.0;      ///< per-customer orbit activity rate
  int s = 1;            ///< number of servers
  int K = 0;            ///< extra waiting places, only 0 is supported

  // Arrival split when a server is free: join / go to orbit / balk.
  double p_a = 1.0;
  double pt_a = 0.0;
  double pb_a = 0.0;
  // Arrival split when blocked: orbit with at_0, balk with 1 - at_0.
  double at_0 = 1.0;

  // Orbit activity when a server is free: retry (p) / abandon (pb).
  double p = 1.0;
  double pb = 0.0;
  // Orbit activity when blocked: stay (alpha) / abandon (ab).
  double alpha = 1.0;
  double ab = 0.0;

  // After service: re-serve / leave / go to orbit.
  double theta = 0.0;
  double thb = 1.0;
  double tht = 0.0;

  double ab_0() const { return 1.0 - at_0; }
  double lambda_ob() const { return lambda * at_0; }
};

/// Builds the classic single-server persistent retrial model
/// (p = p_a = thb = 1, ab = 0) with the given rates.
ModelParams classic_params(double lambda, double mu, double nu, int s = 1);

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Probability-sum tolerance for the three routing splits.
inline constexpr double kSplitTolerance = 1e-12;

ValidationReport validate(const ModelParams& params);

/// Throws Error("invalid-params") listing every violation.
void require_valid(const ModelParams& params);

struct DerivedRates {
  double lambda_ob = 0.0;  ///< lambda * at_0
  double lambda_o = 0.0;   ///< lambda * pt_a
  double lt = 0.0;         ///< lambda / nu
  double mt = 0.0;         ///< mu / nu
  double mb = 0.0;         ///< mt * thb
  double r = 0.0;          ///< lambda_ob / (s mu) = rho * thb
  double rho = 0.0;        ///< lambda_ob / (s mu thb)
  double rho_tilde = 0.0;  ///< 1 / rho
  double rho_bar = 0.0;    ///< rho_tilde / p
  double xi = 0.0;         ///< p (rho thb + tht) + theta
  double z_r = 0.0;        ///< pb + (1 + (tht/thb) pb) / rho

  /// Theta_k(z) = theta_const[k] + theta_slope * z, k = 0..s-1.
  std::vector<double> theta_const;
  double theta_slope = 0.0;

  /// kappa(z) = kappa0 + kappa1 * z; zero when lambda_ob + s tht mu = 0.
  double kappa0 = 0.0;
  double kappa1 = 0.0;

  double theta_k(int k, double z) const { return theta_const.at(static_cast<size_t>(k)) + theta_slope * z; }
  double kappa(double z) const { return kappa0 + kappa1 * z; }
};

/// Computes the derived rates. Throws Error("undefined-rho") when thb = 0 or
/// lambda_ob = 0, and Error("zero-nu") when nu = 0.
DerivedRates derive(const ModelParams& params);

/// xi = p (lambda_ob/(s mu) + tht) + theta; defined whenever s mu > 0.
double traffic_xi(const ModelParams& params);

enum class Ergodicity { ErgodicCertain, ErgodicConjectural, NotErgodic };

std::string to_string(Ergodicity e);

struct ErgodicityVerdict {
  Ergodicity verdict = Ergodicity::ErgodicCertain;
  std::optional<double> xi;
  std::optional<double> z_r;
  /// Hanschke's condition (lambda_ob/(s mu)) nu_q < nu_q + nu_a, attached when theta = tht = 0.
  std::optional<bool> hanschke;
  /// Set when Hanschke's condition and xi < 1 disagree in the persistent case.
  bool disagreement = false;
  std::string reason;

  bool ergodic() const { return verdict != Ergodicity::NotErgodic; }
};

ErgodicityVerdict ergodicity(const ModelParams& params);

/// Generator blocks of the affine-death QBD:
///   up_j = A, down_j = j C + C0 (j > 0), local_j = B - At - j Ct - C0t (j > 0).
struct QbdBlocks {
  int n = 0;
  Matrix A, B, C, C0;
  Matrix At, Ct, C0t;

  Matrix up(long j) const;
  Matrix local(long j) const;
  Matrix down(long j) const;

  /// max |row sum of [down_j | local_j | up_j]| (j >= 1) or [local_0 | up_0] (j = 0).
  double conservativity_defect(long j) const;
};

/// Builds A, B, C with C0 = 0. Throws Error("unsupported-K") when K != 0.
QbdBlocks build_blocks(const ModelParams& params);

/// Same, with a constant-retrial (dispatcher) term C0.
QbdBlocks build_blocks(const ModelParams& params, const Matrix& C0);

}  // namespace retrialq
