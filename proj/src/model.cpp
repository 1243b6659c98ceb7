#include "retrialq/model.hpp"

#include "retrialq/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace retrialq {

ModelParams classic_params(double lambda, double mu, double nu, int s) {
  ModelParams m;
  m.lambda = lambda;
  m.mu = mu;
  m.nu = nu;
  m.s = s;
  return m;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].field << ": " << violations[i].message;
  }
  return os.str();
}

namespace {

void check_rate(ValidationReport& rep, const char* name, double v) {
  if (!std::isfinite(v)) {
    rep.violations.push_back({name, "non-finite rate"});
  } else if (v < 0.0) {
    rep.violations.push_back({name, "negative rate"});
  }
}

void check_prob(ValidationReport& rep, const char* name, double v) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    rep.violations.push_back({name, "probability outside [0,1]"});
  }
}

void check_split(ValidationReport& rep, const char* name, const char* what, double sum) {
  if (!(std::abs(sum - 1.0) <= kSplitTolerance)) {
    rep.violations.push_back({name, std::string(what) + " split not stochastic"});
  }
}

}  // namespace

ValidationReport validate(const ModelParams& m) {
  ValidationReport rep;
  check_rate(rep, "lambda", m.lambda);
  check_rate(rep, "mu", m.mu);
  check_rate(rep, "nu", m.nu);
  if (m.s < 1) rep.violations.push_back({"s", "server count must be >= 1"});
  if (m.K < 0) rep.violations.push_back({"K", "waiting places must be >= 0"});

  check_prob(rep, "p_a", m.p_a);
  check_prob(rep, "pt_a", m.pt_a);
  check_prob(rep, "pb_a", m.pb_a);
  check_prob(rep, "at_0", m.at_0);
  check_prob(rep, "p", m.p);
  check_prob(rep, "pb", m.pb);
  check_prob(rep, "alpha", m.alpha);
  check_prob(rep, "ab", m.ab);
  check_prob(rep, "theta", m.theta);
  check_prob(rep, "thb", m.thb);
  check_prob(rep, "tht", m.tht);

  check_split(rep, "p_a+pt_a+pb_a", "arrival", m.p_a + m.pt_a + m.pb_a);
  check_split(rep, "p+pb", "retrial", m.p + m.pb);
  check_split(rep, "alpha+ab", "blocked-retrial", m.alpha + m.ab);
  check_split(rep, "theta+thb+tht", "feedback", m.theta + m.thb + m.tht);
  return rep;
}

void require_valid(const ModelParams& params) {
  auto rep = validate(params);
  if (!rep.ok()) throw Error("invalid-params", rep.summary());
}

double traffic_xi(const ModelParams& m) {
  const double smu = m.s * m.mu;
  if (!(smu > 0.0)) throw Error("undefined-rho", "s * mu must be positive");
  return m.p * (m.lambda_ob() / smu + m.tht) + m.theta;
}

DerivedRates derive(const ModelParams& m) {
  if (!(m.nu > 0.0)) throw Error("zero-nu", "orbit rate nu must be positive");
  DerivedRates d;
  d.lambda_ob = m.lambda_ob();
  d.lambda_o = m.lambda * m.pt_a;
  d.lt = m.lambda / m.nu;
  d.mt = m.mu / m.nu;
  d.mb = d.mt * m.thb;

  d.theta_slope = d.lt * m.pt_a;
  d.theta_const.resize(static_cast<size_t>(m.s));
  for (int k = 0; k < m.s; ++k) {
    d.theta_const[static_cast<size_t>(k)] = -d.lt * (m.p_a + m.pt_a) - k * d.mt * (m.thb + m.tht);
  }

  const double smu = m.s * m.mu;
  const double kdenom = d.lambda_ob + smu * m.tht;
  if (kdenom > 0.0) {
    d.kappa0 = smu * m.thb / kdenom;
    d.kappa1 = smu * m.tht / kdenom;
  }

  if (!(m.thb > 0.0) || !(d.lambda_ob > 0.0) || !(smu > 0.0)) {
    throw Error("undefined-rho", "rho requires thb > 0, lambda * at_0 > 0 and mu > 0");
  }
  d.r = d.lambda_ob / smu;
  d.rho = d.r / m.thb;
  d.rho_tilde = 1.0 / d.rho;
  d.rho_bar = m.p > 0.0 ? d.rho_tilde / m.p : std::numeric_limits<double>::infinity();
  d.xi = m.p * (d.rho * m.thb + m.tht) + m.theta;
  d.z_r = m.pb + (1.0 + (m.tht / m.thb) * m.pb) / d.rho;
  return d;
}

std::string to_string(Ergodicity e) {
  switch (e) {
    case Ergodicity::ErgodicCertain:
      return "ergodic-certain";
    case Ergodicity::ErgodicConjectural:
      return "ergodic-conjectural";
    case Ergodicity::NotErgodic:
      return "not-ergodic";
  }
  return "unknown";
}

ErgodicityVerdict ergodicity(const ModelParams& m) {
  ErgodicityVerdict v;
  const bool inflow = m.lambda * (m.pt_a + m.at_0) > 0.0 || m.mu * m.tht > 0.0;
  const double smu = m.s * m.mu;

  if (smu > 0.0) v.xi = traffic_xi(m);
  if (m.thb > 0.0 && m.lambda_ob() > 0.0 && smu > 0.0) {
    const double rho = m.lambda_ob() / (smu * m.thb);
    v.z_r = m.pb + (1.0 + (m.tht / m.thb) * m.pb) / rho;
  } else if (m.lambda_ob() == 0.0 && m.thb > 0.0) {
    v.z_r = std::numeric_limits<double>::infinity();
  }
  if (m.theta == 0.0 && m.tht == 0.0 && smu > 0.0) {
    const double nu_q = m.nu * m.p;
    const double nu_a = m.nu * m.pb;
    v.hanschke = (m.lambda_ob() / smu) * nu_q < nu_q + nu_a;
  }

  if (!inflow) {
    v.verdict = Ergodicity::ErgodicCertain;
    v.reason = "no orbit inflow";
    return v;
  }
  if (!(m.nu > 0.0)) {
    v.verdict = Ergodicity::NotErgodic;
    v.reason = "nu = 0 with orbit inflow: the orbit can only grow";
    return v;
  }
  if (m.ab > 0.0) {
    v.verdict = Ergodicity::ErgodicCertain;
    v.reason = "non-persistent retrials (ab > 0)";
    return v;
  }
  if (!v.xi) throw Error("undefined-rho", "persistent model with s * mu = 0");
  const bool stable = *v.xi < 1.0;
  v.verdict = stable ? Ergodicity::ErgodicConjectural : Ergodicity::NotErgodic;
  v.reason = stable ? "persistent retrials, xi < 1 (z_r > 1)" : "persistent retrials, xi >= 1 (z_r <= 1)";
  if (v.hanschke && *v.hanschke != stable) v.disagreement = true;
  return v;
}

Matrix QbdBlocks::up(long) const { return A; }

Matrix QbdBlocks::local(long j) const {
  Matrix m = B - At - static_cast<double>(j) * Ct;
  if (j > 0) m -= C0t;
  return m;
}

Matrix QbdBlocks::down(long j) const {
  if (j <= 0) return Matrix::Zero(n, n);
  return static_cast<double>(j) * C + C0;
}

double QbdBlocks::conservativity_defect(long j) const {
  Vector sums = local(j).rowwise().sum() + up(j).rowwise().sum();
  if (j > 0) sums += down(j).rowwise().sum();
  return sums.cwiseAbs().maxCoeff();
}

QbdBlocks build_blocks(const ModelParams& m) {
  const int n = m.s + 1;
  return build_blocks(m, Matrix::Zero(n, n));
}

QbdBlocks build_blocks(const ModelParams& m, const Matrix& C0) {
  if (m.K != 0) throw Error("unsupported-K", "only K = 0 is supported");
  if (m.s < 1) throw Error("invalid-params", "s must be >= 1");
  const int s = m.s;
  const int n = s + 1;
  if (C0.rows() != n || C0.cols() != n) throw Error("invalid-params", "C0 must be (s+1)x(s+1)");

  QbdBlocks b;
  b.n = n;
  b.A = Matrix::Zero(n, n);
  b.B = Matrix::Zero(n, n);
  b.C = Matrix::Zero(n, n);
  b.C0 = C0;

  for (int i = 0; i < s; ++i) {
    b.C(i, i) = m.nu * m.pb;
    b.C(i, i + 1) = m.nu * m.p;
    b.A(i, i) = m.lambda * m.pt_a;
    b.B(i, i + 1) = m.lambda * m.p_a;
  }
  b.C(s, s) = m.nu * m.ab;
  b.A(s, s) = m.lambda * m.at_0;
  for (int i = 1; i < n; ++i) {
    b.A(i, i - 1) = i * m.mu * m.tht;
    b.B(i, i - 1) = i * m.mu * m.thb;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k != i) off += b.B(i, k);
    }
    b.B(i, i) = -off;
  }

  b.At = row_sum_diagonal(b.A);
  b.Ct = row_sum_diagonal(b.C);
  b.C0t = row_sum_diagonal(b.C0);
  return b;
}

}  // namespace retrialq
