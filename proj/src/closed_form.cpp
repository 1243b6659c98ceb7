#include "retrialq/closed_form.hpp"

#include "retrialq/error.hpp"

#include <cmath>

namespace retrialq {

namespace {

bool near(double x, double y) { return std::abs(x - y) <= kSplitTolerance; }

/// Coefficients of (1 - z/z_r)^{-alpha}.
std::vector<double> binomial_series(double alpha, double z_r, int n) {
  std::vector<double> c(static_cast<size_t>(n), 0.0);
  if (n == 0) return c;
  c[0] = 1.0;
  for (int j = 1; j < n; ++j) c[j] = c[j - 1] * (alpha + j - 1) / (j * z_r);
  return c;
}

std::vector<double> exp_series(double rate, int n) {
  std::vector<double> c(static_cast<size_t>(n), 0.0);
  if (n == 0) return c;
  c[0] = 1.0;
  for (int j = 1; j < n; ++j) c[j] = c[j - 1] * rate / j;
  return c;
}

std::vector<double> cauchy(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out(x.size(), 0.0);
  for (size_t k = 0; k < x.size(); ++k) {
    double acc = 0.0;
    for (size_t i = 0; i <= k; ++i) acc += x[i] * y[k - i];
    out[k] = acc;
  }
  return out;
}

}  // namespace

S1Solution s1_solution(const ModelParams& m) {
  require_valid(m);
  if (m.s != 1) throw Error("not-applicable", "s1_solution needs s = 1");
  if (m.ab != 0.0) throw Error("not-applicable", "s1_solution needs ab = 0");
  if (!(m.nu > 0.0) || !(m.lambda_ob() > 0.0)) {
    throw Error("not-applicable", "s1_solution needs nu > 0 and lambda_ob > 0");
  }
  if (!(traffic_xi(m) < 1.0)) throw Error("not-applicable", "s1_solution needs xi < 1");

  S1Solution s;
  const double lt = m.lambda / m.nu;
  s.r = m.lambda_ob() / m.mu;
  s.sigma = m.p_a + m.pt_a;
  s.a = m.thb + m.pb * m.tht + s.r * m.pb;
  s.z_r = s.a / s.r;
  s.lambda_bar = lt * (s.sigma - m.pb * m.pt_a) * (1.0 + m.tht / s.r);
  s.lt_pta = lt * m.pt_a;
  s.p_factor = m.lambda / m.mu * (s.sigma - m.pb * m.pt_a);
  const double u1 = s.a - s.r;
  // q(1) + p(1) = 1 with q(1) = c u1^{-lbar} exp(-lt pta u1 / r)
  s.log_c = s.lambda_bar * std::log(u1) + s.lt_pta * u1 / s.r - std::log1p(s.p_factor / u1);
  return s;
}

std::pair<double, double> S1Solution::value(double z) const {
  const double uz = u(z);
  if (!(uz > 0.0)) throw Error("not-applicable", "z beyond the dominant singularity");
  const double q = std::exp(log_c - lambda_bar * std::log(uz) - lt_pta * uz / r);
  return {q, p_factor * q / uz};
}

std::pair<double, double> S1Solution::derivative(double z) const {
  const auto [q, p] = value(z);
  const double uz = u(z);
  // d/dz log q = lbar r / u + lt pta
  const double dq = q * (lambda_bar * r / uz + lt_pta);
  const double dp = p_factor * (dq / uz + r * q / (uz * uz));
  return {dq, dp};
}

std::pair<std::vector<double>, std::vector<double>> S1Solution::coefficients(int n) const {
  // q = c a^{-lbar} e^{-lt pta a/r} (1 - z/z_r)^{-lbar} e^{lt pta z}
  const double log_pref = log_c - lambda_bar * std::log(a) - lt_pta * a / r;
  const double pref = std::exp(log_pref);
  const std::vector<double> ex = exp_series(lt_pta, n);
  std::vector<double> q = cauchy(binomial_series(lambda_bar, z_r, n), ex);
  std::vector<double> p = cauchy(binomial_series(lambda_bar + 1.0, z_r, n), ex);
  for (auto& v : q) v *= pref;
  for (auto& v : p) v *= pref * p_factor / a;
  return {std::move(q), std::move(p)};
}

namespace {

double classic_rho(const ModelParams& m) {
  require_valid(m);
  const bool classic = m.s == 1 && near(m.p, 1.0) && near(m.p_a, 1.0) && near(m.thb, 1.0) &&
                       near(m.at_0, 1.0) && m.ab == 0.0 && m.nu > 0.0;
  if (!classic) throw Error("not-applicable", "classic pmf needs s = 1, p = p_a = thb = at_0 = 1, ab = 0");
  const double rho = m.lambda / m.mu;
  if (!(rho < 1.0)) throw Error("not-applicable", "classic pmf needs rho < 1");
  return rho;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> s1_classic_pmf_table(const ModelParams& m, int n) {
  const double rho = classic_rho(m);
  const double lt = m.lambda / m.nu;
  std::vector<double> p0(static_cast<size_t>(n)), p1(static_cast<size_t>(n));
  if (n == 0) return {p0, p1};
  const double base = std::pow(1.0 - rho, lt + 1.0);
  p0[0] = base;
  p1[0] = base * rho;
  for (int j = 1; j < n; ++j) {
    p0[j] = p0[j - 1] * rho * (lt + j - 1) / j;
    p1[j] = p1[j - 1] * rho * (lt + j) / j;
  }
  return {p0, p1};
}

std::pair<double, double> s1_classic_pmf(const ModelParams& m, int j) {
  if (j < 0) throw Error("invalid-argument", "negative level");
  const auto [p0, p1] = s1_classic_pmf_table(m, j + 1);
  return {p0.back(), p1.back()};
}

S1Asymptotic s1_asymptotic(const ModelParams& m, int j) {
  if (j < 1) throw Error("invalid-argument", "asymptotic form needs j >= 1");
  const S1Solution s = s1_solution(m);
  const double lb = s.lambda_bar;
  const double jd = j;
  const double log_base = s.log_c - lb * std::log(s.a) - jd * std::log(s.z_r);
  // (lbar)_j / j! = Gamma(lbar + j) / (Gamma(lbar) Gamma(j + 1))
  const double log_poch = std::lgamma(lb + jd) - std::lgamma(lb) - std::lgamma(jd + 1.0);
  const double log_pow = (lb - 1.0) * std::log(jd) - std::lgamma(lb);
  const double ratio_pre = s.p_factor / s.a * (lb + jd) / lb;
  const double ratio_pow = s.p_factor / s.a * jd / lb;

  S1Asymptotic out;
  out.decay = 1.0 / s.z_r;
  const double q_pre = std::exp(log_base + log_poch);
  const double q_pow = std::exp(log_base + log_pow);
  out.pre_limit = {q_pre, q_pre * ratio_pre};
  out.power_limit = {q_pow, q_pow * ratio_pow};
  return out;
}

S2Solution s2_solution(const ModelParams& m, std::size_t min_terms) {
  require_valid(m);
  const bool ok = m.s == 2 && near(m.p, 1.0) && near(m.p_a, 1.0) && m.tht == 0.0 && m.pt_a == 0.0 &&
                  m.ab == 0.0 && m.nu > 0.0 && m.thb > 0.0 && m.lambda_ob() > 0.0;
  if (!ok) throw Error("not-applicable", "s2 solution needs s = 2, p = p_a = 1, tht = pt_a = ab = 0");
  const double lt = m.lambda / m.nu;
  const double mb = m.mu / m.nu * m.thb;
  const double lob = m.lambda_ob() / m.nu;

  S2Solution out;
  out.rho = m.lambda_ob() / (2.0 * m.mu * m.thb);
  if (!(out.rho < 1.0)) throw Error("not-applicable", "s2 solution needs xi < 1");
  const double c3 = lt + mb + 1.0 + mb * out.rho;

  // q_n = g_n rho^n with the Gauss term ratio (n^2 + (a+b) n + ab) / ((n+1)(c3+n))
  std::vector<double> q{1.0};
  constexpr size_t kMaxTerms = 2'000'000;
  for (size_t n = 0;; ++n) {
    const double nd = static_cast<double>(n);
    const double next = q[n] * out.rho * (nd * nd + (2.0 * lt + mb) * nd + lt * lt) / ((nd + 1.0) * (c3 + nd));
    q.push_back(next);
    if (n + 1 >= min_terms && n > 16 && next * (nd + 2.0) * (nd + 2.0) < 1e-22 * q[0]) break;
    if (q.size() > kMaxTerms) throw Error("series-divergence", "Gauss series did not settle");
  }
  // one extra term feeds the recovery of p_2
  const size_t n = q.size() - 1;
  out.p1.resize(n + 1);
  for (size_t j = 0; j <= n; ++j) out.p1[j] = (static_cast<double>(j) + lt) * q[j] / mb;
  out.p2.assign(n, 0.0);
  for (size_t j = 0; j < n; ++j) out.p2[j] = (static_cast<double>(j) + 1.0) * (q[j + 1] + out.p1[j + 1]) / lob;
  q.pop_back();
  out.p1.pop_back();
  out.q = std::move(q);

  double total = 0.0;
  for (size_t j = 0; j < n; ++j) total += out.q[j] + out.p1[j] + out.p2[j];
  for (size_t j = 0; j < n; ++j) {
    out.q[j] /= total;
    out.p1[j] /= total;
    out.p2[j] /= total;
  }
  return out;
}

std::vector<double> S2Solution::value(double z) const {
  if (!(std::abs(rho * z) < 1.0)) throw Error("series-divergence", "|rho z| >= 1");
  // coefficients are cut for accuracy on the unit disk
  if (std::abs(z) > 1.0) throw Error("not-applicable", "evaluation restricted to |z| <= 1");
  std::vector<double> v(3, 0.0);
  double zp = 1.0;
  for (size_t j = 0; j < q.size(); ++j) {
    v[0] += q[j] * zp;
    v[1] += p1[j] * zp;
    v[2] += p2[j] * zp;
    zp *= z;
  }
  return v;
}

double s2_hypergeometric(const ModelParams& params, double z) { return s2_solution(params).value(z)[0]; }

}  // namespace retrialq
