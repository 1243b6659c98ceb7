#include "oracles.hpp"

#include <cmath>

namespace oracle {

Matrix dense_ctmc(const retrialq::ModelParams& m, int jt) {
  const int s = m.s;
  const int n = (s + 1) * (jt + 1);
  auto idx = [&](int i, int j) { return j * (s + 1) + i; };
  Matrix Q = Matrix::Zero(n, n);
  auto rate = [&](int i, int j, int i2, int j2, double r) {
    if (r <= 0.0 || j2 > jt || (i2 == i && j2 == j)) return;
    Q(idx(i, j), idx(i2, j2)) += r;
  };
  for (int j = 0; j <= jt; ++j) {
    for (int i = 0; i <= s; ++i) {
      if (i < s) {
        rate(i, j, i + 1, j, m.lambda * m.p_a);
        rate(i, j, i, j + 1, m.lambda * m.pt_a);
      } else {
        rate(i, j, i, j + 1, m.lambda * m.at_0);
      }
      if (i > 0) {
        rate(i, j, i - 1, j, i * m.mu * m.thb);
        rate(i, j, i - 1, j + 1, i * m.mu * m.tht);
      }
      if (j > 0) {
        if (i < s) {
          rate(i, j, i + 1, j - 1, j * m.nu * m.p);
          rate(i, j, i, j - 1, j * m.nu * m.pb);
        } else {
          rate(i, j, i, j - 1, j * m.nu * m.ab);
        }
      }
    }
  }
  for (int k = 0; k < n; ++k) Q(k, k) = -Q.row(k).sum();
  Matrix M = Q.transpose();
  M.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(0) = 1.0;
  const Eigen::VectorXd x = M.partialPivLu().solve(rhs);
  Matrix out(jt + 1, s + 1);
  for (int j = 0; j <= jt; ++j) {
    for (int i = 0; i <= s; ++i) out(j, i) = x(idx(i, j));
  }
  return out;
}

double classic_pi0(double rho, double lt, int j) {
  return std::exp((lt + 1.0) * std::log1p(-rho) + j * std::log(rho) + std::lgamma(lt + j) - std::lgamma(lt) -
                  std::lgamma(j + 1.0));
}

double classic_pi1(double rho, double lt, int j) {
  return std::exp((lt + 1.0) * std::log1p(-rho) + (j + 1) * std::log(rho) + std::lgamma(lt + 1.0 + j) -
                  std::lgamma(lt + 1.0) - std::lgamma(j + 1.0));
}

std::vector<double> erlang_loss(int s, double a) {
  std::vector<double> w(static_cast<size_t>(s + 1));
  double total = 0.0;
  for (int i = 0; i <= s; ++i) {
    w[static_cast<size_t>(i)] = std::exp(i * std::log(a) - std::lgamma(i + 1.0));
    total += w[static_cast<size_t>(i)];
  }
  for (auto& v : w) v /= total;
  return w;
}

Matrix mmoo_dense(const std::vector<double>& a, const Matrix& B, const std::vector<double>& c, int n) {
  const int k = static_cast<int>(a.size());
  const int N = k * (n + 1);
  auto idx = [&](int ph, int j) { return j * k + ph; };
  Matrix Q = Matrix::Zero(N, N);
  for (int j = 0; j <= n; ++j) {
    for (int ph = 0; ph < k; ++ph) {
      for (int q = 0; q < k; ++q) {
        if (q != ph) Q(idx(ph, j), idx(q, j)) += B(ph, q);
      }
      if (j < n) Q(idx(ph, j), idx(ph, j + 1)) += a[static_cast<size_t>(ph)];
      if (j > 0) Q(idx(ph, j), idx(ph, j - 1)) += j * c[static_cast<size_t>(ph)];
    }
  }
  for (int r = 0; r < N; ++r) Q(r, r) = -Q.row(r).sum();
  Matrix M = Q.transpose();
  M.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  rhs(0) = 1.0;
  const Eigen::VectorXd x = M.partialPivLu().solve(rhs);
  Matrix out(n + 1, k);
  for (int j = 0; j <= n; ++j) {
    for (int ph = 0; ph < k; ++ph) out(j, ph) = x(idx(ph, j));
  }
  return out;
}

Eigen::RowVectorXd series_at(const Matrix& levels, double z) {
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(levels.cols());
  for (Eigen::Index j = levels.rows() - 1; j >= 0; --j) acc = acc * z + levels.row(j);
  return acc;
}

namespace {

/// Sets lambda so that p (lambda at_0/(s mu) + tht) + theta equals target.
void set_load(retrialq::ModelParams& m, double target) {
  const double need = (target - m.theta - m.p * m.tht) / m.p;
  m.lambda = need * m.s * m.mu / m.at_0;
}

}  // namespace

retrialq::ModelParams random_params(Sampler& rng, int s, bool persistent, double xi_max) {
  retrialq::ModelParams m;
  m.s = s;
  m.mu = rng.uniform(0.3, 2.0);
  m.nu = rng.uniform(0.3, 2.0);
  m.at_0 = rng.uniform(0.5, 1.0);
  m.pt_a = rng.uniform(0.0, 0.3);
  m.pb_a = rng.uniform(0.0, 0.1);
  m.p_a = 1.0 - m.pt_a - m.pb_a;
  m.p = rng.uniform(0.6, 1.0);
  m.pb = 1.0 - m.p;
  m.theta = rng.uniform(0.0, 0.1);
  m.tht = rng.uniform(0.0, 0.2);
  m.thb = 1.0 - m.theta - m.tht;
  if (persistent) {
    m.ab = 0.0;
    m.alpha = 1.0;
  } else {
    m.ab = rng.uniform(0.1, 0.6);
    m.alpha = 1.0 - m.ab;
  }
  set_load(m, rng.uniform(0.4, xi_max));
  return m;
}

retrialq::ModelParams random_s1(Sampler& rng, double xi_max) { return random_params(rng, 1, true, xi_max); }

retrialq::ModelParams random_s2_pure(Sampler& rng, double xi_max) {
  retrialq::ModelParams m;
  m.s = 2;
  m.mu = rng.uniform(0.3, 2.0);
  m.nu = rng.uniform(0.3, 2.0);
  m.at_0 = rng.uniform(0.5, 1.0);
  m.theta = rng.uniform(0.0, 0.2);
  m.thb = 1.0 - m.theta;
  set_load(m, rng.uniform(0.3, xi_max));
  return m;
}

retrialq::ModelParams random_okubo(Sampler& rng, int s, double xi_max) {
  retrialq::ModelParams m;
  m.s = s;
  m.mu = rng.uniform(0.3, 2.0);
  m.nu = rng.uniform(0.3, 2.0);
  m.at_0 = rng.uniform(0.5, 1.0);
  m.p = rng.uniform(0.5, 1.0);
  m.pb = 1.0 - m.p;
  m.theta = rng.uniform(0.0, 0.2);
  m.thb = 1.0 - m.theta;
  set_load(m, rng.uniform(0.3, xi_max));
  return m;
}

}  // namespace oracle
