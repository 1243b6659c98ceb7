#include "oracles.hpp"
#include "retrialq/closed_form.hpp"
#include "retrialq/error.hpp"
#include "retrialq/genfun.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace retrialq;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

ModelParams general_s1() {
  ModelParams m;
  m.lambda = 0.6;
  m.mu = 1.1;
  m.nu = 0.7;
  m.p = 0.7;
  m.pb = 0.3;
  m.ab = 0.25;
  m.alpha = 0.75;
  return m;
}

}  // namespace

TEST_SUITE("genfun") {
  TEST_CASE("s=1 full V") {
    const ModelParams m = general_s1();
    const PolyMatrixSystem sys = build_system(m, SystemVariant::Full, false);
    const double z = 0.37;
    Matrix V(2, 2);
    V << z - m.pb, -m.p, 0, m.ab * (z - 1);
    V *= m.nu;
    CHECK(max_abs(sys.V(z) - V) < 1e-15);
  }

  TEST_CASE("s=1 simplified V") {
    const ModelParams m = general_s1();
    const PolyMatrixSystem sys = build_system(m, SystemVariant::Simplified, false);
    const double z = 0.61;
    Matrix V(2, 2);
    V << z - m.pb, 1, 0, m.ab;
    V *= m.nu;
    CHECK(max_abs(sys.V(z) - V) < 1e-15);
  }

  TEST_CASE("s=2 simplified U corner is lt_ob") {
    ModelParams m;
    m.s = 2;
    m.lambda = 0.8;
    m.nu = 1.6;
    m.at_0 = 0.7;
    const PolyMatrixSystem sys = build_system(m, SystemVariant::Simplified, true);
    CHECK(sys.U(0.4)(2, 2) == doctest::Approx(m.lambda * m.at_0 / m.nu).epsilon(1e-14));
  }

  TEST_CASE("reduced and okubo are not built here") {
    CHECK_THROWS_AS(build_system(classic_params(0.5, 1, 1), SystemVariant::Reduced), Error);
    CHECK_THROWS_AS(build_system(classic_params(0.5, 1, 1), SystemVariant::Okubo), Error);
  }

  TEST_CASE("eval_gf basic values") {
    const StationaryDistribution d = solve(classic_params(0.5, 1, 1));
    const GfValue one = eval_gf(d, 1.0);
    CHECK(one.p_real().sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(one.p_real()(1) - d.phase_marginals()(1)) < 1e-15);
    const GfValue zero = eval_gf(d, 0.0);
    CHECK(max_abs(zero.p_real() - d.level(0)) == 0.0);
    CHECK(std::abs(eval_gf(d, 0.5).p_real()(0) - 0.5 * std::sqrt(0.5 / 0.75)) < 1e-12);
    CHECK_THROWS_AS(eval_gf(d, 2.5, 2.0), Error);
  }

  TEST_CASE("ode residuals for solver output") {
    oracle::Sampler rng(31);
    for (int rep = 0; rep < 10; ++rep) {
      const ModelParams m = oracle::random_params(rng, rng.integer(1, 5), rep % 2 == 0);
      const StationaryDistribution d = solve(m);
      for (SystemVariant v : {SystemVariant::Full, SystemVariant::Simplified}) {
        for (double r : ode_residual_grid(d, build_system(m, v))) CHECK(r <= 1e-8);
      }
    }
  }

  TEST_CASE("ode residual negative control") {
    oracle::Sampler rng(32);
    const ModelParams m = oracle::random_params(rng, 2, true);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix lv(40, 3);
    for (Eigen::Index j = 0; j < lv.rows(); ++j) {
      for (Eigen::Index i = 0; i < 3; ++i) lv(j, i) = u(gen) * std::pow(0.6, static_cast<double>(j));
    }
    const StationaryDistribution d = distribution_from_levels(lv);
    CHECK(ode_residual(d, m, SystemVariant::Full, 0.5) >= 1e-2);
  }

  TEST_CASE("closed form satisfies the full s=1 system") {
    ModelParams m;
    m.lambda = 0.4;
    m.mu = 1.0;
    m.nu = 0.9;
    m.p = 0.85;
    m.pb = 0.15;
    m.tht = 0.1;
    m.thb = 0.85;
    m.theta = 0.05;
    m.pt_a = 0.1;
    m.p_a = 0.9;
    const S1Solution sol = s1_solution(m);
    const PolyMatrixSystem sys = build_system(m, SystemVariant::Full);
    const double z = 0.3;
    const auto v = sol.value(z);
    const auto dv = sol.derivative(z);
    RowVector p(2), dp(2);
    p << v.first, v.second;
    dp << dv.first, dv.second;
    CHECK((dp * sys.V(z) - p * sys.U(z)).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("bivariate equation") {
    oracle::Sampler rng(33);
    for (int rep = 0; rep < 8; ++rep) {
      const ModelParams m = oracle::random_params(rng, rng.integer(1, 4), rep % 2 == 0);
      const StationaryDistribution d = solve(m);
      CHECK(bivariate_residual(d, m, 0.5, 0.5) <= 1e-8);
      CHECK(bivariate_residual(d, m, 1.0, 1.0) <= 1e-12);
    }
  }

  TEST_CASE("bivariate equation specializes to the single-server family form") {
    for (int s : {1, 2, 3}) {
      const ModelParams m = classic_params(0.3 * s, 1.0, 1.2, s);
      const StationaryDistribution d = solve(m);
      for (double y : {0.2, 0.5, 0.9}) {
        for (double z : {0.3, 0.7}) {
          const BivariateSides g = bivariate_sides(d, m, y, z);
          const BivariateSides f = falin_sides(d, m, y, z);
          CHECK(std::abs(g.rhs - f.rhs) <= 1e-12);
          CHECK(std::abs(g.lhs - f.lhs) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("determinant examples") {
    ModelParams m;
    m.s = 2;
    m.mu = 1.0;
    m.lambda = 1.0;  // lambda_ob / (2 mu) = 0.5, rho_tilde = 2
    CHECK(det_V_formula(m, SystemVariant::Reduced, 3.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(det_V(m, SystemVariant::Reduced, 3.0) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(det_V(m, SystemVariant::Full, 1.7) == 0.0);

    oracle::Sampler rng(34);
    for (int rep = 0; rep < 10; ++rep) {
      const ModelParams g = oracle::random_params(rng, rng.integer(1, 6), false);
      CHECK(std::abs(det_V(g, SystemVariant::Full, 1.0)) <= 1e-14);
    }
  }

  TEST_CASE("determinant identities at random z") {
    oracle::Sampler rng(35);
    for (int rep = 0; rep < 30; ++rep) {
      const int s = rng.integer(1, 10);
      const ModelParams m = oracle::random_params(rng, s, rep % 2 == 0);
      for (int k = 0; k < 20; ++k) {
        const double z = rng.uniform(-1.5, 2.5);
        for (SystemVariant v : {SystemVariant::Full, SystemVariant::Simplified}) {
          const double f = det_V_formula(m, v, z);
          CHECK(std::abs(det_V(m, v, z) - f) <= 1e-12 * std::max(1.0, std::abs(f)));
        }
        if (m.ab == 0.0) {
          const double f = det_V_formula(m, SystemVariant::Reduced, z);
          CHECK(std::abs(det_V(m, SystemVariant::Reduced, z) - f) <= 1e-12 * std::max(1.0, std::abs(f)));
        }
      }
    }
  }

  TEST_CASE("singularities") {
    ModelParams m = classic_params(1.2, 1, 1, 3);
    m.p = 0.8;
    m.pb = 0.2;
    const Singularities sg = singularities(m);
    CHECK(sg.pbar == doctest::Approx(0.2));
    CHECK(sg.pbar_multiplicity == 2);
    CHECK(sg.pbar_irregular);
    REQUIRE(sg.z_r.has_value());
    CHECK(*sg.z_r == doctest::Approx(derive(m).z_r));
  }

  TEST_CASE("mmoo moments") {
    Matrix A(1, 1), B = Matrix::Zero(1, 1), C(1, 1);
    A << 2.0;
    C << 1.0;
    const auto mk = mmoo_moments(A, B, C, 10);
    for (int k = 0; k <= 10; ++k) CHECK(mk[static_cast<size_t>(k)](0) == doctest::Approx(std::pow(2.0, k)).epsilon(1e-12));

    A.setZero();
    const auto zero = mmoo_moments(A, B, C, 4);
    for (int k = 1; k <= 4; ++k) CHECK(zero[static_cast<size_t>(k)].cwiseAbs().maxCoeff() == 0.0);

    Matrix Z = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(mmoo_moments(A, B, Z, 2), Error);
  }

  TEST_CASE("two-phase mmoo m_1 against a dense truncation") {
    const std::vector<double> a{1.3, 0.4}, c{1.0, 0.7};
    Matrix B(2, 2);
    B << -0.6, 0.6, 0.9, -0.9;
    const Matrix A = Eigen::Vector2d(a[0], a[1]).asDiagonal();
    const Matrix C = Eigen::Vector2d(c[0], c[1]).asDiagonal();
    const auto mk = mmoo_moments(A, B, C, 1);
    const Matrix lv = oracle::mmoo_dense(a, B, c, 80);
    const double h = 1e-5;
    const Eigen::RowVectorXd fd = (oracle::series_at(lv, 1 + h) - oracle::series_at(lv, 1 - h)) / (2 * h);
    for (int ph = 0; ph < 2; ++ph) {
      CHECK(std::abs(mk[1](ph) - fd(ph)) <= 1e-4 * std::abs(fd(ph)));
      CHECK(mk[1](ph) >= 0.0);
    }
    double mean = 0.0;
    for (Eigen::Index j = 0; j < lv.rows(); ++j) mean += j * lv.row(j).sum();
    CHECK(mk[1].sum() == doctest::Approx(mean).epsilon(1e-8));
  }

  TEST_CASE("coefficient recurrence reproduces the balance rows") {
    oracle::Sampler rng(36);
    for (int rep = 0; rep < 20; ++rep) {
      const int s = rng.integer(1, 5);
      const ModelParams m = oracle::random_params(rng, s, rep % 2 == 0);
      Matrix C0 = Matrix::Zero(s + 1, s + 1);
      if (rep % 3 == 0) {
        for (int i = 0; i < s; ++i) C0(i, i + 1) = rng.uniform(0.0, 0.5);
      }
      const QbdBlocks b = build_blocks(m, C0);
      const CoefficientRecurrence rec = expand_recurrence(full_system(b, 1.0));
      CHECK(max_abs(rec.prev - b.A) == 0.0);
      CHECK(max_abs(rec.cur0 - (b.B - b.At - b.C0t)) == 0.0);
      CHECK(max_abs(rec.cur1 + b.Ct) == 0.0);
      CHECK(max_abs(rec.next0 - (b.C + b.C0)) == 0.0);
      CHECK(max_abs(rec.next1 - b.C) == 0.0);
      // (B - At - C0t) + C0t: exact up to the rounding of one addition.
      const Matrix local0 = b.B - b.At;
      CHECK(max_abs(rec.boundary_cur - local0) <= 4 * std::numeric_limits<double>::epsilon() * max_abs(local0));
      CHECK(max_abs(rec.boundary_next - (b.C + b.C0)) == 0.0);
    }
  }
}
