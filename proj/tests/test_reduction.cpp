#include "oracles.hpp"
#include "retrialq/error.hpp"
#include "retrialq/genfun.hpp"
#include "retrialq/reduction.hpp"

#include <doctest.h>

#include <cmath>

using namespace retrialq;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

std::string code_of(void (*fn)()) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

ModelParams feedback_instance(int s) {
  ModelParams m;
  m.s = s;
  m.lambda = 0.5 * s;
  m.mu = 1.1;
  m.nu = 0.8;
  m.p = 0.9;
  m.pb = 0.1;
  m.theta = 0.05;
  m.tht = 0.1;
  m.thb = 0.85;
  m.pt_a = 0.15;
  m.p_a = 0.85;
  return m;
}

ModelParams okubo_instance(int s, double pb, double rho_tilde) {
  ModelParams m;
  m.s = s;
  m.mu = 1.0;
  m.nu = 1.0;
  m.p = 1.0 - pb;
  m.pb = pb;
  m.lambda = s * m.mu / rho_tilde;
  return m;
}

}  // namespace

TEST_SUITE("reduction") {
  TEST_CASE("s=1 reduced matrices") {
    const ModelParams m = feedback_instance(1);
    const ReducedSystem r = reduce_persistent(m);
    const double lt = m.lambda / m.nu;
    for (double z : {0.2, 0.7}) {
      const double k = r.kappa(z);
      CHECK(r.V(z)(0, 0) == doctest::Approx(z - m.pb - k).epsilon(1e-14));
      CHECK(r.U(z)(0, 0) == doctest::Approx(lt * (z * m.pt_a - 1 - k * m.pt_a)).epsilon(1e-14));
    }
    const double smu = m.s * m.mu;
    CHECK(r.kappa(0.4) ==
          doctest::Approx(smu * (m.thb + m.tht * 0.4) / (m.lambda * m.at_0 + smu * m.tht)).epsilon(1e-15));
  }

  TEST_CASE("s=2 reduced matrices") {
    const ModelParams m = feedback_instance(2);
    const ReducedSystem r = reduce_persistent(m);
    const double lt = m.lambda / m.nu, mt = m.mu / m.nu;
    const double z = 0.55, k = r.kappa(z);
    Matrix V(2, 2), U(2, 2);
    V << z - m.pb, -m.p - k, 0, z - m.pb - k;
    U << lt * (z * m.pt_a - 1), lt * (m.p_a - k * m.pt_a), mt * (m.thb + m.tht * z),
        lt * (z * m.pt_a - 1 - k * m.pt_a) - mt * (m.thb + m.tht + k * m.tht);
    CHECK(max_abs(r.V(z) - V) < 1e-14);
    CHECK(max_abs(r.U(z) - U) < 1e-14);
  }

  TEST_CASE("kappa is constant without orbit feedback") {
    ModelParams m = okubo_instance(3, 0.0, 2.5);
    const ReducedSystem r = reduce_persistent(m);
    CHECK(r.kappa1 == 0.0);
    CHECK(r.kappa0 == doctest::Approx(derive(m).rho_tilde).epsilon(1e-15));
  }

  TEST_CASE("entry degrees") {
    CHECK(reduce_persistent(okubo_instance(3, 0.2, 2.0)).V.degree() <= 1);
    CHECK(reduce_persistent(okubo_instance(3, 0.2, 2.0)).U.degree() <= 1);
    CHECK(reduce_persistent(feedback_instance(3)).U.degree() <= 2);
  }

  TEST_CASE("reduction soundness on solver output") {
    oracle::Sampler rng(41);
    for (int rep = 0; rep < 10; ++rep) {
      const ModelParams m = oracle::random_params(rng, rng.integer(1, 6), true);
      const StationaryDistribution d = solve(m);
      const ReducedSystem r = reduce_persistent(m);
      for (int k = 1; k <= 9; ++k) {
        CHECK(reduced_residual(d, r, 0.1 * k) <= 1e-8);
        CHECK(recovery_error(d, r, 0.1 * k) <= 1e-8);
      }
    }
  }

  TEST_CASE("reduction errors") {
    CHECK(code_of([] {
            ModelParams m = feedback_instance(2);
            m.ab = 0.2;
            m.alpha = 0.8;
            reduce_persistent(m);
          }) == "not-persistent");
    CHECK(code_of([] {
            ModelParams m = okubo_instance(2, 0.0, 2.0);
            m.at_0 = 0.0;
            reduce_persistent(m);
          }) == "no-orbit-inflow");
    CHECK(code_of([] { okubo_form(feedback_instance(2)); }) == "not-okubo");
    CHECK(code_of([] {
            ModelParams m = okubo_instance(3, 0.0, 2.0);
            m.tht = 0.1;
            m.thb = 0.9;
            okubo_form(m);
          }) == "not-okubo");
    CHECK(code_of([] {
            ModelParams m = okubo_instance(3, 0.0, 2.0);
            m.p = 0.0;
            m.pb = 1.0;
            standardize(okubo_form(m));
          }) == "pure-orbit");
    CHECK(code_of([] { resolvent_decomposition(standardize(okubo_form(okubo_instance(2, 0.0, 2.0)))); }) ==
          "dimension");
  }

  TEST_CASE("two-server Okubo system") {
    const ModelParams m = okubo_instance(2, 0.0, 1.7);
    const OkuboSystem o = okubo_form(m);
    const double rt = 1.7, lt = m.lambda / m.nu, mt = m.mu / m.nu, z = 0.8;
    Matrix V(2, 2), U(2, 2);
    V << z, -1 - rt, 0, z - rt;
    U << -lt, lt, mt, -lt - mt;
    CHECK(max_abs(z * Matrix::Identity(2, 2) - o.T - V) < 1e-14);
    CHECK(max_abs(o.U - U) < 1e-14);
  }

  TEST_CASE("Okubo spectrum") {
    const OkuboSystem o = okubo_form(okubo_instance(3, 0.2, 1.5));
    const auto js = o.jordan_structure();
    REQUIRE(js.size() == 2);
    CHECK(js[0].eigenvalue == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(js[0].block_sizes == std::vector<int>{2});
    CHECK(js[1].eigenvalue == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(js[1].block_sizes == std::vector<int>{1});
  }

  TEST_CASE("Okubo residual on solver output") {
    oracle::Sampler rng(42);
    for (int rep = 0; rep < 6; ++rep) {
      const ModelParams m = oracle::random_okubo(rng, rng.integer(1, 6));
      const StationaryDistribution d = solve(m);
      const OkuboSystem o = okubo_form(m);
      for (int k = 1; k <= 9; ++k) CHECK(okubo_residual(d, o, 0.1 * k) <= 1e-8);
    }
  }

  TEST_CASE("Okubo U is the loss-chain generator minus lt E") {
    oracle::Sampler rng(43);
    for (int s = 1; s <= 8; ++s) {
      const OkuboSystem o = okubo_form(oracle::random_okubo(rng, s));
      Matrix E = Matrix::Zero(s, s);
      E(s - 1, s - 1) = 1.0;
      const Matrix G = o.U + o.lt * E;
      CHECK(G.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-14);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          if (std::abs(i - j) > 1) CHECK(G(i, j) == 0.0);
        }
      }
    }
  }

  TEST_CASE("standardization") {
    const OkuboSystem plain = okubo_form(okubo_instance(3, 0.0, 2.0));
    const OkuboSystem same = standardize(plain);
    CHECK(max_abs(same.T - plain.T) == 0.0);
    CHECK(same.rho_tilde == plain.rho_tilde);

    const OkuboSystem o = okubo_form(okubo_instance(3, 0.5, 1.0));
    CHECK(o.regular_point() == doctest::Approx(1.5));
    const OkuboSystem st = standardize(o);
    CHECK(st.rho_tilde == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(st.regular_point() == doctest::Approx((1.5 - o.pbar) / o.p));
    CHECK(st.pbar == 0.0);
    CHECK(st.xi() == doctest::Approx(o.xi()).epsilon(1e-15));
  }

  TEST_CASE("T identities") {
    oracle::Sampler rng(44);
    for (int s = 1; s <= 20; ++s) {
      const OkuboSystem st = standardize(okubo_form(oracle::random_okubo(rng, s)));
      Matrix top = Matrix::Identity(s, s);
      for (int k = 1; k < s; ++k) top = top * st.T;
      const Matrix lhs = top * st.T;
      CHECK(max_abs(lhs - st.rho_tilde * top) <= 1e-12 * std::max(1.0, max_abs(lhs)));

      const Matrix L = last_column_ones(s), Tp = upper_shift(s);
      CHECK(max_abs(L * L - L) == 0.0);
      CHECK(max_abs(L * Tp) == 0.0);
      Matrix L1 = L;
      L1(s - 1, s - 1) = 0.0;
      CHECK(max_abs(Tp * L - L1) == 0.0);
    }
  }

  TEST_CASE("s=3 resolvent matches the explicit display") {
    for (double rb : {0.7, 1.9, 3.2}) {
      ModelParams m = okubo_instance(3, 0.0, rb);
      const OkuboSystem st = standardize(okubo_form(m));
      const double x = 1.0 / rb;
      Matrix N(3, 3), P(3, 3);
      N << 0, 1, -(1 + x), 0, 0, 0, 0, 0, 0;
      P << 0, 0, x + 1 + 1 / x, 0, 0, 1 + 1 / x, 0, 0, 1 / x;
      CHECK(max_abs(st.T - st.T * st.T / rb - N) < 1e-14);
      CHECK(max_abs(st.T * st.T / rb - P) < 1e-14);
      for (double y : {0.37, 1.3, 5.1}) {
        if (std::abs(y - rb) < 0.05) continue;
        const Matrix display = (Matrix::Identity(3, 3) + N / y + P / (y - rb)) / y;
        CHECK(max_abs(okubo_resolvent(st, y) - display) < 1e-12 * max_abs(display));
      }
    }
  }

  TEST_CASE("resolvent partial fractions against dense inverses") {
    oracle::Sampler rng(45);
    for (int s = 3; s <= 12; ++s) {
      const OkuboSystem st = standardize(okubo_form(oracle::random_okubo(rng, s)));
      const ResolventDecomposition dec = resolvent_decomposition(st);
      CHECK(dec.poincare_rank_zero == s - 2);
      for (int c = 0; c + 1 < s; ++c) CHECK(dec.D.col(c).cwiseAbs().maxCoeff() == 0.0);
      for (double y : {0.37, 5.1}) {
        if (std::abs(y - st.rho_tilde) < 0.05) continue;
        const Matrix dense = st.U * (y * Matrix::Identity(s, s) - st.T).inverse();
        CHECK(max_abs(dec.evaluate(y) - dense) <= 1e-10 * max_abs(dense));
        const Matrix inv = (y * Matrix::Identity(s, s) - st.T).inverse();
        CHECK(max_abs(okubo_resolvent(st, y) - inv) <= 1e-10 * max_abs(inv));
      }
    }
  }
}
