#include "oracles.hpp"
#include "retrialq/error.hpp"
#include "retrialq/simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace retrialq;

namespace {

SimConfig config_for(const ModelParams& m, std::uint64_t events, std::uint64_t seed = 7) {
  SimConfig c;
  c.params = m;
  c.events = events;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("empty system") {
    const SimResult r = simulate(config_for(classic_params(0.0, 1, 1), 1000));
    CHECK(r.estimate_at(0, 0) == 1.0);
    CHECK(r.estimate.sum() == doctest::Approx(1.0));
    const ComparisonReport c = compare(r, solve(classic_params(0.0, 1, 1)));
    CHECK(c.tv == 0.0);
    CHECK(c.pass);
  }

  TEST_CASE("classic idle probability") {
    const SimResult r = simulate(config_for(classic_params(0.5, 1, 1), 10'000'000));
    CHECK(std::abs(r.estimate_at(0, 0) - 0.3535534) <= 3 * r.half_width(0, 0));
    CHECK(r.estimate.minCoeff() >= 0.0);
    CHECK(r.estimate.sum() == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("fast impatient orbit approaches the loss system") {
    ModelParams m;
    m.s = 3;
    m.lambda = 2.0;
    m.mu = 1.0;
    m.nu = 1e6;
    m.ab = 1.0;
    m.alpha = 0.0;
    const SimResult r = simulate(config_for(m, 2'000'000));
    const auto erl = oracle::erlang_loss(3, 2.0);
    const RowVector marg = r.estimate.colwise().sum();
    for (int i = 0; i <= 3; ++i) CHECK(std::abs(marg(i) - erl[static_cast<size_t>(i)]) < 0.01);
  }

  TEST_CASE("fixed seed reproduces the run") {
    oracle::Sampler rng(3);
    const ModelParams m = oracle::random_params(rng, 2, false);
    const SimResult a = simulate(config_for(m, 200'000, 99));
    const SimResult b = simulate(config_for(m, 200'000, 99));
    const SimResult c = simulate(config_for(m, 200'000, 100));
    CHECK((a.estimate - b.estimate).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.half_width - b.half_width).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.counts.total() == b.counts.total());
    CHECK((a.estimate - c.estimate).cwiseAbs().maxCoeff() > 0.0);
  }

  TEST_CASE("orbit flow balance and blocked abandonment rate") {
    ModelParams m;
    m.s = 2;
    m.lambda = 2.4;
    m.mu = 1.0;
    m.nu = 0.7;
    m.ab = 0.3;
    m.alpha = 0.7;
    m.tht = 0.1;
    m.thb = 0.9;
    const SimResult r = simulate(config_for(m, 4'000'000));
    const double joins = static_cast<double>(r.counts.orbit_joins());
    const double leaves = static_cast<double>(r.counts.orbit_departures());
    CHECK(std::abs(joins - leaves) <= 1e-3 * joins + 100.0);
    const double rate = static_cast<double>(r.counts.retrial_blocked_abandon) / r.blocked_orbit_exposure;
    CHECK(rate == doctest::Approx(m.nu * m.ab).epsilon(0.03));
  }

  TEST_CASE("compare passes on the right model and fails on the wrong one") {
    const ModelParams lo = classic_params(0.3, 1, 1), hi = classic_params(0.6, 1, 1);
    const SimResult sim_hi = simulate(config_for(hi, 2'000'000));
    CHECK(compare(sim_hi, solve(hi)).pass);
    const ComparisonReport bad = compare(sim_hi, solve(lo));
    CHECK_FALSE(bad.pass);
    CHECK(bad.tv > 0.1);
  }

  TEST_CASE("configuration errors") {
    SimConfig c = config_for(classic_params(0.5, 1, 1), 1000);
    c.batches = 5;
    CHECK_THROWS_AS(simulate(c), Error);
    c.batches = 20;
    c.warmup = 0.7;
    CHECK_THROWS_AS(simulate(c), Error);
    c.warmup = 0.1;
    c.params = classic_params(0.9, 1, 1);
    c.jcap = 2;
    c.events = 100'000;
    try {
      simulate(c);
      FAIL("expected cap-exceeded");
    } catch (const Error& e) {
      CHECK(e.code() == "cap-exceeded");
    }
  }

  TEST_CASE("student t quantile") {
    CHECK(t_quantile_975(19) == doctest::Approx(2.093024).epsilon(1e-6));
    CHECK(t_quantile_975(1) == doctest::Approx(12.7062).epsilon(1e-5));
  }

  TEST_CASE("replications merge") {
    SimConfig c = config_for(classic_params(0.5, 1, 1), 500'000);
    const SimResult merged = simulate_replications(c, {1, 2, 3, 4}, 2);
    const SimResult one = simulate(c);
    CHECK(merged.half_width(0, 0) < one.half_width(0, 0));
    CHECK(std::abs(merged.estimate_at(0, 0) - 0.3535534) <= 3 * merged.half_width(0, 0));
  }

  TEST_CASE("occupancy CSV round trip") {
    const SimResult r = simulate(config_for(classic_params(0.5, 1, 1), 100'000));
    std::stringstream ss;
    write_occupancy_csv(ss, r);
    const SimResult back = read_occupancy_csv(ss);
    REQUIRE(back.estimate.rows() >= 5);
    CHECK(back.estimate.cols() == 2);
    for (int j = 0; j < back.estimate.rows(); ++j) {
      for (int i = 0; i <= 1; ++i) {
        CHECK(back.estimate_at(i, j) == r.estimate_at(i, j));
        CHECK(back.half_width(j, i) == r.half_width(j, i));
      }
    }
  }
}
