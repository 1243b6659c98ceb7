#include "retrialq/simulator.hpp"

#include "retrialq/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace retrialq {

std::uint64_t EventCounts::total() const {
  return arrival_accept + arrival_orbit + arrival_blocked_orbit + arrival_balk + arrival_blocked_balk +
         retrial_success + retrial_abandon + retrial_blocked + retrial_blocked_abandon + service_repeat +
         service_leave + service_orbit;
}

double SimResult::estimate_at(int i, int j) const {
  if (i < 0 || i > s || j < 0 || j > jcap) return 0.0;
  return estimate(j, i);
}

double t_quantile_975(int dof) {
  if (dof < 1) throw Error("invalid-argument", "t quantile needs dof >= 1");
  return boost::math::quantile(boost::math::students_t(dof), 0.975);
}

namespace {

EventCounts& operator+=(EventCounts& a, const EventCounts& b) {
  a.arrival_accept += b.arrival_accept;
  a.arrival_orbit += b.arrival_orbit;
  a.arrival_blocked_orbit += b.arrival_blocked_orbit;
  a.arrival_balk += b.arrival_balk;
  a.arrival_blocked_balk += b.arrival_blocked_balk;
  a.retrial_success += b.retrial_success;
  a.retrial_abandon += b.retrial_abandon;
  a.retrial_blocked += b.retrial_blocked;
  a.retrial_blocked_abandon += b.retrial_blocked_abandon;
  a.service_repeat += b.service_repeat;
  a.service_leave += b.service_leave;
  a.service_orbit += b.service_orbit;
  return a;
}

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : gen_(seed) {}
  double operator()() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

/// Occupancy accumulator split into batches after warmup.
class Accumulator {
 public:
  Accumulator(int s, int jcap) : s_(s), jcap_(jcap), current_(Matrix::Zero(jcap + 1, s + 1)) {}

  void add(int i, long j, double dt, bool warm) {
    if (!warm) return;
    if (j > jcap_) {
      cap_time_ += dt;
    } else {
      current_(j, i) += dt;
    }
    if (i == s_) exposure_ += static_cast<double>(j) * dt;
    batch_time_ += dt;
  }

  void close_batch() {
    done_.push_back(current_);
    times_.push_back(batch_time_);
    current_.setZero();
    batch_time_ = 0.0;
  }

  void finish(SimResult& out) const {
    const Index rows = jcap_ + 1, cols = s_ + 1;
    Matrix total = Matrix::Zero(rows, cols);
    double time = 0.0;
    for (size_t b = 0; b < done_.size(); ++b) {
      total += done_[b];
      time += times_[b];
    }
    const double all = time;
    out.time = all;
    out.cap_fraction = all > 0.0 ? cap_total() / all : 0.0;
    out.blocked_orbit_exposure = exposure_;
    out.estimate = all > 0.0 ? Matrix(total / all) : Matrix::Zero(rows, cols);

    const int b = static_cast<int>(done_.size());
    Matrix mean = Matrix::Zero(rows, cols), sq = Matrix::Zero(rows, cols);
    for (int k = 0; k < b; ++k) {
      const Matrix frac = times_[static_cast<size_t>(k)] > 0.0 ? Matrix(done_[static_cast<size_t>(k)] / times_[static_cast<size_t>(k)])
                                                               : Matrix::Zero(rows, cols);
      mean += frac;
      sq += frac.cwiseProduct(frac);
    }
    mean /= b;
    const Matrix var = ((sq / b - mean.cwiseProduct(mean)) * (static_cast<double>(b) / (b - 1))).cwiseMax(0.0);
    out.half_width = t_quantile_975(b - 1) * (var / b).cwiseSqrt();
  }

  double cap_total() const { return cap_time_; }

 private:
  using Index = Eigen::Index;
  int s_, jcap_;
  Matrix current_;
  double batch_time_ = 0.0;
  double cap_time_ = 0.0;
  double exposure_ = 0.0;
  std::vector<Matrix> done_;
  std::vector<double> times_;
};

void check_config(const SimConfig& c) {
  require_valid(c.params);
  if (c.batches < 10) throw Error("invalid-config", "batch count must be >= 10");
  if (!(c.warmup >= 0.0 && c.warmup <= 0.5)) throw Error("invalid-config", "warmup fraction must lie in [0, 0.5]");
  if (c.jcap < 1) throw Error("invalid-config", "jcap must be >= 1");
  if (c.time_horizon <= 0.0 && c.events < static_cast<std::uint64_t>(c.batches)) {
    throw Error("invalid-config", "event horizon shorter than the batch count");
  }
}

}  // namespace

SimResult simulate(const SimConfig& cfg) {
  check_config(cfg);
  const ModelParams& m = cfg.params;
  const int s = m.s;
  Uniform uniform(cfg.seed);
  Accumulator acc(s, cfg.jcap);
  EventCounts counts;

  const bool by_time = cfg.time_horizon > 0.0;
  // Event mode: boundaries are event indices; time mode: simulated times.
  const double horizon = by_time ? cfg.time_horizon : static_cast<double>(cfg.events);
  const double warm_end = cfg.warmup * horizon;
  const double batch_len = (horizon - warm_end) / cfg.batches;
  std::vector<double> bounds;
  for (int b = 1; b <= cfg.batches; ++b) bounds.push_back(b == cfg.batches ? horizon : warm_end + b * batch_len);
  if (!by_time) {
    for (double& b : bounds) b = std::floor(b);
  }
  const double warm_mark = by_time ? warm_end : std::floor(warm_end);

  int i = 0;
  long j = 0;
  double clock = 0.0;  // time, or events so far
  std::size_t batch = 0;
  bool warm = warm_mark <= 0.0;
  std::uint64_t events = 0;

  auto advance_time = [&](double dt) {
    // split the holding interval across warmup and batch boundaries
    while (dt > 0.0 && batch < bounds.size()) {
      const double edge = warm ? bounds[batch] : warm_mark;
      const double step = std::min(dt, edge - clock);
      acc.add(i, j, step, warm);
      clock += step;
      dt -= step;
      if (clock >= edge) {
        if (warm) {
          acc.close_batch();
          ++batch;
        } else {
          warm = true;
        }
      }
    }
  };

  while (batch < bounds.size()) {
    const double arrival = m.lambda;
    const double service = i * m.mu;
    const double orbit = static_cast<double>(j) * m.nu;
    const double total = arrival + service + orbit;
    if (!(total > 0.0)) {
      // absorbing state: it holds for the rest of the horizon
      if (by_time) {
        advance_time(horizon - clock);
      } else {
        while (batch < bounds.size()) {
          acc.add(i, j, 1.0, true);
          acc.close_batch();
          ++batch;
        }
      }
      break;
    }
    const double dt = -std::log(uniform()) / total;
    if (by_time) {
      advance_time(dt);
      if (batch >= bounds.size()) break;
    } else {
      acc.add(i, j, dt, warm);
    }

    double v = uniform() * total;
    const bool counted = warm;
    EventCounts delta;
    if (v < arrival) {
      v /= arrival;
      if (i < s) {
        if (v < m.p_a) {
          ++i;
          ++delta.arrival_accept;
        } else if (v < m.p_a + m.pt_a) {
          ++j;
          ++delta.arrival_orbit;
        } else {
          ++delta.arrival_balk;
        }
      } else if (v < m.at_0) {
        ++j;
        ++delta.arrival_blocked_orbit;
      } else {
        ++delta.arrival_blocked_balk;
      }
    } else if (v < arrival + service) {
      v = (v - arrival) / service;
      if (v < m.theta) {
        ++delta.service_repeat;
      } else if (v < m.theta + m.thb) {
        --i;
        ++delta.service_leave;
      } else {
        --i;
        ++j;
        ++delta.service_orbit;
      }
    } else {
      v = (v - arrival - service) / orbit;
      if (i < s) {
        if (v < m.p) {
          ++i;
          --j;
          ++delta.retrial_success;
        } else {
          --j;
          ++delta.retrial_abandon;
        }
      } else if (v < m.alpha) {
        ++delta.retrial_blocked;
      } else {
        --j;
        ++delta.retrial_blocked_abandon;
      }
    }
    if (counted) counts += delta;
    ++events;

    if (!by_time) {
      clock += 1.0;
      if (!warm && clock >= warm_mark) {
        warm = true;
      } else if (warm && clock >= bounds[batch]) {
        acc.close_batch();
        ++batch;
      }
    }
  }

  SimResult out;
  out.s = s;
  out.jcap = cfg.jcap;
  out.seed = cfg.seed;
  out.events = events;
  out.counts = counts;
  acc.finish(out);
  if (out.cap_fraction > 1e-3) {
    throw Error("cap-exceeded", "orbit above jcap for " + std::to_string(out.cap_fraction * 100.0) + "% of time");
  }
  return out;
}

SimResult merge_replications(const std::vector<SimResult>& runs) {
  if (runs.empty()) throw Error("invalid-argument", "no replications to merge");
  SimResult out = runs.front();
  if (runs.size() == 1) return out;
  const auto rows = out.estimate.rows(), cols = out.estimate.cols();
  for (const auto& r : runs) {
    if (r.estimate.rows() != rows || r.estimate.cols() != cols) {
      throw Error("invalid-argument", "replications differ in shape");
    }
  }
  out.counts = EventCounts{};
  out.time = out.blocked_orbit_exposure = out.cap_fraction = 0.0;
  out.events = 0;
  for (const auto& r : runs) {
    out.counts += r.counts;
    out.time += r.time;
    out.blocked_orbit_exposure += r.blocked_orbit_exposure;
    out.cap_fraction += r.cap_fraction * r.time;
    out.events += r.events;
  }
  out.cap_fraction = out.time > 0.0 ? out.cap_fraction / out.time : 0.0;
  const double n = static_cast<double>(runs.size());
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index i = 0; i < cols; ++i) {
      bool all_positive = true;
      double w = 0.0, wx = 0.0, mean = 0.0, hw_max = 0.0;
      for (const auto& r : runs) {
        const double h = r.half_width(j, i);
        all_positive = all_positive && h > 0.0;
        mean += r.estimate(j, i) / n;
        hw_max = std::max(hw_max, h);
        if (h > 0.0) {
          w += 1.0 / (h * h);
          wx += r.estimate(j, i) / (h * h);
        }
      }
      if (all_positive) {
        out.estimate(j, i) = wx / w;
        out.half_width(j, i) = 1.0 / std::sqrt(w);
      } else {
        out.estimate(j, i) = mean;
        out.half_width(j, i) = hw_max / std::sqrt(n);
      }
    }
  }
  return out;
}

SimResult simulate_replications(const SimConfig& config, const std::vector<std::uint64_t>& seeds, int jobs) {
  if (seeds.empty()) throw Error("invalid-argument", "no seeds");
  std::vector<SimResult> runs(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < seeds.size(); k = next++) {
      try {
        SimConfig c = config;
        c.seed = seeds[k];
        runs[k] = simulate(c);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(seeds.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return merge_replications(runs);
}

ComparisonReport compare(const SimResult& sim, const StationaryDistribution& dist) {
  ComparisonReport rep;
  const Eigen::Index rows = std::min<Eigen::Index>(sim.estimate.rows(), dist.pi.rows());
  const Eigen::Index cols = std::min<Eigen::Index>(sim.estimate.cols(), dist.pi.cols());
  double tv = 0.0;
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index i = 0; i < cols; ++i) {
      const double a = sim.estimate(j, i), b = dist.pi(j, i);
      const double diff = std::abs(a - b);
      tv += diff;
      if (std::max(a, b) <= 1e-6) continue;
      ++rep.cells;
      const double h = sim.half_width(j, i);
      if (diff <= 3.0 * h) ++rep.within;
      if (h > 0.0) {
        rep.max_abs_z = std::max(rep.max_abs_z, diff / h);
      } else if (diff > 0.0) {
        rep.max_abs_z = std::numeric_limits<double>::infinity();
      }
    }
  }
  rep.tv = 0.5 * tv;
  rep.fraction = rep.cells > 0 ? static_cast<double>(rep.within) / static_cast<double>(rep.cells) : 1.0;
  rep.pass = rep.fraction >= 0.95;
  return rep;
}

void write_occupancy_csv(std::ostream& out, const SimResult& sim) {
  out << "i,j,estimate,half_width\n";
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < sim.estimate.rows(); ++j) {
    for (Eigen::Index i = 0; i < sim.estimate.cols(); ++i) {
      const double e = sim.estimate(j, i), h = sim.half_width(j, i);
      if (e == 0.0 && h == 0.0) continue;
      out << i << ',' << j << ',' << e << ',' << h << '\n';
    }
  }
}

SimResult read_occupancy_csv(std::istream& in) {
  struct Cell {
    int i;
    long j;
    double e, h;
  };
  std::vector<Cell> cells;
  std::string line;
  bool header = false;
  int columns = 0;
  int max_i = 0;
  long max_j = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
      if (columns != 3 && columns != 4) throw Error("bad-csv", "expected 3 or 4 columns: " + line);
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Cell c{0, 0, 0.0, 0.0};
    ls >> c.i >> c.j >> c.e;
    if (columns == 4) ls >> c.h;
    if (ls.fail() || c.i < 0 || c.j < 0) throw Error("bad-csv", "unreadable row at line " + std::to_string(line_no));
    max_i = std::max(max_i, c.i);
    max_j = std::max(max_j, c.j);
    cells.push_back(c);
  }
  if (!header) throw Error("bad-csv", "missing header");
  SimResult out;
  out.s = max_i;
  out.jcap = static_cast<int>(max_j);
  out.estimate = Matrix::Zero(max_j + 1, max_i + 1);
  out.half_width = Matrix::Zero(max_j + 1, max_i + 1);
  for (const auto& c : cells) {
    out.estimate(c.j, c.i) = c.e;
    out.half_width(c.j, c.i) = c.h;
  }
  return out;
}

}  // namespace retrialq
