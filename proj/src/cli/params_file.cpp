#include "params_file.hpp"

#include "retrialq/error.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace retrialq::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double* field(ModelParams& m, const std::string& key) {
  static const std::map<std::string, double ModelParams::*> fields{
      {"lambda", &ModelParams::lambda}, {"mu", &ModelParams::mu},     {"nu", &ModelParams::nu},
      {"p_a", &ModelParams::p_a},       {"pt_a", &ModelParams::pt_a}, {"pb_a", &ModelParams::pb_a},
      {"at_0", &ModelParams::at_0},     {"p", &ModelParams::p},       {"pb", &ModelParams::pb},
      {"alpha", &ModelParams::alpha},   {"ab", &ModelParams::ab},     {"theta", &ModelParams::theta},
      {"thb", &ModelParams::thb},       {"tht", &ModelParams::tht}};
  const auto it = fields.find(key);
  return it == fields.end() ? nullptr : &(m.*(it->second));
}

int as_int(const std::string& key, double v) {
  if (v != std::floor(v) || std::abs(v) > 1e9) throw Error("bad-param-file", key + " must be an integer");
  return static_cast<int>(v);
}

void complete_pair(ModelParams& m, const std::set<std::string>& given, const std::string& a, const std::string& b) {
  if (given.count(a) && !given.count(b)) *field(m, b) = 1.0 - *field(m, a);
  if (given.count(b) && !given.count(a)) *field(m, a) = 1.0 - *field(m, b);
}

void complete_triple(ModelParams& m, const std::set<std::string>& given, const std::string& main,
                     const std::string& x, const std::string& y) {
  const std::string keys[3] = {main, x, y};
  int missing = 0;
  for (const auto& k : keys) missing += given.count(k) ? 0 : 1;
  if (missing == 0 || missing == 3) return;
  if (missing == 1) {
    for (const auto& k : keys) {
      if (!given.count(k)) {
        double rest = 0.0;
        for (const auto& o : keys) {
          if (o != k) rest += *field(m, o);
        }
        *field(m, k) = 1.0 - rest;
      }
    }
    return;
  }
  // two missing: the minor ones stay 0 and the main member takes the rest
  double rest = 0.0;
  for (const auto& k : keys) {
    if (k == main) continue;
    if (!given.count(k)) *field(m, k) = 0.0;
    rest += *field(m, k);
  }
  if (given.count(main)) {
    if (std::abs(1.0 - *field(m, main)) <= kSplitTolerance) return;
    throw Error("bad-param-file", main + " given without " + x + " or " + y + ": ambiguous remainder");
  }
  *field(m, main) = 1.0 - rest;
}

}  // namespace

void set_param(ModelParams& m, const std::string& key, double value) {
  if (key == "s") {
    m.s = as_int(key, value);
  } else if (key == "K") {
    m.K = as_int(key, value);
  } else if (key == "rho") {
    if (!(m.at_0 > 0.0)) throw Error("bad-param-file", "rho needs at_0 > 0");
    m.lambda = value * m.s * m.mu * m.thb / m.at_0;
  } else if (double* f = field(m, key)) {
    *f = value;
  } else {
    throw Error("bad-param-file", "unknown key '" + key + "'");
  }
}

ParamFile parse_param_text(const std::string& text) {
  ParamFile out;
  std::set<std::string> given;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("bad-param-file", "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    if (given.count(key)) throw Error("bad-param-file", "line " + std::to_string(line_no) + ": duplicate key " + key);
    if (key == "seed") {
      try {
        std::size_t used = 0;
        out.seed = std::stoull(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
      } catch (const std::exception&) {
        throw Error("bad-param-file", "line " + std::to_string(line_no) + ": seed must be a non-negative integer");
      }
      given.insert(key);
      continue;
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
    } catch (const std::exception&) {
      throw Error("bad-param-file", "line " + std::to_string(line_no) + ": value of " + key + " is not a number");
    }
    if (key == "rho") throw Error("bad-param-file", "rho is a sweep key, set lambda instead");
    set_param(out.params, key, value);
    given.insert(key);
  }
  complete_pair(out.params, given, "p", "pb");
  complete_pair(out.params, given, "alpha", "ab");
  complete_triple(out.params, given, "p_a", "pt_a", "pb_a");
  complete_triple(out.params, given, "thb", "theta", "tht");
  return out;
}

ParamFile load_param_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("bad-param-file", "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_param_text(buf.str());
}

nlohmann::json params_to_json(const ModelParams& m) {
  return {{"lambda", m.lambda}, {"mu", m.mu},     {"nu", m.nu},       {"s", m.s},         {"K", m.K},
          {"p_a", m.p_a},       {"pt_a", m.pt_a}, {"pb_a", m.pb_a},   {"at_0", m.at_0},   {"p", m.p},
          {"pb", m.pb},         {"alpha", m.alpha}, {"ab", m.ab},     {"theta", m.theta}, {"thb", m.thb},
          {"tht", m.tht}};
}

}  // namespace retrialq::cli
