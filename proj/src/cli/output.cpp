#include "output.hpp"

#include "retrialq/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace retrialq::cli {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return hex.str();
}

std::string manifest_comment() { return std::string("# manifest: ") + kManifestName; }

void write_distribution_csv(std::ostream& out, const StationaryDistribution& dist) {
  out << "i,j,probability\n" << std::setprecision(17);
  for (Eigen::Index j = 0; j < dist.pi.rows(); ++j) {
    for (Eigen::Index i = 0; i < dist.pi.cols(); ++i) {
      const double v = dist.pi(j, i);
      if (v != 0.0) out << i << ',' << j << ',' << v << '\n';
    }
  }
}

StationaryDistribution read_distribution_csv(std::istream& in, int phases) {
  struct Cell {
    long i, j;
    double v;
  };
  std::vector<Cell> cells;
  std::string line;
  bool header = false;
  long max_i = phases > 0 ? phases - 1 : 0, max_j = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("i,j,", 0) != 0) throw Error("bad-csv", "unexpected header: " + line);
      header = true;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Cell c{0, 0, 0.0};
    ls >> c.i >> c.j >> c.v;
    if (ls.fail() || c.i < 0 || c.j < 0) throw Error("bad-csv", "unreadable row: " + line);
    max_i = std::max(max_i, c.i);
    max_j = std::max(max_j, c.j);
    cells.push_back(c);
  }
  if (!header) throw Error("bad-csv", "missing header");
  Matrix levels = Matrix::Zero(max_j + 1, max_i + 1);
  for (const auto& c : cells) levels(c.j, c.i) = c.v;
  return distribution_from_levels(levels);
}

StationaryDistribution read_distribution_file(const std::string& path, int phases) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read " + path);
  return read_distribution_csv(in, phases);
}

Manifest::Manifest(std::string command, std::string out_dir)
    : out_dir_(std::move(out_dir)), start_(std::chrono::steady_clock::now()) {
  std::filesystem::create_directories(out_dir_);
  record_["schema"] = "retrialq.manifest/1";
  record_["command"] = std::move(command);
  record_["tool_version"] = kToolVersion;
}

std::string Manifest::path(const std::string& name) const { return (std::filesystem::path(out_dir_) / name).string(); }

void Manifest::add_output(const std::string& name) { outputs_.push_back(name); }

void Manifest::write() {
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  record_["wall_clock_seconds"] = secs;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& name : outputs_) files.push_back({{"file", name}, {"sha256", sha256_file(path(name))}});
  record_["outputs"] = files;
  write_json_file(path(kManifestName), record_);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace retrialq::cli
