#pragma once

#include "retrialq/qbd_solver.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace retrialq::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestName = "manifest.json";

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// "i,j,probability" rows at 17 significant digits; exact zeros are omitted.
void write_distribution_csv(std::ostream& out, const StationaryDistribution& dist);

/// Inverse of write_distribution_csv; the phase count is max(i) + 1 unless
/// phases > 0 is given.
StationaryDistribution read_distribution_csv(std::istream& in, int phases = 0);
StationaryDistribution read_distribution_file(const std::string& path, int phases = 0);

/// Collects the provenance of one command run and writes manifest.json.
class Manifest {
 public:
  Manifest(std::string command, std::string out_dir);

  nlohmann::json& record() { return record_; }
  /// Output path inside the run directory.
  std::string path(const std::string& name) const;
  /// Registers an already written output file.
  void add_output(const std::string& name);
  /// Writes manifest.json with digests and wall-clock time.
  void write();

 private:
  std::string out_dir_;
  nlohmann::json record_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

/// First line of every CSV a command writes.
std::string manifest_comment();

void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace retrialq::cli
