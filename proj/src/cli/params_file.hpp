#pragma once

#include "retrialq/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace retrialq::cli {

/// Contents of a key = value parameter file.
struct ParamFile {
  ModelParams params;
  std::optional<std::uint64_t> seed;
};

/// Parses "key = value" lines; '#' starts a comment. When one member of a
/// split is omitted it is filled with the complement of the others. When two
/// members of a triple are omitted the minor ones stay 0 and p_a or thb takes
/// the remainder; giving only p_a or only thb below 1 is rejected as ambiguous.
/// Throws Error("bad-param-file") on syntax errors or unknown keys.
ParamFile parse_param_text(const std::string& text);
ParamFile load_param_file(const std::string& path);

/// Sets one model field by key. "rho" sets lambda so that
/// lambda_ob / (s mu thb) equals the value.
void set_param(ModelParams& params, const std::string& key, double value);

nlohmann::json params_to_json(const ModelParams& params);

}  // namespace retrialq::cli
