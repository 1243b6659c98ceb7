#pragma once

#include <stdexcept>
#include <string>

namespace retrialq {

/// Exception carrying a stable, machine-readable error code such as
/// "undefined-rho" or "singular-block". The CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace retrialq
