#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mci {

enum class ErrorCode {
  InvalidArgument,
  Config,
  Validation,
  NotFound,
  Domain,
  ModeViolation,
  Capacity,
  Size,
  PolicyLoad,
  MalformedLog,
  Storage,
  Generation,
  Divergence,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code is machine readable and
/// maps one-to-one onto the service's {code, reason} error bodies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mci
