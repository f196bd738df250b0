#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbsde {

enum class ErrorCode {
  InvalidArgument,
  OutOfDomain,
  Diverged,
  NonConvergence,
  SingularDenominator,
  MissingExact,
  Io,
  Usage,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above; the C
/// API maps them one-to-one onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Same code, message prefixed with where the failure happened.
  Error with_context(std::string_view where) const {
    return Error(code_, std::string(where) + ": " + what());
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::InvalidArgument, message);
}

}  // namespace fbsde
