#pragma once

#include <stdexcept>
#include <string>

namespace rselab {

enum class ErrorCode {
  InvalidArgument,
  Config,
  NotObservable,
  DimensionMismatch,
  NotAttackable,
  AuthViolation,
  Io,
  Internal,
};

/// Exception type thrown by the C++ core. The C API maps `code()` onto
/// `rse_status` values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rselab
