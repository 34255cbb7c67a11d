#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace covest {

enum class ErrorCode {
  NonFinite,
  NoConvergence,
  DimMismatch,
  NotPSD,
  InvalidParam,
  EmptyBatch,
  OutOfRange,
  ZeroMatrix,
  OrderTooLarge,
  ConfigError,
  IOError,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace covest
