#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace levsketch {

enum class ErrorCode {
  EmptyMatrix,
  NonFiniteEntry,
  MatrixTooLargeForDenseGram,
  NotPowerOfTwo,
  InvalidParameter,
  DimensionMismatch,
  RankDeficient,
  ShapeError,
  ZeroMatrix,
  InvalidKappa,
  RankTooLow,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (notably the
// CLI retry loop) can tell retryable sketch failures from hard errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) raise(code, what);
}

}  // namespace levsketch
