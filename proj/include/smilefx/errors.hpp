#pragma once

#include <stdexcept>
#include <string>

namespace smilefx {

enum class ErrorKind {
  InvalidInput,
  NoSolution,
  NonConvergence,
  TooShort,
  DegenerateInput,
  SingularMatrix,
  ParseError,
  InvariantViolation,
  OutOfOrder,
  StrikeMissing,
  ZeroEntryPrice,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::NoSolution: return "no-solution";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::TooShort: return "too-short";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::SingularMatrix: return "singular-matrix";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::InvariantViolation: return "invariant-violation";
    case ErrorKind::OutOfOrder: return "out-of-order";
    case ErrorKind::StrikeMissing: return "strike-missing";
    case ErrorKind::ZeroEntryPrice: return "zero-entry-price";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

// Non-convergence and singular systems are numerical failures; everything
// else is a problem with the caller's input.
inline bool is_numerical(ErrorKind kind) {
  return kind == ErrorKind::NonConvergence || kind == ErrorKind::SingularMatrix;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace smilefx
