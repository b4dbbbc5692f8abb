#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace permatch {

enum class ErrorKind {
  SelfLoop,
  OutOfRange,
  BadParams,
  SyntaxError,
  TooLarge,
  BadK,
  NotPerfectMatching,
  NotPermutation,
  NotOnGraph,
  NotHamilton,
  NotDerangement,
  NotInImage,
  UniquenessViolation,
  IsDirectedCycle,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::BadK: return "BadK";
    case ErrorKind::NotPerfectMatching: return "NotPerfectMatching";
    case ErrorKind::NotPermutation: return "NotPermutation";
    case ErrorKind::NotOnGraph: return "NotOnGraph";
    case ErrorKind::NotHamilton: return "NotHamilton";
    case ErrorKind::NotDerangement: return "NotDerangement";
    case ErrorKind::NotInImage: return "NotInImage";
    case ErrorKind::UniquenessViolation: return "UniquenessViolation";
    case ErrorKind::IsDirectedCycle: return "IsDirectedCycle";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers which
/// contract was broken.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace permatch
