#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hlab {

enum class ErrorKind {
  InvalidArgument,
  RingMismatch,
  ArityMismatch,
  NotAUnit,
  IndeterminateResidue,
  WrongRingKind,
  SingularPoint,
  NoRoot,
  UnitViolation,
  NotLogSmooth,
  ResidueMismatch,
  PrecisionExhausted,
  SyntaxError,
  SortError,
  UnboundVariable,
  Exhausted,
  SingularOnly,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::RingMismatch: return "RingMismatch";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::IndeterminateResidue: return "IndeterminateResidue";
    case ErrorKind::WrongRingKind: return "WrongRingKind";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::UnitViolation: return "UnitViolation";
    case ErrorKind::NotLogSmooth: return "NotLogSmooth";
    case ErrorKind::ResidueMismatch: return "ResidueMismatch";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SortError: return "SortError";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::Exhausted: return "Exhausted";
    case ErrorKind::SingularOnly: return "SingularOnly";
  }
  return "Unknown";
}

/// Every failure raised by the library. The kind names the violated
/// precondition; the message carries the details.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failures carry a byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t offset, const std::string& what)
      : Error(kind, what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace hlab
