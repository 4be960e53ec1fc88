#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lognls {

/// Failure categories raised by the library. Each maps to a CLI exit code.
enum class ErrorKind {
  InvalidArgument,
  PositivityLost,
  StepUnderflow,
  NonpositiveWidth,
  GridTooCoarse,
  NonFiniteSample,
  NonFiniteState,
  AliasingOverflow,
  BoundaryLeak,
  GridMismatch,
  BoxTooSmall,
  SeparationViolated,
  InsufficientData,
  SupportsOverlap,
  QuadratureNonconvergent,
  DomainViolation,
  SeparationTooSmall,
  ConfigInvalid,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::PositivityLost: return "PositivityLost";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NonpositiveWidth: return "NonpositiveWidth";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::NonFiniteSample: return "NonFiniteSample";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::AliasingOverflow: return "AliasingOverflow";
    case ErrorKind::BoundaryLeak: return "BoundaryLeak";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::BoxTooSmall: return "BoxTooSmall";
    case ErrorKind::SeparationViolated: return "SeparationViolated";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SupportsOverlap: return "SupportsOverlap";
    case ErrorKind::QuadratureNonconvergent: return "QuadratureNonconvergent";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::SeparationTooSmall: return "SeparationTooSmall";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for errors signalling that a configuration left the regime where
  /// the construction is valid (separation, partition support, box size).
  bool is_validity_gate() const noexcept {
    return kind_ == ErrorKind::SeparationViolated || kind_ == ErrorKind::SupportsOverlap ||
           kind_ == ErrorKind::BoxTooSmall || kind_ == ErrorKind::SeparationTooSmall;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace lognls
