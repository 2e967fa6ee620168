#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace helab {

enum class ErrorKind {
  DegreeOverflow,
  ZeroVolumeForm,
  DegenerateMetric,
  RankMismatch,
  BidegreeMismatch,
  NonFiniteInput,
  GridMismatch,
  InvalidGrid,
  NotPositiveDefinite,
  NotDdbarClosed,
  NotWeaklyPositive,
  NotReal,
  PositivityLostAtEpsilon,
  InvalidAuxiliaryPotential,
  IncompatibleRightHandSide,
  SolverDiverged,
  InvalidSpec,
  NotDbarClosedBetaStar,
  InvalidPower,
  ShapeMismatch,
  NotWeaklyHE,
  NotHermiteEinstein,
  NonHolomorphicSection,
  ZeroRank,
  AmbientNotHE,
  NotASubobject,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Compact scientific rendering for error messages.
inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

/// Every failure raised by the library. `kind()` is the machine-readable
/// discriminator; the message carries the offending value or location.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegreeOverflow: return "DegreeOverflow";
    case ErrorKind::ZeroVolumeForm: return "ZeroVolumeForm";
    case ErrorKind::DegenerateMetric: return "DegenerateMetric";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::BidegreeMismatch: return "BidegreeMismatch";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotDdbarClosed: return "NotDdbarClosed";
    case ErrorKind::NotWeaklyPositive: return "NotWeaklyPositive";
    case ErrorKind::NotReal: return "NotReal";
    case ErrorKind::PositivityLostAtEpsilon: return "PositivityLostAtEpsilon";
    case ErrorKind::InvalidAuxiliaryPotential: return "InvalidAuxiliaryPotential";
    case ErrorKind::IncompatibleRightHandSide: return "IncompatibleRightHandSide";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::NotDbarClosedBetaStar: return "NotDbarClosedBetaStar";
    case ErrorKind::InvalidPower: return "InvalidPower";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotWeaklyHE: return "NotWeaklyHE";
    case ErrorKind::NotHermiteEinstein: return "NotHermiteEinstein";
    case ErrorKind::NonHolomorphicSection: return "NonHolomorphicSection";
    case ErrorKind::ZeroRank: return "ZeroRank";
    case ErrorKind::AmbientNotHE: return "AmbientNotHE";
    case ErrorKind::NotASubobject: return "NotASubobject";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace helab
