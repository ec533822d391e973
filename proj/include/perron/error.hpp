#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace perron {

/// Failure categories raised by the library. The CLI maps each onto an exit code.
enum class ErrorKind {
  NotSymmetric,
  DegenerateCriticalPoint,
  IndexOutOfRange,
  OutOfTrustRegion,
  LadderInfeasible,
  OutsideSampledDomain,
  BlowUp,
  NotOnUnstableManifold,
  LevelNotReached,
  NormBudgetExceeded,
  HorizonMismatch,
  NoConvergence,
  EndpointViolation,
  StepTooLarge,
  FlagMissing,
  ComponentAmbiguous,
  DisjointnessViolation,
  OutsideLeafDomain,
  RetractViolation,
  BracketLost,
  NewtonDiverged,
  InvalidConfig,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace perron
