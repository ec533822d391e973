#include "perron/error.hpp"

namespace perron {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::DegenerateCriticalPoint: return "DegenerateCriticalPoint";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::OutOfTrustRegion: return "OutOfTrustRegion";
    case ErrorKind::LadderInfeasible: return "LadderInfeasible";
    case ErrorKind::OutsideSampledDomain: return "OutsideSampledDomain";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::NotOnUnstableManifold: return "NotOnUnstableManifold";
    case ErrorKind::LevelNotReached: return "LevelNotReached";
    case ErrorKind::NormBudgetExceeded: return "NormBudgetExceeded";
    case ErrorKind::HorizonMismatch: return "HorizonMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EndpointViolation: return "EndpointViolation";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::FlagMissing: return "FlagMissing";
    case ErrorKind::ComponentAmbiguous: return "ComponentAmbiguous";
    case ErrorKind::DisjointnessViolation: return "DisjointnessViolation";
    case ErrorKind::OutsideLeafDomain: return "OutsideLeafDomain";
    case ErrorKind::RetractViolation: return "RetractViolation";
    case ErrorKind::BracketLost: return "BracketLost";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace perron
