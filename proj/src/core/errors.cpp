#include "errors.hpp"

namespace slmap {

const char* reason_name(Reason r) {
  switch (r) {
    case Reason::None: return "ok";
    case Reason::InvalidArgument: return "InvalidArgument";
    case Reason::NonFiniteState: return "NonFiniteState";
    case Reason::NearEigenvalue: return "NearEigenvalue";
    case Reason::RootCountMismatch: return "RootCountMismatch";
    case Reason::NewtonDivergence: return "NewtonDivergence";
    case Reason::DegenerateSpectrum: return "DegenerateSpectrum";
    case Reason::DegenerateWeight: return "DegenerateWeight";
    case Reason::DegenerateCoefficient: return "DegenerateCoefficient";
    case Reason::IsolationFailure: return "IsolationFailure";
    case Reason::CrossValidationFailure: return "CrossValidationFailure";
    case Reason::BlockStructure: return "BlockStructureError";
    case Reason::PoleOnContour: return "PoleOnContour";
    case Reason::DuplicateTargetEigenvalue: return "DuplicateTargetEigenvalue";
    case Reason::ZeroLeadingCoefficient: return "ZeroLeadingCoefficient";
    case Reason::TruncationBudgetExceeded: return "TruncationBudgetExceeded";
    case Reason::SingularOperator: return "SingularOperator";
    case Reason::ResidualTooLarge: return "ResidualTooLarge";
    case Reason::HypothesisViolated: return "HypothesisViolated";
    case Reason::SearchFailed: return "SearchFailed";
    case Reason::BadPreset: return "BadPreset";
    case Reason::Io: return "IoError";
  }
  return "unknown";
}

}  // namespace slmap
