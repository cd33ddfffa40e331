#pragma once

#include <stdexcept>
#include <string>

namespace slmap {

// Failure reasons surfaced verbatim through the C API.
enum class Reason : int {
  None = 0,
  InvalidArgument,
  NonFiniteState,
  NearEigenvalue,
  RootCountMismatch,
  NewtonDivergence,
  DegenerateSpectrum,
  DegenerateWeight,
  DegenerateCoefficient,
  IsolationFailure,
  CrossValidationFailure,
  BlockStructure,
  PoleOnContour,
  DuplicateTargetEigenvalue,
  ZeroLeadingCoefficient,
  TruncationBudgetExceeded,
  SingularOperator,
  ResidualTooLarge,
  HypothesisViolated,
  SearchFailed,
  BadPreset,
  Io,
};

const char* reason_name(Reason r);

class Error : public std::runtime_error {
 public:
  Error(Reason reason, const std::string& message)
      : std::runtime_error(std::string(reason_name(reason)) + ": " + message),
        reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

[[noreturn]] inline void fail(Reason reason, const std::string& message) {
  throw Error(reason, message);
}

inline void require(bool cond, Reason reason, const std::string& message) {
  if (!cond) fail(reason, message);
}

}  // namespace slmap
