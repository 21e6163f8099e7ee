#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xprod {

enum class ErrorCode {
  // input / space
  NonBijectiveTheta,
  WrongPeriod,
  NonPrimePeriod,
  DanglingEdge,
  DensityViolation,
  MalformedInput,
  UnknownPoint,
  // matalg
  NonPositiveDim,
  NotUnitary,
  DisconnectedTree,
  RankNotOne,
  NotResolution,
  // crossed
  BaseMismatch,
  ClosureFailure,
  FixedPointGiven,
  NotFixedPoint,
  SingularSystem,
  // structure
  EmptyFixedSet,
  TrivializationFailure,
  FrontierIncoherence,
  // classify
  SizeMismatch,
  NotHomeo,
  NotFixedPreserving,
  NotIsomorphism,
  CenterMismatch,
  // scenarios
  OddResolution,
  EvenTResolution,
  IndivisibleAngles,
  OutOfDomain,
  InverseAmbiguity,
  // cli
  UnknownScenario,
  InvalidParams,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xprod
