#include "xprod/error.hpp"

namespace xprod {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonBijectiveTheta: return "NonBijectiveTheta";
    case ErrorCode::WrongPeriod: return "WrongPeriod";
    case ErrorCode::NonPrimePeriod: return "NonPrimePeriod";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::DensityViolation: return "DensityViolation";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::UnknownPoint: return "UnknownPoint";
    case ErrorCode::NonPositiveDim: return "NonPositiveDim";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::DisconnectedTree: return "DisconnectedTree";
    case ErrorCode::RankNotOne: return "RankNotOne";
    case ErrorCode::NotResolution: return "NotResolution";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::ClosureFailure: return "ClosureFailure";
    case ErrorCode::FixedPointGiven: return "FixedPointGiven";
    case ErrorCode::NotFixedPoint: return "NotFixedPoint";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EmptyFixedSet: return "EmptyFixedSet";
    case ErrorCode::TrivializationFailure: return "TrivializationFailure";
    case ErrorCode::FrontierIncoherence: return "FrontierIncoherence";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NotHomeo: return "NotHomeo";
    case ErrorCode::NotFixedPreserving: return "NotFixedPreserving";
    case ErrorCode::NotIsomorphism: return "NotIsomorphism";
    case ErrorCode::CenterMismatch: return "CenterMismatch";
    case ErrorCode::OddResolution: return "OddResolution";
    case ErrorCode::EvenTResolution: return "EvenTResolution";
    case ErrorCode::IndivisibleAngles: return "IndivisibleAngles";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InverseAmbiguity: return "InverseAmbiguity";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::InvalidParams: return "InvalidParams";
  }
  return "Unknown";
}

}  // namespace xprod
