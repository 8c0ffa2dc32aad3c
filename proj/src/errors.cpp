#include "rave/errors.hpp"

namespace rave {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::QuantileOutOfRange: return "QuantileOutOfRange";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::NonpositiveEpsilon: return "NonpositiveEpsilon";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::BadBounds: return "BadBounds";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NoDescent: return "NoDescent";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "UnknownError";
}

}  // namespace rave
