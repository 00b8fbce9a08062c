#include "tsal/error.hpp"

namespace tsal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SessionFinished: return "SessionFinished";
    case ErrorCode::InconsistentCohort: return "InconsistentCohort";
    case ErrorCode::EmptyCohort: return "EmptyCohort";
    case ErrorCode::DegenerateVector: return "DegenerateVector";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::InsufficientCohort: return "InsufficientCohort";
    case ErrorCode::Undefined: return "Undefined";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::AssetError: return "AssetError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DurationMismatch: return "DurationMismatch";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NotReady: return "NotReady";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::Rejected: return "Rejected";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace tsal
