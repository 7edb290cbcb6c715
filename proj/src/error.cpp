#include "clothbench/error.hpp"

namespace clothbench {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoDimensions: return "NoDimensions";
    case ErrorCode::NoClothDetected: return "NoClothDetected";
    case ErrorCode::MissingScale: return "MissingScale";
    case ErrorCode::CalibrationMismatch: return "CalibrationMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::DegeneratePlate: return "DegeneratePlate";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidLengths: return "InvalidLengths";
    case ErrorCode::DuplicateLine: return "DuplicateLine";
    case ErrorCode::SlideAngleInvalid: return "SlideAngleInvalid";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::AllMembersMissingProperty: return "AllMembersMissingProperty";
    case ErrorCode::AxisMismatch: return "AxisMismatch";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::InconsistentAreas: return "InconsistentAreas";
    case ErrorCode::EmptyRuns: return "EmptyRuns";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::DidNotSettle: return "DidNotSettle";
    case ErrorCode::NoSlide: return "NoSlide";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::SchemaInvalid: return "SchemaInvalid";
    case ErrorCode::DerivationMismatch: return "DerivationMismatch";
    case ErrorCode::ReferentialIntegrity: return "ReferentialIntegrity";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::DuplicateId: return "DuplicateId";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace clothbench
