#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clothbench {

enum class ErrorCode {
  InvalidArgument,
  NoDimensions,
  NoClothDetected,
  MissingScale,
  CalibrationMismatch,
  IoError,
  UnsupportedFormat,
  InvalidRatio,
  DegeneratePlate,
  OutOfRange,
  InvalidLengths,
  DuplicateLine,
  SlideAngleInvalid,
  EmptySet,
  AllMembersMissingProperty,
  AxisMismatch,
  EmptyReference,
  InconsistentAreas,
  EmptyRuns,
  NumericalBlowup,
  DidNotSettle,
  NoSlide,
  SchemaVersionMismatch,
  SchemaInvalid,
  DerivationMismatch,
  ReferentialIntegrity,
  UnknownId,
  DuplicateId,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error raised by every clothbench module. The code is stable and is
/// what the CLI prints; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace clothbench
