#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clothbench/cloth_model.hpp"
#include "clothbench/mask.hpp"

namespace clothbench {

inline constexpr double kDefaultCoverageRatio = 0.6;
inline constexpr double kDefaultMaxEdgeMm = 500.0;
/// Relative slack on A3 outside [A2, A1] that is clamped instead of rejected.
inline constexpr double kDrapeAreaTolerance = 0.05;
inline constexpr double kProtocolLoadG = 500.0;
inline constexpr const char* kFrictionSurface = "standard printing paper";

struct StiffnessInputs {
  double a1_mm2 = 0.0;  // flat cloth
  double a2_mm2 = 0.0;  // plate
  double a3_mm2 = 0.0;  // draped projection

  bool operator==(const StiffnessInputs&) const = default;
};

struct ElasticityInputs {
  ReferenceLine line = ReferenceLine::Line1;
  double li_mm = 0.0;  // rest length between clamps
  double lf_mm = 0.0;  // length under load
  double load_g = kProtocolLoadG;

  bool operator==(const ElasticityInputs&) const = default;
};

struct FrictionInputs {
  double height_mm = 0.0;  // lifted height at slide onset
  double length_mm = 0.0;  // length of the inclined surface

  bool operator==(const FrictionInputs&) const = default;
};

struct PlateSpec {
  double diameter_mm = 0.0;
  double coverage_ratio = kDefaultCoverageRatio;

  bool operator==(const PlateSpec&) const = default;
};

struct EffectiveRectangle {
  double width_mm = 0.0;
  double height_mm = 0.0;
  int folds = 0;

  [[nodiscard]] double area_mm2() const noexcept { return width_mm * height_mm; }
  bool operator==(const EffectiveRectangle&) const = default;
};

/// coverage_ratio * shortest_edge. Throws InvalidRatio unless 0 < ratio < 1.
[[nodiscard]] double plate_diameter(double shortest_edge_mm,
                                    double coverage_ratio = kDefaultCoverageRatio);
[[nodiscard]] double plate_area_mm2(double diameter_mm);

/// Halves the current longest edge until both edges fit in `max_edge_mm`.
/// Ties fold the height. Garments are first reduced to their Line1 x Line2
/// bounding rectangle.
[[nodiscard]] EffectiveRectangle fold_to_fit(double width_mm, double height_mm,
                                             double max_edge_mm = kDefaultMaxEdgeMm);
[[nodiscard]] EffectiveRectangle normalize_sample(const ClothObject& obj,
                                                  double max_edge_mm = kDefaultMaxEdgeMm);

/// Drape ratio (A3 - A2) / (A1 - A2). A3 within `tolerance` (relative) outside
/// [A2, A1] is clamped; further out throws OutOfRange. Throws DegeneratePlate
/// when A1 <= A2 or A2 <= 0.
[[nodiscard]] double drape_stiffness(const StiffnessInputs& in,
                                     double tolerance = kDrapeAreaTolerance);

/// (lf - li) / li. Throws InvalidLengths when li <= 0 or lf < li.
[[nodiscard]] double elasticity(const ElasticityInputs& in);

struct ElasticityProfile {
  std::vector<LineElasticity> per_line;
  double summary = 0.0;  // max over lines
};

/// Throws DuplicateLine if a line repeats, InvalidArgument if empty.
[[nodiscard]] ElasticityProfile elasticity_profile(const std::vector<ElasticityInputs>& records);

/// tan(asin(h / l)), evaluated as h / sqrt(l^2 - h^2). Throws
/// SlideAngleInvalid unless 0 <= h < l.
[[nodiscard]] double friction_coefficient(const FrictionInputs& in);

/// Inverse of friction_coefficient: l * mu / sqrt(1 + mu^2).
[[nodiscard]] double critical_height(double mu, double length_mm);

// ---------------------------------------------------------------------------
// Measurement records

enum class PropertyKind { Stiffness, Elasticity, Friction };

struct StiffnessRaw {
  StiffnessInputs areas;
  double plate_diameter_mm = 0.0;
  double coverage_ratio = kDefaultCoverageRatio;
  int fold_count = 0;
  std::optional<double> scale_mm_per_px;

  bool operator==(const StiffnessRaw&) const = default;
};

struct FrictionRaw {
  FrictionInputs inputs;
  std::string surface = kFrictionSurface;

  bool operator==(const FrictionRaw&) const = default;
};

using RawInputs = std::variant<StiffnessRaw, ElasticityInputs, FrictionRaw>;

struct MeasurementRecord {
  std::string object_id;  // empty when not attached to a registered object
  RawInputs raw;
  double value = 0.0;
  std::string timestamp;  // ISO-8601 UTC
  std::string notes;

  [[nodiscard]] PropertyKind kind() const noexcept;
  bool operator==(const MeasurementRecord&) const = default;
};

/// Recomputes the derived value from the raw inputs.
[[nodiscard]] double rederive(const RawInputs& raw);

[[nodiscard]] MeasurementRecord make_record(std::string object_id, RawInputs raw);

std::string_view to_string(PropertyKind kind) noexcept;
PropertyKind parse_property_kind(std::string_view text);

/// Calibration for the imaging pipeline: an explicit scale wins over a plate mask.
struct ImageCalibration {
  std::optional<double> scale_mm_per_px;
  std::optional<BinaryMask> plate_mask;
};

/// Image-based drape measurement. A1 comes from the flat image when given,
/// otherwise from `flat_area_mm2` (e.g. the folded rectangle area).
/// A2 = pi (d/2)^2, A3 from the draped image.
[[nodiscard]] MeasurementRecord stiffness_from_images(const std::optional<GrayImage>& flat,
                                                      const GrayImage& draped,
                                                      const PlateSpec& plate,
                                                      const SegmentationConfig& seg,
                                                      const ImageCalibration& calibration,
                                                      std::optional<double> flat_area_mm2 = {},
                                                      int fold_count = 0);

}  // namespace clothbench
