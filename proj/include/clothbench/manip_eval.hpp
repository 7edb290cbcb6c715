#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clothbench/cloth_model.hpp"
#include "clothbench/mask.hpp"

namespace clothbench {

enum class PrimitiveKind { Lift, Drag, Fold, Pull, Push };

enum class GripSite { Corner, MidShortEdge };

/// Trajectory parameters of a quasi-static manipulation primitive.
///  - Lift: corner grasped at grasp_height, raised vertically by travel.
///  - Drag: corner grasped at grasp_height, moved travel parallel to the table.
///  - Fold: corner grasped at grasp_height, carried to the opposite corner on
///    a triangular path whose apex is travel above the table.
///  - Pull: mid short edge pulled travel outward; opposite side fixed.
///  - Push: mid short edge pushed travel towards the cloth centre.
struct PrimitiveSpec {
  PrimitiveKind kind = PrimitiveKind::Lift;
  GripSite site = GripSite::Corner;
  double travel_mm = 0.0;
  double grasp_height_mm = 0.0;  // 0 for finger-contact primitives
  bool fix_opposite_side = false;

  bool operator==(const PrimitiveSpec&) const = default;
};

[[nodiscard]] PrimitiveSpec canonical_primitive(PrimitiveKind kind);
/// Throws InvalidArgument on non-positive trajectory parameters.
void validate(const PrimitiveSpec& spec);

inline constexpr PrimitiveKind kAllPrimitives[] = {PrimitiveKind::Lift, PrimitiveKind::Drag,
                                                   PrimitiveKind::Fold, PrimitiveKind::Pull,
                                                   PrimitiveKind::Push};

std::string_view to_string(PrimitiveKind kind) noexcept;
PrimitiveKind parse_primitive(std::string_view text);

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation

  bool operator==(const Aggregate&) const = default;
};

struct EvalResult {
  PrimitiveKind primitive = PrimitiveKind::Lift;
  double fr = 0.0;  // equals mean
  std::vector<double> repetitions;
  double mean = 0.0;
  double stddev = 0.0;
};

[[nodiscard]] EvalResult make_eval_result(PrimitiveKind kind, std::vector<double> runs);

/// FR values above this are reported as probable segmentation faults.
inline constexpr double kRetentionWarningThreshold = 1.05;

/// Shape-retention FR = A_after / A_before. Areas are in mm^2 when both masks
/// carry a scale, pixels when neither does; mixing throws CalibrationMismatch.
/// Throws EmptyReference when the before mask is empty. Not clamped.
[[nodiscard]] double final_ratio(const BinaryMask& before, const BinaryMask& after);

/// Fold-alignment FR = (A_f - A_b) / A_f, with A_b the uncovered area of the
/// bottom half. Throws EmptyReference (A_f = 0) or InconsistentAreas (A_b > A_f).
[[nodiscard]] double fold_ratio(const BinaryMask& after, const BinaryMask& uncovered_bottom);
[[nodiscard]] double fold_ratio(double area_after, double area_uncovered_bottom);

[[nodiscard]] std::optional<std::string> retention_warning(double fr);

/// Arithmetic mean and population standard deviation. Throws EmptyRuns.
[[nodiscard]] Aggregate aggregate(std::span<const double> runs);

// ---------------------------------------------------------------------------
// Property/outcome trend tables

struct SampleOutcome {
  std::string sample_id;
  MechanicalProperties properties;
  std::vector<EvalResult> results;
};

enum class Highlight { None, Best, Worst };

struct TrendEntry {
  std::string sample_id;
  int rank = 0;  // 1 = highest FR; ties share a rank
  double mean_fr = 0.0;
  double stddev = 0.0;
  std::optional<double> stiffness;
  std::optional<double> elasticity;
  std::optional<double> friction;
  Highlight highlight = Highlight::None;
};

struct PrimitiveTrend {
  PrimitiveKind primitive = PrimitiveKind::Lift;
  std::vector<TrendEntry> ranking;  // descending FR, stable on input order
  bool tie_at_top = false;
  bool tie_at_bottom = false;

  [[nodiscard]] std::vector<std::string> best() const;
  [[nodiscard]] std::vector<std::string> worst() const;
};

struct TrendReport {
  std::vector<PrimitiveTrend> primitives;

  [[nodiscard]] const PrimitiveTrend& at(PrimitiveKind kind) const;
  /// One row per (primitive, sample); highlight column is best/worst/empty.
  [[nodiscard]] std::string to_csv() const;
};

/// Ranks samples by mean FR per primitive, marking maxima (best) and minima
/// (worst). Values within 1e-12 are ties.
[[nodiscard]] TrendReport trend_report(const std::vector<SampleOutcome>& samples);

}  // namespace clothbench
