#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clothbench/cloth_model.hpp"

namespace clothbench {

/// Radar axes in chart order.
enum class PropertyAxis { Size, Weight, Shapes, Colors, Materials, Stiffness, Elasticity, Friction };

inline constexpr std::array kAllAxes = {
    PropertyAxis::Size,      PropertyAxis::Weight,     PropertyAxis::Shapes,
    PropertyAxis::Colors,    PropertyAxis::Materials,  PropertyAxis::Stiffness,
    PropertyAxis::Elasticity, PropertyAxis::Friction,
};

std::string_view to_string(PropertyAxis axis) noexcept;
PropertyAxis parse_axis(std::string_view text);
/// "mm", "g", "count" or "ratio".
std::string_view unit_of(PropertyAxis axis) noexcept;
[[nodiscard]] bool is_categorical(PropertyAxis axis) noexcept;

struct AxisSummary {
  PropertyAxis axis = PropertyAxis::Size;
  // Numeric axes: extremes over the members that carry the property.
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
  // Categorical axes: number of distinct categories.
  int count = 0;
  int members_used = 0;
  int members_skipped = 0;
  bool missing = false;  // no member carries the property

  /// range for numeric axes, count for categorical ones, 0 when missing.
  [[nodiscard]] double value() const noexcept;
  bool operator==(const AxisSummary&) const = default;
};

using ObjectMap = std::map<std::string, ClothObject>;

/// Throws EmptySet, UnknownId for dangling members, and
/// AllMembersMissingProperty when no member carries the property.
/// Members lacking a value are counted in members_skipped.
[[nodiscard]] AxisSummary property_range(const ClothSet& set, const ObjectMap& objects,
                                         PropertyAxis axis);

struct RadarProfile {
  std::string set_id;
  std::string set_name;
  std::vector<AxisSummary> axes;
  std::vector<std::string> warnings;

  [[nodiscard]] const AxisSummary& at(PropertyAxis axis) const;
  [[nodiscard]] double value(PropertyAxis axis) const { return at(axis).value(); }
  bool operator==(const RadarProfile&) const = default;
};

/// Every axis in chart order. Axes without data are flagged `missing` and
/// reported in `warnings`, as are skipped members. Throws EmptySet.
[[nodiscard]] RadarProfile radar_profile(const ClothSet& set, const ObjectMap& objects);

struct RenderOptions {
  int size_px = 640;
  std::string title;
};

/// Per-profile vertex radii in [0, 1], one per axis; each axis is scaled by
/// its maximum over all profiles. Throws AxisMismatch or InvalidArgument
/// when `profiles` is empty.
[[nodiscard]] std::vector<std::vector<double>> radar_vertex_radii(
    const std::vector<RadarProfile>& profiles);

/// Deterministic SVG 1.1 radar chart with one closed polygon per profile and
/// a legend.
[[nodiscard]] std::string render_radar(const std::vector<RadarProfile>& profiles,
                                       const RenderOptions& options = {});

/// CSV table: axis, unit, one value column per profile, winner (set id or
/// "tie"). Needs at least two profiles; throws AxisMismatch.
[[nodiscard]] std::string compare_report(const std::vector<RadarProfile>& profiles);

}  // namespace clothbench
