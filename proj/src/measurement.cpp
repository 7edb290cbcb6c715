#include "clothbench/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "clothbench/error.hpp"

namespace clothbench {
namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double plate_diameter(double shortest_edge_mm, double coverage_ratio) {
  if (!(coverage_ratio > 0.0 && coverage_ratio < 1.0)) {
    throw Error(ErrorCode::InvalidRatio,
                fmt::format("coverage ratio {} outside (0, 1)", coverage_ratio));
  }
  if (!positive(shortest_edge_mm)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("shortest edge must be > 0, got {}", shortest_edge_mm));
  }
  return coverage_ratio * shortest_edge_mm;
}

double plate_area_mm2(double diameter_mm) {
  const double r = diameter_mm / 2.0;
  return std::numbers::pi * r * r;
}

EffectiveRectangle fold_to_fit(double width_mm, double height_mm, double max_edge_mm) {
  if (!positive(width_mm) || !positive(height_mm) || !positive(max_edge_mm)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("fold_to_fit needs positive sizes, got {}x{} max {}", width_mm,
                            height_mm, max_edge_mm));
  }
  EffectiveRectangle rect{width_mm, height_mm, 0};
  while (rect.width_mm > max_edge_mm || rect.height_mm > max_edge_mm) {
    if (rect.width_mm > rect.height_mm) {
      rect.width_mm /= 2.0;
    } else {
      rect.height_mm /= 2.0;
    }
    ++rect.folds;
  }
  return rect;
}

EffectiveRectangle normalize_sample(const ClothObject& obj, double max_edge_mm) {
  const auto width = dimension_of(obj, ReferenceLine::Line1);
  const auto height = dimension_of(obj, ReferenceLine::Line2);
  if (!width || !height) {
    throw Error(ErrorCode::NoDimensions,
                fmt::format("object '{}' needs L1 and L2 to normalize", obj.id));
  }
  return fold_to_fit(*width, *height, max_edge_mm);
}

double drape_stiffness(const StiffnessInputs& in, double tolerance) {
  const double a1 = in.a1_mm2;
  const double a2 = in.a2_mm2;
  const double a3 = in.a3_mm2;
  if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(a3)) {
    throw Error(ErrorCode::InvalidArgument, "drape areas must be finite");
  }
  if (!(a2 > 0.0) || !(a1 > a2)) {
    throw Error(ErrorCode::DegeneratePlate,
                fmt::format("need A1 > A2 > 0, got A1={} A2={}", a1, a2));
  }
  if (a3 < a2 * (1.0 - tolerance) || a3 > a1 * (1.0 + tolerance)) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("A3={} outside [{}, {}] beyond {:.0f}% tolerance", a3, a2, a1,
                            tolerance * 100.0));
  }
  return std::clamp((a3 - a2) / (a1 - a2), 0.0, 1.0);
}

double elasticity(const ElasticityInputs& in) {
  if (!positive(in.li_mm) || !std::isfinite(in.lf_mm) || in.lf_mm < in.li_mm) {
    throw Error(ErrorCode::InvalidLengths,
                fmt::format("need li > 0 and lf >= li, got li={} lf={}", in.li_mm, in.lf_mm));
  }
  return (in.lf_mm - in.li_mm) / in.li_mm;
}

ElasticityProfile elasticity_profile(const std::vector<ElasticityInputs>& records) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "no elasticity records");
  ElasticityProfile profile;
  std::set<ReferenceLine> seen;
  for (const auto& record : records) {
    if (!seen.insert(record.line).second) {
      throw Error(ErrorCode::DuplicateLine,
                  fmt::format("line {} measured twice", to_string(record.line)));
    }
    profile.per_line.push_back({record.line, elasticity(record)});
  }
  profile.summary = *elasticity_summary(profile.per_line);
  return profile;
}

double friction_coefficient(const FrictionInputs& in) {
  const double h = in.height_mm;
  const double l = in.length_mm;
  if (!std::isfinite(h) || !positive(l) || h < 0.0 || h >= l) {
    throw Error(ErrorCode::SlideAngleInvalid,
                fmt::format("need 0 <= h < l, got h={} l={}", h, l));
  }
  return h / std::sqrt(l * l - h * h);
}

double critical_height(double mu, double length_mm) {
  if (!(std::isfinite(mu) && mu >= 0.0) || !positive(length_mm)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("need mu >= 0 and l > 0, got mu={} l={}", mu, length_mm));
  }
  return length_mm * mu / std::sqrt(1.0 + mu * mu);
}

PropertyKind MeasurementRecord::kind() const noexcept {
  return static_cast<PropertyKind>(raw.index());
}

double rederive(const RawInputs& raw) {
  struct Visitor {
    double operator()(const StiffnessRaw& r) const { return drape_stiffness(r.areas); }
    double operator()(const ElasticityInputs& r) const { return elasticity(r); }
    double operator()(const FrictionRaw& r) const { return friction_coefficient(r.inputs); }
  };
  return std::visit(Visitor{}, raw);
}

MeasurementRecord make_record(std::string object_id, RawInputs raw) {
  MeasurementRecord record;
  record.object_id = std::move(object_id);
  record.value = rederive(raw);
  record.raw = std::move(raw);
  return record;
}

std::string_view to_string(PropertyKind kind) noexcept {
  switch (kind) {
    case PropertyKind::Stiffness: return "stiffness";
    case PropertyKind::Elasticity: return "elasticity";
    case PropertyKind::Friction: return "friction";
  }
  return "?";
}

PropertyKind parse_property_kind(std::string_view text) {
  for (auto kind : {PropertyKind::Stiffness, PropertyKind::Elasticity, PropertyKind::Friction}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown property kind '{}'", text));
}

MeasurementRecord stiffness_from_images(const std::optional<GrayImage>& flat,
                                        const GrayImage& draped, const PlateSpec& plate,
                                        const SegmentationConfig& seg,
                                        const ImageCalibration& calibration,
                                        std::optional<double> flat_area_mm2, int fold_count) {
  if (!positive(plate.diameter_mm)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("plate diameter must be > 0, got {}", plate.diameter_mm));
  }
  double scale = 0.0;
  if (calibration.scale_mm_per_px) {
    scale = *calibration.scale_mm_per_px;
    if (!positive(scale)) throw Error(ErrorCode::InvalidArgument, "scale must be > 0");
  } else if (calibration.plate_mask) {
    scale = scale_from_plate(*calibration.plate_mask, plate.diameter_mm);
  } else {
    throw Error(ErrorCode::MissingScale, "stiffness imaging needs --scale or a plate mask");
  }

  auto measured_area = [&](const GrayImage& image) {
    BinaryMask mask = segment(image, seg);
    mask.set_scale(scale);
    return area_mm2(mask);
  };

  StiffnessRaw raw;
  if (flat) {
    raw.areas.a1_mm2 = measured_area(*flat);
  } else if (flat_area_mm2) {
    raw.areas.a1_mm2 = *flat_area_mm2;
  } else {
    throw Error(ErrorCode::InvalidArgument, "need a flat image or the flat cloth area");
  }
  raw.areas.a2_mm2 = plate_area_mm2(plate.diameter_mm);
  raw.areas.a3_mm2 = measured_area(draped);
  raw.plate_diameter_mm = plate.diameter_mm;
  raw.coverage_ratio = plate.coverage_ratio;
  raw.fold_count = fold_count;
  raw.scale_mm_per_px = scale;
  return make_record({}, raw);
}

}  // namespace clothbench
