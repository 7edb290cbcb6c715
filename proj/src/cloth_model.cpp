#include "clothbench/cloth_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "clothbench/error.hpp"

namespace clothbench {
namespace {

constexpr std::string_view kOtherPrefix = "other:";

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<Enum, N>& values, std::string_view what) {
  const std::string needle = lowercase(text);
  for (Enum value : values) {
    if (lowercase(to_string(value)) == needle) return value;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown {} '{}'", what, text));
}

// Splits "other:<label>" into its label; returns nullopt for a plain label.
std::optional<std::string> other_label(std::string_view text) {
  if (text.size() >= kOtherPrefix.size() &&
      lowercase(text.substr(0, kOtherPrefix.size())) == kOtherPrefix) {
    std::string label(text.substr(kOtherPrefix.size()));
    if (label.empty()) {
      throw Error(ErrorCode::InvalidArgument, "'other:' requires a non-empty label");
    }
    return label;
  }
  return std::nullopt;
}

template <typename Labeled, typename Kind>
std::string labeled_to_string(const Labeled& value, Kind other_kind) {
  if (value.kind == other_kind) return std::string(kOtherPrefix) + value.other_label;
  return std::string(to_string(value.kind));
}

bool allowed_for_shape(ShapeKind shape, ReferenceLine line) {
  if (shape == ShapeKind::Rectangular) {
    return line == ReferenceLine::Line1 || line == ReferenceLine::Line2;
  }
  return true;
}

}  // namespace

std::vector<Violation> validate_object(const ClothObject& obj) {
  std::vector<Violation> out;
  auto add = [&out](ViolationKind kind, std::string detail) {
    out.push_back(Violation{kind, std::move(detail)});
  };

  if (obj.id.empty()) add(ViolationKind::EmptyId, "object id is empty");

  if (!std::isfinite(obj.weight_g)) {
    add(ViolationKind::NonFiniteValue, "weight is not finite");
  } else if (obj.weight_g <= 0.0) {
    add(ViolationKind::WeightNonPositive, fmt::format("weight {} g", obj.weight_g));
  }

  std::set<ReferenceLine> seen;
  for (const auto& dim : obj.dimensions) {
    if (!std::isfinite(dim.length_mm) || dim.length_mm <= 0.0) {
      add(ViolationKind::DimensionNonPositive,
          fmt::format("{} length {} mm", to_string(dim.line), dim.length_mm));
    }
    if (!seen.insert(dim.line).second) {
      add(ViolationKind::DuplicateReferenceLine, std::string(to_string(dim.line)));
    }
    if (!allowed_for_shape(obj.shape.kind, dim.line)) {
      add(ViolationKind::LineInvalidForShape,
          fmt::format("{} on {} object", to_string(dim.line), to_label(obj.shape)));
    }
  }

  if (obj.colors.empty()) add(ViolationKind::NoColors, "no color labels");

  if (obj.shape.kind == ShapeKind::Other && obj.shape.other_label.empty()) {
    add(ViolationKind::EmptyOtherLabel, "shape");
  }
  for (const auto& material : obj.materials) {
    if (material.kind == MaterialKind::Other && material.other_label.empty()) {
      add(ViolationKind::EmptyOtherLabel, "material");
    }
  }
  if (obj.construction.kind == ConstructionKind::Other && obj.construction.other_label.empty()) {
    add(ViolationKind::EmptyOtherLabel, "construction");
  }

  if (obj.mechanical) {
    const auto& mech = *obj.mechanical;
    if (mech.stiffness && !(*mech.stiffness >= 0.0 && *mech.stiffness <= 1.0)) {
      add(ViolationKind::StiffnessOutOfRange, fmt::format("stiffness {}", *mech.stiffness));
    }
    if (mech.elasticity && !(*mech.elasticity >= 0.0)) {
      add(ViolationKind::ElasticityNegative, fmt::format("elasticity {}", *mech.elasticity));
    }
    for (const auto& line : mech.per_line) {
      if (!(line.ratio >= 0.0)) {
        add(ViolationKind::ElasticityNegative,
            fmt::format("{} elasticity {}", to_string(line.line), line.ratio));
      }
    }
    if (mech.friction && !(*mech.friction >= 0.0)) {
      add(ViolationKind::FrictionNegative, fmt::format("friction {}", *mech.friction));
    }
    if (const auto summary = elasticity_summary(mech.per_line)) {
      if (!mech.elasticity || *mech.elasticity != *summary) {
        add(ViolationKind::SummaryNotMax,
            fmt::format("summary {} but per-line max {}",
                        mech.elasticity ? fmt::format("{}", *mech.elasticity) : "missing",
                        *summary));
      }
    }
  }
  return out;
}

double shortest_edge(const ClothObject& obj) {
  if (obj.dimensions.empty()) {
    throw Error(ErrorCode::NoDimensions, fmt::format("object '{}' has no dimensions", obj.id));
  }
  return std::min_element(obj.dimensions.begin(), obj.dimensions.end(),
                          [](const auto& a, const auto& b) { return a.length_mm < b.length_mm; })
      ->length_mm;
}

double longest_edge(const ClothObject& obj) {
  if (obj.dimensions.empty()) {
    throw Error(ErrorCode::NoDimensions, fmt::format("object '{}' has no dimensions", obj.id));
  }
  return std::max_element(obj.dimensions.begin(), obj.dimensions.end(),
                          [](const auto& a, const auto& b) { return a.length_mm < b.length_mm; })
      ->length_mm;
}

std::optional<double> dimension_of(const ClothObject& obj, ReferenceLine line) {
  for (const auto& dim : obj.dimensions) {
    if (dim.line == line) return dim.length_mm;
  }
  return std::nullopt;
}

std::optional<double> elasticity_summary(const std::vector<LineElasticity>& lines) {
  if (lines.empty()) return std::nullopt;
  return std::max_element(lines.begin(), lines.end(),
                          [](const auto& a, const auto& b) { return a.ratio < b.ratio; })
      ->ratio;
}

std::string_view to_string(ReferenceLine line) noexcept {
  switch (line) {
    case ReferenceLine::Line1: return "L1";
    case ReferenceLine::Line2: return "L2";
    case ReferenceLine::Line3: return "L3";
    case ReferenceLine::Line4: return "L4";
  }
  return "?";
}

std::string_view to_string(ShapeKind kind) noexcept {
  switch (kind) {
    case ShapeKind::Rectangular: return "rectangular";
    case ShapeKind::Shirt: return "shirt";
    case ShapeKind::TShirt: return "tshirt";
    case ShapeKind::Top: return "top";
    case ShapeKind::Pants: return "pants";
    case ShapeKind::Skirt: return "skirt";
    case ShapeKind::Other: return "other";
  }
  return "?";
}

std::string_view to_string(ColorLabel color) noexcept {
  switch (color) {
    case ColorLabel::Red: return "red";
    case ColorLabel::Orange: return "orange";
    case ColorLabel::Yellow: return "yellow";
    case ColorLabel::Green: return "green";
    case ColorLabel::Blue: return "blue";
    case ColorLabel::Purple: return "purple";
    case ColorLabel::White: return "white";
    case ColorLabel::Black: return "black";
    case ColorLabel::Grey: return "grey";
    case ColorLabel::Brown: return "brown";
  }
  return "?";
}

std::string_view to_string(MaterialKind kind) noexcept {
  switch (kind) {
    case MaterialKind::Cotton: return "cotton";
    case MaterialKind::Linen: return "linen";
    case MaterialKind::Silk: return "silk";
    case MaterialKind::Wool: return "wool";
    case MaterialKind::Polyester: return "polyester";
    case MaterialKind::Nylon: return "nylon";
    case MaterialKind::Acrylic: return "acrylic";
    case MaterialKind::Elastane: return "elastane";
    case MaterialKind::Denim: return "denim";
    case MaterialKind::Other: return "other";
  }
  return "?";
}

std::string_view to_string(ConstructionKind kind) noexcept {
  switch (kind) {
    case ConstructionKind::Woven: return "woven";
    case ConstructionKind::Knitted: return "knitted";
    case ConstructionKind::Other: return "other";
  }
  return "?";
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::EmptyId: return "EmptyId";
    case ViolationKind::WeightNonPositive: return "WeightNonPositive";
    case ViolationKind::DimensionNonPositive: return "DimensionNonPositive";
    case ViolationKind::DuplicateReferenceLine: return "DuplicateReferenceLine";
    case ViolationKind::LineInvalidForShape: return "LineInvalidForShape";
    case ViolationKind::NoColors: return "NoColors";
    case ViolationKind::EmptyOtherLabel: return "EmptyOtherLabel";
    case ViolationKind::StiffnessOutOfRange: return "StiffnessOutOfRange";
    case ViolationKind::ElasticityNegative: return "ElasticityNegative";
    case ViolationKind::FrictionNegative: return "FrictionNegative";
    case ViolationKind::SummaryNotMax: return "SummaryNotMax";
    case ViolationKind::NonFiniteValue: return "NonFiniteValue";
  }
  return "?";
}

std::string to_label(const ShapeCategory& shape) {
  return labeled_to_string(shape, ShapeKind::Other);
}

std::string to_label(const MaterialLabel& material) {
  return labeled_to_string(material, MaterialKind::Other);
}

std::string to_label(const ConstructionTechnique& construction) {
  return labeled_to_string(construction, ConstructionKind::Other);
}

ReferenceLine parse_reference_line(std::string_view text) {
  std::string key = lowercase(text);
  if (key.rfind("line", 0) == 0) key = "l" + key.substr(4);
  return parse_enum(key,
                    std::array{ReferenceLine::Line1, ReferenceLine::Line2, ReferenceLine::Line3,
                               ReferenceLine::Line4},
                    "reference line");
}

ColorLabel parse_color(std::string_view text) {
  if (lowercase(text) == "gray") return ColorLabel::Grey;
  return parse_enum(text,
                    std::array{ColorLabel::Red, ColorLabel::Orange, ColorLabel::Yellow,
                               ColorLabel::Green, ColorLabel::Blue, ColorLabel::Purple,
                               ColorLabel::White, ColorLabel::Black, ColorLabel::Grey,
                               ColorLabel::Brown},
                    "color");
}

ShapeCategory parse_shape(std::string_view text) {
  if (auto label = other_label(text)) return {ShapeKind::Other, std::move(*label)};
  std::string key = lowercase(text);
  if (key == "t-shirt") key = "tshirt";
  const auto kind = parse_enum(key,
                               std::array{ShapeKind::Rectangular, ShapeKind::Shirt,
                                          ShapeKind::TShirt, ShapeKind::Top, ShapeKind::Pants,
                                          ShapeKind::Skirt},
                               "shape");
  return {kind, {}};
}

MaterialLabel parse_material(std::string_view text) {
  if (auto label = other_label(text)) return {MaterialKind::Other, std::move(*label)};
  const auto kind = parse_enum(text,
                               std::array{MaterialKind::Cotton, MaterialKind::Linen,
                                          MaterialKind::Silk, MaterialKind::Wool,
                                          MaterialKind::Polyester, MaterialKind::Nylon,
                                          MaterialKind::Acrylic, MaterialKind::Elastane,
                                          MaterialKind::Denim},
                               "material");
  return {kind, {}};
}

ConstructionTechnique parse_construction(std::string_view text) {
  if (auto label = other_label(text)) return {ConstructionKind::Other, std::move(*label)};
  const auto kind = parse_enum(text, std::array{ConstructionKind::Woven, ConstructionKind::Knitted},
                               "construction technique");
  return {kind, {}};
}

}  // namespace clothbench
