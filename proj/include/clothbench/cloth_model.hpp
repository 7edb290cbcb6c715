#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace clothbench {

/// Size/elasticity reference lines. Rectangular items only use Line1 (width)
/// and Line2 (height); garments may use all four.
enum class ReferenceLine { Line1, Line2, Line3, Line4 };

enum class ShapeKind { Rectangular, Shirt, TShirt, Top, Pants, Skirt, Other };

struct ShapeCategory {
  ShapeKind kind = ShapeKind::Rectangular;
  std::string other_label;  // non-empty iff kind == Other

  auto operator<=>(const ShapeCategory&) const = default;
};

enum class ColorLabel { Red, Orange, Yellow, Green, Blue, Purple, White, Black, Grey, Brown };

enum class MaterialKind { Cotton, Linen, Silk, Wool, Polyester, Nylon, Acrylic, Elastane, Denim, Other };

struct MaterialLabel {
  MaterialKind kind = MaterialKind::Cotton;
  std::string other_label;

  auto operator<=>(const MaterialLabel&) const = default;
};

enum class ConstructionKind { Woven, Knitted, Other };

struct ConstructionTechnique {
  ConstructionKind kind = ConstructionKind::Woven;
  std::string other_label;

  auto operator<=>(const ConstructionTechnique&) const = default;
};

struct Dimension {
  ReferenceLine line = ReferenceLine::Line1;
  double length_mm = 0.0;

  bool operator==(const Dimension&) const = default;
};

struct LineElasticity {
  ReferenceLine line = ReferenceLine::Line1;
  double ratio = 0.0;

  bool operator==(const LineElasticity&) const = default;
};

/// Measured mechanical properties. Each value is optional because real
/// registries are only partially measured.
struct MechanicalProperties {
  std::optional<double> stiffness;   // drape ratio in [0, 1]
  std::optional<double> elasticity;  // summary = max over per_line when present
  std::vector<LineElasticity> per_line;
  std::optional<double> friction;    // Coulomb coefficient

  bool operator==(const MechanicalProperties&) const = default;
};

struct ClothObject {
  std::string id;
  std::string name;
  ShapeCategory shape;
  std::vector<Dimension> dimensions;
  double weight_g = 0.0;
  std::set<ColorLabel> colors;
  bool has_print = false;
  std::set<MaterialLabel> materials;
  ConstructionTechnique construction;
  std::optional<MechanicalProperties> mechanical;

  bool operator==(const ClothObject&) const = default;
};

struct ClothSet {
  std::string id;
  std::string name;
  std::string source;
  std::vector<std::string> members;

  bool operator==(const ClothSet&) const = default;
};

enum class ViolationKind {
  EmptyId,
  WeightNonPositive,
  DimensionNonPositive,
  DuplicateReferenceLine,
  LineInvalidForShape,
  NoColors,
  EmptyOtherLabel,
  StiffnessOutOfRange,
  ElasticityNegative,
  FrictionNegative,
  SummaryNotMax,
  NonFiniteValue,
};

struct Violation {
  ViolationKind kind;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

/// Returns every invariant violation of `obj`; an empty list means valid.
[[nodiscard]] std::vector<Violation> validate_object(const ClothObject& obj);

/// Minimum recorded dimension. Throws NoDimensions when none are recorded.
[[nodiscard]] double shortest_edge(const ClothObject& obj);
[[nodiscard]] double longest_edge(const ClothObject& obj);

[[nodiscard]] std::optional<double> dimension_of(const ClothObject& obj, ReferenceLine line);

/// Maximum of the per-line values, or nullopt when there are none.
[[nodiscard]] std::optional<double> elasticity_summary(const std::vector<LineElasticity>& lines);

// Text labels used by the registry file and the CLI. Parsers throw
// InvalidArgument on unknown labels; "other:<label>" selects the Other variant.
std::string_view to_string(ReferenceLine line) noexcept;
std::string_view to_string(ShapeKind kind) noexcept;
std::string_view to_string(ColorLabel color) noexcept;
std::string_view to_string(MaterialKind kind) noexcept;
std::string_view to_string(ConstructionKind kind) noexcept;
std::string_view to_string(ViolationKind kind) noexcept;

std::string to_label(const ShapeCategory& shape);
std::string to_label(const MaterialLabel& material);
std::string to_label(const ConstructionTechnique& construction);

ReferenceLine parse_reference_line(std::string_view text);
ColorLabel parse_color(std::string_view text);
ShapeCategory parse_shape(std::string_view text);
MaterialLabel parse_material(std::string_view text);
ConstructionTechnique parse_construction(std::string_view text);

}  // namespace clothbench
