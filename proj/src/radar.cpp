#include "clothbench/radar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "clothbench/error.hpp"
#include "csv.hpp"

namespace clothbench {
namespace {

constexpr double kTieTolerance = 1e-12;
constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::optional<double> numeric_value(const ClothObject& obj, PropertyAxis axis) {
  switch (axis) {
    case PropertyAxis::Size:
      if (obj.dimensions.empty()) return std::nullopt;
      return longest_edge(obj);
    case PropertyAxis::Weight:
      return obj.weight_g;
    case PropertyAxis::Stiffness:
      return obj.mechanical ? obj.mechanical->stiffness : std::nullopt;
    case PropertyAxis::Elasticity:
      if (!obj.mechanical) return std::nullopt;
      if (obj.mechanical->elasticity) return obj.mechanical->elasticity;
      return elasticity_summary(obj.mechanical->per_line);
    case PropertyAxis::Friction:
      return obj.mechanical ? obj.mechanical->friction : std::nullopt;
    default:
      return std::nullopt;
  }
}

std::vector<const ClothObject*> resolve_members(const ClothSet& set, const ObjectMap& objects) {
  if (set.members.empty()) {
    throw Error(ErrorCode::EmptySet, fmt::format("set '{}' has no members", set.id));
  }
  std::vector<const ClothObject*> out;
  out.reserve(set.members.size());
  for (const auto& id : set.members) {
    const auto it = objects.find(id);
    if (it == objects.end()) {
      throw Error(ErrorCode::UnknownId, fmt::format("set '{}' references unknown object '{}'", set.id, id));
    }
    out.push_back(&it->second);
  }
  return out;
}

void check_axes(const std::vector<RadarProfile>& profiles) {
  if (profiles.empty()) throw Error(ErrorCode::InvalidArgument, "no profiles given");
  const auto& reference = profiles.front().axes;
  for (const auto& p : profiles) {
    bool same = p.axes.size() == reference.size();
    for (std::size_t k = 0; same && k < reference.size(); ++k) {
      same = p.axes[k].axis == reference[k].axis;
    }
    if (!same) {
      throw Error(ErrorCode::AxisMismatch,
                  fmt::format("profile '{}' does not share the axes of '{}'", p.set_id,
                              profiles.front().set_id));
    }
  }
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string number(double v) { return fmt::format("{}", v); }

}  // namespace

std::string_view to_string(PropertyAxis axis) noexcept {
  switch (axis) {
    case PropertyAxis::Size: return "size";
    case PropertyAxis::Weight: return "weight";
    case PropertyAxis::Shapes: return "shapes";
    case PropertyAxis::Colors: return "colors";
    case PropertyAxis::Materials: return "materials";
    case PropertyAxis::Stiffness: return "stiffness";
    case PropertyAxis::Elasticity: return "elasticity";
    case PropertyAxis::Friction: return "friction";
  }
  return "?";
}

PropertyAxis parse_axis(std::string_view text) {
  for (auto axis : kAllAxes) {
    if (to_string(axis) == text) return axis;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown property axis '{}'", text));
}

std::string_view unit_of(PropertyAxis axis) noexcept {
  switch (axis) {
    case PropertyAxis::Size: return "mm";
    case PropertyAxis::Weight: return "g";
    case PropertyAxis::Shapes:
    case PropertyAxis::Colors:
    case PropertyAxis::Materials: return "count";
    default: return "ratio";
  }
}

bool is_categorical(PropertyAxis axis) noexcept {
  return axis == PropertyAxis::Shapes || axis == PropertyAxis::Colors ||
         axis == PropertyAxis::Materials;
}

double AxisSummary::value() const noexcept {
  if (missing) return 0.0;
  return is_categorical(axis) ? static_cast<double>(count) : range;
}

AxisSummary property_range(const ClothSet& set, const ObjectMap& objects, PropertyAxis axis) {
  const auto members = resolve_members(set, objects);
  AxisSummary summary;
  summary.axis = axis;

  if (is_categorical(axis)) {
    std::set<std::string> labels;
    for (const auto* obj : members) {
      switch (axis) {
        case PropertyAxis::Shapes:
          labels.insert(to_label(obj->shape));
          break;
        case PropertyAxis::Colors:
          for (auto c : obj->colors) labels.emplace(to_string(c));
          break;
        default:
          for (const auto& m : obj->materials) labels.insert(to_label(m));
          break;
      }
    }
    summary.count = static_cast<int>(labels.size());
    summary.members_used = static_cast<int>(members.size());
    return summary;
  }

  bool first = true;
  for (const auto* obj : members) {
    const auto v = numeric_value(*obj, axis);
    if (!v) {
      ++summary.members_skipped;
      continue;
    }
    ++summary.members_used;
    summary.min = first ? *v : std::min(summary.min, *v);
    summary.max = first ? *v : std::max(summary.max, *v);
    first = false;
  }
  if (summary.members_used == 0) {
    throw Error(ErrorCode::AllMembersMissingProperty,
                fmt::format("no member of set '{}' has a {} value", set.id, to_string(axis)));
  }
  summary.range = summary.max - summary.min;
  return summary;
}

const AxisSummary& RadarProfile::at(PropertyAxis axis) const {
  for (const auto& a : axes) {
    if (a.axis == axis) return a;
  }
  throw Error(ErrorCode::AxisMismatch,
              fmt::format("profile '{}' has no {} axis", set_id, to_string(axis)));
}

RadarProfile radar_profile(const ClothSet& set, const ObjectMap& objects) {
  resolve_members(set, objects);
  RadarProfile profile;
  profile.set_id = set.id;
  profile.set_name = set.name;
  for (auto axis : kAllAxes) {
    try {
      AxisSummary summary = property_range(set, objects, axis);
      if (summary.members_skipped > 0) {
        profile.warnings.push_back(fmt::format("{}: skipped {} member(s) without a value",
                                               to_string(axis), summary.members_skipped));
      }
      profile.axes.push_back(summary);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllMembersMissingProperty) throw;
      AxisSummary summary;
      summary.axis = axis;
      summary.missing = true;
      summary.members_skipped = static_cast<int>(set.members.size());
      profile.axes.push_back(summary);
      profile.warnings.push_back(fmt::format("{}: no member has a value", to_string(axis)));
    }
  }
  return profile;
}

std::vector<std::vector<double>> radar_vertex_radii(const std::vector<RadarProfile>& profiles) {
  check_axes(profiles);
  const std::size_t n_axes = profiles.front().axes.size();
  std::vector<double> axis_max(n_axes, 0.0);
  for (const auto& p : profiles) {
    for (std::size_t k = 0; k < n_axes; ++k) axis_max[k] = std::max(axis_max[k], p.axes[k].value());
  }
  std::vector<std::vector<double>> radii;
  for (const auto& p : profiles) {
    std::vector<double> r(n_axes, 0.0);
    for (std::size_t k = 0; k < n_axes; ++k) {
      if (axis_max[k] > 0.0) r[k] = p.axes[k].value() / axis_max[k];
    }
    radii.push_back(std::move(r));
  }
  return radii;
}

std::string render_radar(const std::vector<RadarProfile>& profiles, const RenderOptions& options) {
  const auto radii = radar_vertex_radii(profiles);
  const auto& axes = profiles.front().axes;
  const std::size_t n = axes.size();
  const double size = options.size_px;
  const double c = size / 2.0;
  const double radius = size * 0.34;

  auto point = [&](std::size_t k, double r) {
    const double angle = -std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * static_cast<double>(k) / n;
    return std::pair{c + r * radius * std::cos(angle), c + r * radius * std::sin(angle)};
  };
  auto polygon = [&](const std::vector<double>& r) {
    std::string pts;
    for (std::size_t k = 0; k < n; ++k) {
      const auto [x, y] = point(k, r[k]);
      if (k > 0) pts += ' ';
      pts += fmt::format("{:.2f},{:.2f}", x, y);
    }
    return pts;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{0}\" "
      "viewBox=\"0 0 {0} {0}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      options.size_px);
  svg += fmt::format("<rect width=\"{0}\" height=\"{0}\" fill=\"#ffffff\"/>\n", options.size_px);
  if (!options.title.empty()) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n", c,
                       xml_escape(options.title));
  }

  svg += "<g id=\"grid\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int ring = 1; ring <= 4; ++ring) {
    svg += fmt::format("<polygon points=\"{}\"/>\n", polygon(std::vector<double>(n, ring / 4.0)));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto [x, y] = point(k, 1.0);
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", c, c, x, y);
  }
  svg += "</g>\n";

  svg += "<g id=\"axis-labels\" text-anchor=\"middle\">\n";
  for (std::size_t k = 0; k < n; ++k) {
    const auto [x, y] = point(k, 1.12);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{} ({})</text>\n", x, y + 4.0,
                       to_string(axes[k].axis), unit_of(axes[k].axis));
  }
  svg += "</g>\n";

  svg += "<g id=\"profiles\" stroke-width=\"2\" fill-opacity=\"0.15\">\n";
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const char* colour = kPalette[i % kPalette.size()];
    svg += fmt::format("<polygon data-set=\"{}\" points=\"{}\" fill=\"{}\" stroke=\"{}\"/>\n",
                       xml_escape(profiles[i].set_id), polygon(radii[i]), colour, colour);
  }
  svg += "</g>\n";

  svg += "<g id=\"legend\">\n";
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const char* colour = kPalette[i % kPalette.size()];
    const double y = 40.0 + 18.0 * static_cast<double>(i);
    const std::string& label = profiles[i].set_name.empty() ? profiles[i].set_id : profiles[i].set_name;
    svg += fmt::format("<rect x=\"12\" y=\"{:.2f}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", y - 10.0,
                       colour);
    svg += fmt::format("<text x=\"30\" y=\"{:.2f}\">{}</text>\n", y, xml_escape(label));
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string compare_report(const std::vector<RadarProfile>& profiles) {
  if (profiles.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "comparison needs at least two profiles");
  }
  check_axes(profiles);
  std::vector<std::string> header = {"axis", "unit"};
  for (const auto& p : profiles) header.push_back(p.set_id);
  header.emplace_back("winner");
  std::string out = detail::csv_row(header);

  for (std::size_t k = 0; k < profiles.front().axes.size(); ++k) {
    const PropertyAxis axis = profiles.front().axes[k].axis;
    std::vector<std::string> row = {std::string(to_string(axis)), std::string(unit_of(axis))};
    double best = -1.0;
    for (const auto& p : profiles) {
      const auto& a = p.axes[k];
      row.push_back(a.missing ? std::string() : number(a.value()));
      if (!a.missing) best = std::max(best, a.value());
    }
    std::vector<std::string> winners;
    for (const auto& p : profiles) {
      const auto& a = p.axes[k];
      if (!a.missing && std::abs(a.value() - best) <= kTieTolerance) winners.push_back(p.set_id);
    }
    row.push_back(winners.size() == 1 ? winners.front() : std::string(winners.empty() ? "" : "tie"));
    out += detail::csv_row(row);
  }
  return out;
}

}  // namespace clothbench
