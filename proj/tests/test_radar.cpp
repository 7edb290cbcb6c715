#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "clothbench/error.hpp"
#include "clothbench/radar.hpp"
#include "clothbench/registry.hpp"
#include "oracles.hpp"

using namespace clothbench;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no clothbench::Error thrown";
  return ErrorCode::InvalidArgument;
}

const Registry& fixture() {
  static const Registry reg = load(oracle::data_path("fixture_registry.json"));
  return reg;
}

RadarProfile profile_of(const std::string& set_id) {
  return radar_profile(find_set(fixture(), set_id), fixture().objects);
}

ClothObject square(const std::string& id, double edge, double weight, double stiffness) {
  ClothObject o;
  o.id = id;
  o.dimensions = {{ReferenceLine::Line1, edge}, {ReferenceLine::Line2, edge}};
  o.weight_g = weight;
  o.colors = {ColorLabel::Blue};
  o.materials = {{MaterialKind::Cotton, {}}};
  o.mechanical = MechanicalProperties{stiffness, 0.1, {}, 0.5};
  return o;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(PropertyRange, ReferenceSampleRanges) {
  const auto& set = find_set(fixture(), "REFERENCE6");
  const auto stiffness = property_range(set, fixture().objects, PropertyAxis::Stiffness);
  EXPECT_NEAR(stiffness.range, 0.53, 1e-12);
  EXPECT_NEAR(stiffness.min, 0.32, 1e-12);
  EXPECT_NEAR(stiffness.max, 0.85, 1e-12);
  EXPECT_NEAR(property_range(set, fixture().objects, PropertyAxis::Elasticity).range, 0.93, 1e-12);
  EXPECT_NEAR(property_range(set, fixture().objects, PropertyAxis::Friction).range, 0.48, 1e-12);
  EXPECT_EQ(stiffness.members_used, 6);
}

TEST(PropertyRange, SingleMemberAndErrors) {
  ObjectMap objects{{"a", square("a", 300.0, 10.0, 0.4)}};
  const ClothSet one{"one", "", "", {"a"}};
  EXPECT_EQ(property_range(one, objects, PropertyAxis::Stiffness).range, 0.0);
  EXPECT_EQ(property_range(one, objects, PropertyAxis::Colors).count, 1);
  EXPECT_EQ(code_of([&] { (void)property_range(ClothSet{"e", "", "", {}}, objects, PropertyAxis::Size); }),
            ErrorCode::EmptySet);
  EXPECT_EQ(code_of([&] { (void)property_range(ClothSet{"d", "", "", {"zz"}}, objects, PropertyAxis::Size); }),
            ErrorCode::UnknownId);
  objects["a"].mechanical.reset();
  EXPECT_EQ(code_of([&] { (void)property_range(one, objects, PropertyAxis::Friction); }),
            ErrorCode::AllMembersMissingProperty);
}

TEST(PropertyRange, SkipsMembersWithoutValue) {
  ObjectMap objects{{"a", square("a", 300.0, 10.0, 0.4)}, {"b", square("b", 500.0, 30.0, 0.9)}};
  objects["b"].mechanical->friction.reset();
  const ClothSet set{"s", "", "", {"a", "b"}};
  const auto friction = property_range(set, objects, PropertyAxis::Friction);
  EXPECT_EQ(friction.members_used, 1);
  EXPECT_EQ(friction.members_skipped, 1);
  EXPECT_EQ(property_range(set, objects, PropertyAxis::Size).range, 200.0);
  EXPECT_EQ(property_range(set, objects, PropertyAxis::Weight).range, 20.0);
}

TEST(RadarProfile, ReferenceSampleProfile) {
  const auto p = profile_of("REFERENCE6");
  EXPECT_NEAR(p.value(PropertyAxis::Stiffness), 0.53, 1e-12);
  EXPECT_NEAR(p.value(PropertyAxis::Elasticity), 0.93, 1e-12);
  EXPECT_NEAR(p.value(PropertyAxis::Friction), 0.48, 1e-12);
  EXPECT_EQ(p.axes.size(), kAllAxes.size());
}

TEST(RadarProfile, DuplicatesAndMissingAxes) {
  ObjectMap objects{{"a", square("a", 300.0, 10.0, 0.4)}, {"b", square("a", 300.0, 10.0, 0.4)}};
  objects["b"].id = "b";
  const auto p = radar_profile(ClothSet{"dup", "", "", {"a", "b"}}, objects);
  for (const auto& axis : p.axes) {
    if (is_categorical(axis.axis)) {
      EXPECT_EQ(axis.count, 1) << to_string(axis.axis);
    } else {
      EXPECT_EQ(axis.range, 0.0) << to_string(axis.axis);
    }
  }
  for (auto& [id, o] : objects) o.mechanical.reset();
  const auto bare = radar_profile(ClothSet{"dup", "", "", {"a", "b"}}, objects);
  EXPECT_TRUE(bare.at(PropertyAxis::Stiffness).missing);
  EXPECT_FALSE(bare.warnings.empty());
  EXPECT_EQ(code_of([&] { (void)radar_profile(ClothSet{"e", "", "", {}}, objects); }), ErrorCode::EmptySet);
}

TEST(RadarChart, EqualProfileTouchesEveryAxisEnd) {
  const auto p = profile_of("EOS");
  const auto radii = radar_vertex_radii({p});
  for (double r : radii[0]) EXPECT_EQ(r, 1.0);
}

TEST(RadarChart, DominatingProfileContainsDominated) {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ObjectMap objects;
    const double small_edge = 100.0 + 200.0 * u(rng);
    objects["s1"] = square("s1", small_edge, 10.0, 0.4);
    objects["s2"] = square("s2", small_edge + 50.0 * u(rng), 10.0 + 5.0 * u(rng), 0.4 + 0.1 * u(rng));
    objects["b1"] = square("b1", small_edge - 20.0, 5.0, 0.2);
    objects["b2"] = square("b2", small_edge + 300.0 * u(rng) + 60.0, 20.0 + 50.0 * u(rng), 0.6 + 0.3 * u(rng));
    objects["b2"].colors.insert(ColorLabel::Red);
    objects["b2"].materials.insert({MaterialKind::Wool, {}});
    objects["b2"].shape = {ShapeKind::Skirt, {}};
    objects["b1"].mechanical->friction = 0.1;
    objects["b1"].mechanical->elasticity = 0.0;
    objects["b2"].mechanical->elasticity = 0.6;
    const auto big = radar_profile(ClothSet{"big", "", "", {"b1", "b2"}}, objects);
    const auto small = radar_profile(ClothSet{"small", "", "", {"s1", "s2"}}, objects);
    const auto radii = radar_vertex_radii({big, small});
    for (std::size_t i = 0; i < kAllAxes.size(); ++i) {
      EXPECT_GE(radii[0][i], radii[1][i]) << to_string(kAllAxes[i]);
      EXPECT_EQ(radii[0][i], 1.0);
    }
  }
}

TEST(RadarChart, OneVertexAtUnitRadiusPerAxis) {
  const auto radii = radar_vertex_radii({profile_of("EOS"), profile_of("HCOS"), profile_of("DOS")});
  for (std::size_t axis = 0; axis < kAllAxes.size(); ++axis) {
    int at_one = 0;
    for (const auto& profile : radii) {
      EXPECT_GE(profile[axis], 0.0);
      EXPECT_LE(profile[axis], 1.0);
      at_one += profile[axis] == 1.0 ? 1 : 0;
    }
    EXPECT_GE(at_one, 1) << to_string(kAllAxes[axis]);
  }
}

TEST(RadarChart, SvgIsDeterministicAndHasOnePolygonPerProfile) {
  const std::vector profiles{profile_of("EOS"), profile_of("HCOS"), profile_of("DOS")};
  const auto svg = render_radar(profiles, {640, "Cloth sets"});
  EXPECT_EQ(svg, render_radar(profiles, {640, "Cloth sets"}));
  std::size_t polygons = 0;
  for (auto pos = svg.find("data-set="); pos != std::string::npos; pos = svg.find("data-set=", pos + 1)) ++polygons;
  EXPECT_EQ(polygons, 3u);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
}

TEST(RadarChart, GoldenFile) {
  const std::vector profiles{profile_of("EOS"), profile_of("HCOS"), profile_of("DOS")};
  const auto svg = render_radar(profiles, {640, "Cloth sets"});
  const auto golden = oracle::data_path("radar_three_sets.svg");
  if (std::getenv("CLOTHBENCH_UPDATE_GOLDEN")) std::ofstream(golden, std::ios::binary) << svg;
  EXPECT_EQ(svg, read_text(golden));
}

TEST(CompareReport, HcosDominatesSizeAndWeight) {
  const auto csv = compare_report({profile_of("EOS"), profile_of("HCOS")});
  EXPECT_EQ(csv.rfind("axis,unit,EOS,HCOS,winner", 0), 0u) << csv;
  EXPECT_NE(csv.find("size,mm,"), std::string::npos);
  std::istringstream lines(csv);
  std::string line;
  int hcos_wins = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("size,", 0) == 0 || line.rfind("weight,", 0) == 0) {
      EXPECT_NE(line.find(",HCOS"), std::string::npos) << line;
      hcos_wins += line.ends_with("HCOS\r") || line.ends_with("HCOS") ? 1 : 0;
    }
  }
  EXPECT_EQ(hcos_wins, 2);
}

TEST(CompareReport, IdenticalProfilesTie) {
  auto a = profile_of("EOS");
  auto b = a;
  b.set_id = "EOS2";
  const auto csv = compare_report({a, b});
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    EXPECT_TRUE(line.ends_with(",tie")) << line;
    ++rows;
  }
  EXPECT_EQ(rows, static_cast<int>(kAllAxes.size()));
}

TEST(CompareReport, Errors) {
  auto a = profile_of("EOS");
  auto b = profile_of("HCOS");
  b.axes.resize(3);
  EXPECT_EQ(code_of([&] { (void)compare_report({a, b}); }), ErrorCode::AxisMismatch);
  EXPECT_EQ(code_of([&] { (void)compare_report({a}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { (void)radar_vertex_radii({}); }), ErrorCode::InvalidArgument);
}
