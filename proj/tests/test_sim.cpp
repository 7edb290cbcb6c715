#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "clothbench/error.hpp"
#include "clothbench/sim.hpp"
#include "oracles.hpp"

using namespace clothbench;
using namespace clothbench::sim;

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

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

SimState single_particle(double z) {
  SimState s;
  s.nx = 1;
  s.ny = 1;
  s.position = {Vec3(0.0, 0.0, z)};
  s.velocity = {Vec3::Zero()};
  s.rest_position = s.position;
  s.mass = {0.01};
  s.pinned = {0};
  s.gripped = {0};
  return s;
}

// Tracks the largest relative energy increase between samples taken every
// 100 steps, and the deepest point below the ground plane.
struct PhysicsMonitor {
  const SimParams& params;
  double previous = 0.0;
  double worst_increase = 0.0;
  double deepest = 0.0;
  bool started = false;

  void operator()(const SimState& s) {
    for (const auto& x : s.position) deepest = std::min(deepest, x.z());
    if (s.steps % 100 != 0) return;
    const double e = energy(s, params).total();
    if (started) worst_increase = std::max(worst_increase, (e - previous) / std::max(std::abs(previous), 1e-12));
    previous = e;
    started = true;
  }
};

SimParams rigid_params() {
  SimParams p;
  p.k_stretch = 5000.0;
  p.k_bend = 5000.0;
  p.dt = 1e-5;
  p.damping = 10.0;
  return p;
}

SimParams pull_params(double k_stretch) {
  SimParams p;
  p.k_stretch = k_stretch;
  p.dt = 1e-4;
  p.damping = 10.0;
  return p;
}

}  // namespace

TEST(Step, FreeParticleOneStep) {
  SimParams p;
  p.damping = 0.0;
  auto s = single_particle(1.0);
  step(s, p);
  EXPECT_DOUBLE_EQ(s.velocity[0].z(), -p.gravity * p.dt);
  EXPECT_DOUBLE_EQ(s.position[0].z(), 1.0 - p.gravity * p.dt * p.dt);
  EXPECT_EQ(s.velocity[0].x(), 0.0);
  EXPECT_EQ(s.steps, 1);
}

TEST(Step, EquilibriumIsUnchanged) {
  SimParams p;
  p.gravity = 0.0;
  auto s = make_cloth(p, Vec3(0.0, 0.0, 0.1));
  const auto before = s.position;
  for (int i = 0; i < 100; ++i) step(s, p);
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR((s.position[k] - before[k]).norm(), 0.0, 1e-12);
}

TEST(Step, HugeTimeStepBlowsUp) {
  SimParams p;
  p.k_stretch = 1e4;
  p.dt = 1.0;
  auto s = make_cloth(p, Vec3(0.0, 0.0, 0.1));
  s.position[s.index(10, 10)] += Vec3(0.01, 0.0, 0.0);
  EXPECT_EQ(code_of([&] {
              for (int i = 0; i < 100; ++i) step(s, p);
            }),
            ErrorCode::NumericalBlowup);
}

TEST(Step, InvalidParams) {
  SimParams p;
  p.nx = 1;
  EXPECT_EQ(code_of([&] { validate(p); }), ErrorCode::InvalidArgument);
  p = {};
  p.dt = 0.0;
  EXPECT_EQ(code_of([&] { validate(p); }), ErrorCode::InvalidArgument);
  p = {};
  p.friction = -0.1;
  EXPECT_EQ(code_of([&] { validate(p); }), ErrorCode::InvalidArgument);
}

TEST(Step, PinnedParticlesNeverMove) {
  SimParams p;
  auto s = make_cloth(p, Vec3(0.0, 0.0, 0.2));
  const std::vector<int> pins{s.index(0, 0), s.index(p.nx - 1, 0), s.index(0, p.ny - 1)};
  for (int k : pins) pin(s, k);
  std::vector<Vec3> start;
  for (int k : pins) start.push_back(s.position[k]);
  for (int i = 0; i < 3000; ++i) {
    step(s, p);
    for (std::size_t n = 0; n < pins.size(); ++n) ASSERT_EQ(s.position[pins[n]], start[n]);
  }
  EXPECT_LT(s.position[s.index(p.nx - 1, p.ny - 1)].z(), 0.2);
}

TEST(Settle, RestingClothReturnsWithinHoldWindow) {
  SimParams p;
  auto s = make_cloth(p, Vec3(0.0, 0.0, 0.0));
  SettleCriteria c;
  const auto r = settle(s, p, c);
  EXPECT_LE(r.steps, c.hold_steps + 1);
}

TEST(Settle, DropOntoPlaneSettlesWithoutPenetration) {
  SimParams p;
  auto s = make_cloth(p, Vec3(0.0, 0.0, 0.005));
  PhysicsMonitor monitor{p};
  SettleCriteria c;
  const auto r = settle(s, p, c, std::ref(monitor));
  EXPECT_LT(r.steps, c.max_steps);
  EXPECT_LE(monitor.worst_increase, 1e-9);
  EXPECT_GE(monitor.deepest, -1e-4);
  EXPECT_NEAR(project_area(s), 90000.0, 900.0);
}

TEST(Settle, UndampedDrapeDoesNotSettle) {
  SimParams p;
  p.damping = 0.0;
  DrapeOptions o;
  o.settle.max_steps = 20'000;
  EXPECT_EQ(code_of([&] { (void)run_drape(p, default_plate(p), o); }), ErrorCode::DidNotSettle);
}

TEST(Energy, NonIncreasingDuringDrape) {
  SimParams p;
  PhysicsMonitor monitor{p};
  DrapeOptions o;
  o.observer = std::ref(monitor);
  const auto r = run_drape(p, default_plate(p), o);
  EXPECT_LE(monitor.worst_increase, 1e-9);
  EXPECT_GE(monitor.deepest, -1e-4);
  EXPECT_GT(r.settle_steps, 0);
}

TEST(ProjectArea, FlatFoldedAndDegenerate) {
  SimParams p;
  auto s = make_cloth(p, Vec3(0.0, 0.0, 0.0));
  EXPECT_NEAR(project_area(s), 90000.0, 900.0);
  for (auto& x : s.position) {
    if (x.x() > 0.15) x = Vec3(0.3 - x.x(), x.y(), 0.002);
  }
  EXPECT_NEAR(project_area(s), 45000.0, 900.0);
  for (auto& x : s.position) x = Vec3(0.1, 0.1, 0.0);
  EXPECT_NEAR(project_area(s), 0.0, 1.0);
}

TEST(ProjectArea, RasterMatchesCountAndTriangleCount) {
  SimParams p;
  const auto s = make_cloth(p, Vec3(0.05, 0.02, 0.0));
  EXPECT_EQ(triangles(s).size(), static_cast<std::size_t>(2 * (p.nx - 1) * (p.ny - 1)));
  const auto mask = top_view_mask(s);
  EXPECT_EQ(static_cast<double>(oracle::count_set(mask)), project_area(s));
}

TEST(Drape, DeterministicBitIdentical) {
  SimParams p;
  const auto a = run_drape(p, default_plate(p));
  const auto b = run_drape(p, default_plate(p));
  ASSERT_EQ(a.final_state.size(), b.final_state.size());
  for (std::size_t k = 0; k < a.final_state.size(); ++k) {
    ASSERT_EQ(a.final_state.position[k], b.final_state.position[k]);
    ASSERT_EQ(a.final_state.velocity[k], b.final_state.velocity[k]);
  }
  EXPECT_EQ(a.stiffness, b.stiffness);
}

TEST(Drape, DefaultPlateFollowsCoverageRule) {
  SimParams p;
  p.width_mm = 400.0;
  EXPECT_NEAR(default_plate(p).diameter_mm, 180.0, 1e-9);
}

TEST(Drape, StiffnessNondecreasingInBendStiffness) {
  SimParams p;
  double previous = -1.0;
  for (double rel : {0.1, 0.5, 1.0, 5.0, 10.0}) {
    p.k_bend = rel * p.k_stretch / 100.0;
    const double s = run_drape(p, default_plate(p)).stiffness;
    EXPECT_GE(s, previous) << "k_bend " << p.k_bend;
    previous = s;
  }
}

TEST(Drape, RigidLimit) {
  const auto p = rigid_params();
  EXPECT_GE(run_drape(p, default_plate(p)).stiffness, 0.9);
}

TEST(Drape, FloppyLimit) {
  SimParams p;
  p.k_bend = 0.0;
  EXPECT_LE(run_drape(p, default_plate(p)).stiffness, 0.4);
}

TEST(Incline, RecoversFriction) {
  SimParams p;
  p.friction = 0.0;
  EXPECT_LE(run_incline(p).mu, 0.02);
  for (double mu : {0.2, 0.4, 0.5, 0.6}) {
    p.friction = mu;
    const auto r = run_incline(p);
    EXPECT_NEAR(r.mu, mu, 0.05) << mu;
    EXPECT_NEAR(std::tan(r.slide_angle_deg * std::numbers::pi / 180.0), r.mu, 1e-12);
  }
}

TEST(Incline, HighFrictionDoesNotSlideBelowCap) {
  SimParams p;
  p.friction = 10.0;
  InclineOptions o;
  o.max_angle_deg = 84.0;
  EXPECT_EQ(code_of([&] { (void)run_incline(p, o); }), ErrorCode::NoSlide);
  const auto r = run_incline(p);
  EXPECT_NEAR(r.slide_angle_deg, deg(std::atan(10.0)), 0.5);
}

TEST(Pull, ZeroForceGivesZero) {
  EXPECT_NEAR(run_pull(pull_params(500.0), 0.0).elasticity, 0.0, 1e-6);
}

TEST(Pull, MatchesHookeanOracle) {
  for (double ks : {500.0, 1000.0}) {
    const auto p = pull_params(ks);
    const double expected = oracle::pull_elasticity(p, kProtocolForceN);
    EXPECT_NEAR(run_pull(p).elasticity, expected, 0.10 * expected) << ks;
  }
}

TEST(Pull, DoublingStretchStiffnessHalvesElasticity) {
  const double soft = run_pull(pull_params(500.0)).elasticity;
  const double hard = run_pull(pull_params(1000.0)).elasticity;
  EXPECT_NEAR(soft / hard, 2.0, 0.2);
}

TEST(Primitive, StifferClothLiftsBetter) {
  SimParams floppy;
  floppy.k_bend = 0.01;
  SimParams stiff;
  stiff.k_bend = 1.0;
  const auto spec = canonical_primitive(PrimitiveKind::Lift);
  EXPECT_GE(run_primitive(spec, stiff).result.fr, run_primitive(spec, floppy).result.fr);
}

TEST(Primitive, LowFrictionPushRetainsShapeBest) {
  const auto spec = canonical_primitive(PrimitiveKind::Push);
  SimParams p;
  std::vector<double> fr;
  for (double mu : {0.1, 0.5, 1.0}) {
    p.friction = mu;
    fr.push_back(run_primitive(spec, p).result.fr);
  }
  EXPECT_EQ(std::max_element(fr.begin(), fr.end()) - fr.begin(), 0);
}

TEST(Primitive, NearInextensiblePullRetainsShape) {
  auto p = pull_params(1000.0);
  p.k_bend = 10.0;
  EXPECT_GE(run_primitive(canonical_primitive(PrimitiveKind::Pull), p).result.fr, 0.95);
}

TEST(Primitive, FoldReportsUncoveredArea) {
  SimParams p;
  const auto r = run_primitive(canonical_primitive(PrimitiveKind::Fold), p);
  EXPECT_GE(r.uncovered_bottom_mm2, 0.0);
  EXPECT_LE(r.uncovered_bottom_mm2, r.area_after_mm2);
  EXPECT_NEAR(r.result.fr, (r.area_after_mm2 - r.uncovered_bottom_mm2) / r.area_after_mm2, 1e-12);
}

TEST(GripPath, ConstantSpeedPolyline) {
  GripPath path{{Vec3::Zero(), Vec3(0.1, 0.0, 0.0), Vec3(0.1, 0.1, 0.0)}, 0.1, 1.0};
  EXPECT_NEAR(path.duration(), 2.0, 1e-12);
  EXPECT_EQ(path.displacement_at(0.5), Vec3::Zero());
  EXPECT_NEAR((path.displacement_at(1.5) - Vec3(0.05, 0.0, 0.0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((path.displacement_at(2.5) - Vec3(0.1, 0.05, 0.0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((path.displacement_at(10.0) - Vec3(0.1, 0.1, 0.0)).norm(), 0.0, 1e-12);
}
