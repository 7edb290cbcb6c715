#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "clothbench/error.hpp"
#include "clothbench/sim.hpp"

namespace clothbench::sim {
namespace {

constexpr double kMmPerM = 1000.0;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

Vec3 centroid(const SimState& s) {
  Vec3 sum = Vec3::Zero();
  for (const auto& x : s.position) sum += x;
  return sum / static_cast<double>(s.size());
}

double mean_x_of_column(const SimState& s, int i) {
  double sum = 0.0;
  for (int j = 0; j < s.ny; ++j) sum += s.position[s.index(i, j)].x();
  return sum / s.ny;
}

// Advances until the grip path has been fully traversed.
void run_grip_motion(SimState& s, const SimParams& params, const RunOptions& options) {
  const double end = s.grip->path.start_time + s.grip->path.duration();
  while (s.time < end) {
    step(s, params);
    if (options.observer) options.observer(s);
  }
}

struct GripSetup {
  int particle = 0;
  std::vector<Vec3> waypoints;
  std::vector<int> fixed;
};

// Grasp site and trajectory for a primitive on the flat cloth.
GripSetup plan_primitive(const PrimitiveSpec& spec, const SimState& s, const SimParams& params) {
  GripSetup plan;
  const double travel = spec.travel_mm / kMmPerM;
  const double grasp = spec.grasp_height_mm / kMmPerM;
  const Vec3 lift(0.0, 0.0, grasp);

  if (spec.site == GripSite::Corner) {
    // Top-left corner; its opposite corner is bottom-right.
    plan.particle = s.index(0, s.ny - 1);
    const Vec3 corner = s.position[plan.particle];
    const Vec3 opposite = s.position[s.index(s.nx - 1, 0)];
    plan.waypoints = {Vec3::Zero(), lift};
    switch (spec.kind) {
      case PrimitiveKind::Lift:
        plan.waypoints.push_back(lift + Vec3(0.0, 0.0, travel));
        break;
      case PrimitiveKind::Drag: {
        const Vec3 centre = centroid(s);
        Vec3 outward = corner - centre;
        outward.z() = 0.0;
        plan.waypoints.push_back(lift + travel * outward.normalized());
        break;
      }
      case PrimitiveKind::Fold: {
        Vec3 across = opposite - corner;
        across.z() = 0.0;
        plan.waypoints.push_back(Vec3(across.x() / 2.0, across.y() / 2.0, travel));
        plan.waypoints.push_back(across + lift);
        break;
      }
      default:
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("{} is not a corner-grasp primitive", to_string(spec.kind)));
    }
    return plan;
  }

  // Mid short edge: the x = max edge when the cloth is at least as wide as tall.
  Vec3 outward;
  std::vector<int> opposite_edge;
  if (params.width_mm >= params.height_mm) {
    plan.particle = s.index(s.nx - 1, (s.ny - 1) / 2);
    outward = Vec3(1.0, 0.0, 0.0);
    for (int j = 0; j < s.ny; ++j) opposite_edge.push_back(s.index(0, j));
  } else {
    plan.particle = s.index((s.nx - 1) / 2, s.ny - 1);
    outward = Vec3(0.0, 1.0, 0.0);
    for (int i = 0; i < s.nx; ++i) opposite_edge.push_back(s.index(i, 0));
  }
  switch (spec.kind) {
    case PrimitiveKind::Pull:
      plan.waypoints = {Vec3::Zero(), travel * outward};
      break;
    case PrimitiveKind::Push:
      plan.waypoints = {Vec3::Zero(), -travel * outward};
      break;
    default:
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("{} is not an edge-contact primitive", to_string(spec.kind)));
  }
  if (spec.fix_opposite_side) plan.fixed = std::move(opposite_edge);
  return plan;
}

}  // namespace

PlateSpec default_plate(const SimParams& params) {
  const double edge = std::min(params.width_mm, params.height_mm);
  return PlateSpec{plate_diameter(edge, kDefaultCoverageRatio), kDefaultCoverageRatio};
}

DrapeResult run_drape(const SimParams& params, const PlateSpec& plate, const DrapeOptions& options) {
  validate(params);
  if (!(plate.diameter_mm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "plate diameter must be > 0");
  }
  const double half_diagonal_mm = 0.5 * std::hypot(params.width_mm, params.height_mm);
  const double plate_height_mm =
      options.plate_height_mm > 0.0 ? options.plate_height_mm : half_diagonal_mm + 20.0;

  SimState s = make_cloth(params, Vec3(-params.width_mm / 2.0 / kMmPerM,
                                       -params.height_mm / 2.0 / kMmPerM,
                                       (plate_height_mm + options.drop_gap_mm) / kMmPerM));
  s.scene.plate = Plate{plate.diameter_mm / kMmPerM, plate_height_mm / kMmPerM, 0.0, 0.0};

  DrapeResult result;
  result.areas.a1_mm2 = params.width_mm * params.height_mm;
  result.areas.a2_mm2 = plate_area_mm2(plate.diameter_mm);
  result.settle_steps = settle(s, params, options.settle, options.observer).steps;
  result.areas.a3_mm2 = project_area(s);
  result.stiffness = drape_stiffness(result.areas);
  result.final_state = std::move(s);
  return result;
}

InclineResult run_incline(const SimParams& params, const InclineOptions& options) {
  validate(params);
  if (!(options.increment_deg > 0.0) || !(options.slide_threshold_mm > 0.0) ||
      !(options.max_angle_deg > 0.0 && options.max_angle_deg < 90.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid incline options");
  }
  SimState s = make_cloth(params, Vec3::Zero());
  InclineResult result;
  result.total_steps += settle(s, params, options.settle, options.observer).steps;

  const double threshold = options.slide_threshold_mm / kMmPerM;
  const auto increments = static_cast<int>(std::floor(options.max_angle_deg / options.increment_deg + 1e-9));
  for (int k = 1; k <= increments; ++k) {
    const double angle = deg_to_rad(k * options.increment_deg);
    // Tilting the plane about the y axis is equivalent to tilting gravity;
    // downhill is +x in the plane frame.
    s.scene.gravity_dir = Vec3(std::sin(angle), 0.0, -std::cos(angle));
    const double start_x = centroid(s).x();
    int calm = 0;
    long window = 0;
    while (true) {
      if (window >= options.settle.max_steps) {
        throw Error(ErrorCode::DidNotSettle,
                    fmt::format("no equilibrium or slide at {:.2f} deg", k * options.increment_deg));
      }
      step(s, params);
      ++window;
      if (options.observer) options.observer(s);
      if (centroid(s).x() - start_x > threshold) {
        result.slide_angle_deg = k * options.increment_deg;
        result.mu = std::tan(angle);
        result.total_steps += window;
        return result;
      }
      calm = max_free_speed(s) < options.settle.v_max ? calm + 1 : 0;
      if (calm >= options.settle.hold_steps) break;
    }
    result.total_steps += window;
  }
  throw Error(ErrorCode::NoSlide,
              fmt::format("cloth did not slide up to {:.2f} deg", options.max_angle_deg));
}

PullResult run_pull(const SimParams& params, double force_n, const RunOptions& options) {
  validate(params);
  if (!(force_n >= 0.0) || !std::isfinite(force_n)) {
    throw Error(ErrorCode::InvalidArgument, "pull force must be >= 0");
  }
  SimState s = make_cloth(params, Vec3::Zero());
  const int loaded = s.nx - 1;
  s.external_force.assign(s.size(), Vec3::Zero());
  for (int j = 0; j < s.ny; ++j) {
    pin(s, s.index(0, j));
    s.external_force[s.index(loaded, j)] = Vec3(force_n / s.ny, 0.0, 0.0);
  }

  PullResult result;
  result.lengths.li_mm = (mean_x_of_column(s, loaded) - mean_x_of_column(s, 0)) * kMmPerM;
  result.lengths.load_g = force_n / 9.81 * 1000.0;
  result.settle_steps = settle(s, params, options.settle, options.observer).steps;
  result.lengths.lf_mm = (mean_x_of_column(s, loaded) - mean_x_of_column(s, 0)) * kMmPerM;
  result.elasticity = elasticity(result.lengths);
  return result;
}

PrimitiveRun run_primitive(const PrimitiveSpec& spec, const SimParams& params,
                           const RunOptions& options, double grip_speed) {
  validate(params);
  validate(spec);
  SimState s = make_cloth(params, Vec3::Zero());
  const RasterFrame before_frame = frame_of(s);
  const BinaryMask before = rasterize_top_view(s, before_frame, triangles(s));

  GripSetup plan = plan_primitive(spec, s, params);
  for (int p : plan.fixed) pin(s, p);
  attach_grip(s, {plan.particle}, GripPath{plan.waypoints, grip_speed, 0.0});
  run_grip_motion(s, params, options);
  settle(s, params, options.settle, options.observer);

  PrimitiveRun run;
  run.area_before_mm2 = area_mm2(before);
  const RasterFrame frame = frame_of(s);
  const auto all = triangles(s);
  const BinaryMask after = rasterize_top_view(s, frame, all);
  run.area_after_mm2 = area_mm2(after);

  double fr = 0.0;
  if (spec.kind == PrimitiveKind::Fold) {
    // Halves split by the diagonal through the two corners not involved in
    // the fold; the grasped half is the top half after folding.
    const Vec3 grasp = s.rest_position[plan.particle];
    const Vec3 a = s.rest_position[s.index(0, 0)];
    const Vec3 b = s.rest_position[s.index(s.nx - 1, s.ny - 1)];
    auto side = [&](const Vec3& p) {
      return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    };
    const double grasp_side = side(grasp);
    std::vector<Triangle> top;
    std::vector<Triangle> bottom;
    for (const auto& tri : all) {
      const Vec3 c = (s.rest_position[tri[0]] + s.rest_position[tri[1]] + s.rest_position[tri[2]]) / 3.0;
      (side(c) * grasp_side > 0.0 ? top : bottom).push_back(tri);
    }
    const BinaryMask top_mask = rasterize_top_view(s, frame, top);
    const BinaryMask bottom_mask = rasterize_top_view(s, frame, bottom);
    BinaryMask uncovered(frame.width, frame.height, 1.0);
    for (int y = 0; y < frame.height; ++y) {
      for (int x = 0; x < frame.width; ++x) {
        if (bottom_mask.at(x, y) && !top_mask.at(x, y)) uncovered.set(x, y);
      }
    }
    run.uncovered_bottom_mm2 = area_mm2(uncovered);
    fr = fold_ratio(after, uncovered);
  } else {
    fr = final_ratio(before, after);
  }
  run.result = make_eval_result(spec.kind, {fr});
  run.final_state = std::move(s);
  return run;
}

}  // namespace clothbench::sim
