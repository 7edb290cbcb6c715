#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "clothbench/manip_eval.hpp"
#include "clothbench/mask.hpp"
#include "clothbench/measurement.hpp"

/// Mass-spring cloth simulator used as a verification oracle for the
/// measurement pipeline. SI units internally (m, kg, s, N); scenario inputs
/// and outputs that mirror physical protocols are in mm.
namespace clothbench::sim {

using Vec3 = Eigen::Vector3d;

struct SimParams {
  int nx = 21;  // particles along x (cloth width)
  int ny = 21;  // particles along y (cloth height)
  double width_mm = 300.0;
  double height_mm = 300.0;
  double density_g_per_mm2 = 2e-4;  // 200 g/m^2
  double k_stretch = 10.0;          // N/m, structural and shear springs
  double k_bend = 1.0;              // N/m, second-neighbour springs
  double friction = 0.5;            // Coulomb coefficient against all surfaces
  double damping = 2.0;             // 1/s, velocity damping
  double dt = 1e-3;                 // s
  double gravity = 9.81;            // m/s^2

  bool operator==(const SimParams&) const = default;
};

/// Throws InvalidArgument when a parameter is outside its domain.
void validate(const SimParams& params);

struct SettleCriteria {
  double v_max = 1e-3;  // m/s
  int hold_steps = 200;
  long max_steps = 200'000;
};

enum class SpringKind { Structural, Shear, Bend };

struct Spring {
  int a = 0;
  int b = 0;
  double rest = 0.0;  // m
  double k = 0.0;     // N/m
  SpringKind kind = SpringKind::Structural;
};

/// Cylindrical plate (drape-test support) standing on the ground.
struct Plate {
  double diameter = 0.0;  // m
  double height = 0.0;    // m, top surface height
  double cx = 0.0;
  double cy = 0.0;
};

/// Polyline of displacements traversed at constant speed from start_time;
/// holds the last waypoint afterwards.
struct GripPath {
  std::vector<Vec3> waypoints;  // displacement from the grasp anchor, m
  double speed = 0.1;           // m/s
  double start_time = 0.0;      // s

  [[nodiscard]] double duration() const;
  [[nodiscard]] Vec3 displacement_at(double time) const;
};

struct Grip {
  std::vector<int> particles;
  std::vector<Vec3> anchors;  // particle positions when grasped
  GripPath path;
};

struct Scene {
  Vec3 gravity_dir{0.0, 0.0, -1.0};  // unit vector; tilting it tilts the plane
  bool ground = true;                // plane z = 0
  std::optional<Plate> plate;
};

struct SimState {
  int nx = 0;
  int ny = 0;
  std::vector<Vec3> position;
  std::vector<Vec3> velocity;
  std::vector<Vec3> rest_position;  // flat layout, used to split mesh halves
  std::vector<double> mass;
  std::vector<Spring> springs;
  std::vector<char> pinned;
  std::vector<char> gripped;
  std::vector<Vec3> external_force;  // N per particle; empty = none
  Scene scene;
  std::optional<Grip> grip;
  double time = 0.0;
  long steps = 0;

  [[nodiscard]] int index(int i, int j) const noexcept { return j * nx + i; }
  [[nodiscard]] std::size_t size() const noexcept { return position.size(); }
  [[nodiscard]] bool is_free(std::size_t p) const noexcept { return !pinned[p] && !gripped[p]; }
};

/// Flat cloth grid with its lower-left corner at `origin` (m), at rest, with
/// structural, shear and second-neighbour bending springs at rest length.
[[nodiscard]] SimState make_cloth(const SimParams& params, const Vec3& origin);

void pin(SimState& state, int particle);
void attach_grip(SimState& state, std::vector<int> particles, GripPath path);

/// One semi-implicit Euler step: spring, gravity, damping and external forces
/// update velocities; plane and cylinder contacts project velocities with
/// Coulomb-clamped tangential impulses; positions advance with the new
/// velocities. Pinned particles never move; gripped particles follow their
/// path. Throws NumericalBlowup on non-finite or |x| > 1e6 m coordinates.
void step(SimState& state, const SimParams& params);

using StepObserver = std::function<void(const SimState&)>;

struct SettleReport {
  long steps = 0;
  double max_speed = 0.0;
};

/// Steps until the fastest free particle stays below v_max for hold_steps
/// consecutive steps. Throws DidNotSettle at the step cap.
SettleReport settle(SimState& state, const SimParams& params, const SettleCriteria& criteria,
                    const StepObserver& observer = {});

[[nodiscard]] double max_free_speed(const SimState& state);

struct Energy {
  double kinetic = 0.0;
  double gravitational = 0.0;  // relative to the origin along gravity_dir
  double elastic = 0.0;
  [[nodiscard]] double total() const noexcept { return kinetic + gravitational + elastic; }
};

[[nodiscard]] Energy energy(const SimState& state, const SimParams& params);

// ---------------------------------------------------------------------------
// Top-view projection

using Triangle = std::array<int, 3>;

/// Two triangles per grid cell, split along the (i,j)-(i+1,j+1) diagonal.
[[nodiscard]] std::vector<Triangle> triangles(const SimState& state);

/// Integer-mm raster window in world coordinates.
struct RasterFrame {
  int x0 = 0;  // mm
  int y0 = 0;  // mm
  int width = 1;
  int height = 1;
};

[[nodiscard]] RasterFrame frame_of(const SimState& state);

/// Rasterizes the selected triangles' vertical projection at 1 mm/px; a pixel
/// is covered when its centre lies in a triangle. The mask carries scale 1.
[[nodiscard]] BinaryMask rasterize_top_view(const SimState& state, const RasterFrame& frame,
                                            const std::vector<Triangle>& tris);
[[nodiscard]] BinaryMask top_view_mask(const SimState& state);

/// Projected (top-view) cloth area in mm^2.
[[nodiscard]] double project_area(const SimState& state);

// ---------------------------------------------------------------------------
// Scenarios

struct RunOptions {
  SettleCriteria settle;
  StepObserver observer;
};

struct DrapeOptions : RunOptions {
  double plate_height_mm = 0.0;  // 0 = half cloth diagonal + 20 mm
  double drop_gap_mm = 1.0;
};

struct DrapeResult {
  double stiffness = 0.0;
  StiffnessInputs areas;
  long settle_steps = 0;
  SimState final_state;
};

/// Drops the cloth centred on a cylindrical plate, settles and evaluates the
/// drape ratio with A1 = flat area, A2 = plate area, A3 = projected area.
[[nodiscard]] DrapeResult run_drape(const SimParams& params, const PlateSpec& plate,
                                    const DrapeOptions& options = {});
/// Plate sized from the cloth's shortest edge with the default coverage ratio.
[[nodiscard]] PlateSpec default_plate(const SimParams& params);

struct InclineOptions : RunOptions {
  double increment_deg = 0.25;
  double slide_threshold_mm = 5.0;
  double max_angle_deg = 85.0;
};

struct InclineResult {
  double mu = 0.0;  // tan of the slide angle
  double slide_angle_deg = 0.0;
  long total_steps = 0;
};

/// Tilts the support plane in fixed increments, settling at each angle, until
/// the centroid slides downhill by more than the threshold within one window.
/// Throws NoSlide at max_angle_deg.
[[nodiscard]] InclineResult run_incline(const SimParams& params, const InclineOptions& options = {});

inline constexpr double kProtocolForceN = 0.5 * 9.81;

struct PullResult {
  double elasticity = 0.0;
  ElasticityInputs lengths;
  long settle_steps = 0;
};

/// Pins the x = 0 edge, loads the opposite edge with `force_n` in total,
/// settles, and applies the elongation ratio to the edge-to-edge length.
[[nodiscard]] PullResult run_pull(const SimParams& params, double force_n = kProtocolForceN,
                                  const RunOptions& options = {});

struct PrimitiveRun {
  EvalResult result;
  double area_before_mm2 = 0.0;
  double area_after_mm2 = 0.0;
  double uncovered_bottom_mm2 = 0.0;  // fold only
  SimState final_state;
};

/// Executes a primitive from the flat state, moving the grasped particle along
/// the primitive's trajectory at `grip_speed` (m/s), settles while holding,
/// and scores FR from top-view masks.
[[nodiscard]] PrimitiveRun run_primitive(const PrimitiveSpec& spec, const SimParams& params,
                                         const RunOptions& options = {}, double grip_speed = 0.1);

}  // namespace clothbench::sim
