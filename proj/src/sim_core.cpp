#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "clothbench/error.hpp"
#include "clothbench/sim.hpp"

namespace clothbench::sim {
namespace {

constexpr double kBlowupLimit = 1e6;  // m

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Removes up to mu * normal_impulse of tangential speed (impulse form of
// |F_t| <= mu |F_n|).
Vec3 coulomb_clamp(const Vec3& tangential, double normal_impulse, double mu) {
  const double speed = tangential.norm();
  const double budget = mu * normal_impulse;
  if (speed <= budget) return Vec3::Zero();
  return tangential * (1.0 - budget / speed);
}

// Horizontal plane z = level, approached from above.
void resolve_plane(const Vec3& x, Vec3& v, double dt, double mu, double level) {
  const double gap = x.z() - level;
  if (gap + v.z() * dt >= 0.0) return;
  const double vn = -gap / dt;
  const double impulse = vn - v.z();
  const Vec3 vt = coulomb_clamp(Vec3(v.x(), v.y(), 0.0), impulse, mu);
  v = Vec3(vt.x(), vt.y(), vn);
}

void resolve_plate(const Vec3& x, Vec3& v, double dt, double mu, const Plate& plate) {
  const double radius = plate.diameter / 2.0;
  const Vec3 predicted = x + v * dt;
  const double r_pred = std::hypot(predicted.x() - plate.cx, predicted.y() - plate.cy);
  if (predicted.z() >= plate.height || r_pred >= radius) return;

  if (x.z() >= plate.height) {
    resolve_plane(x, v, dt, mu, plate.height);
    return;
  }
  // Side wall: push radially back onto the cylinder surface.
  const double dx = x.x() - plate.cx;
  const double dy = x.y() - plate.cy;
  const double r = std::hypot(dx, dy);
  const Vec3 normal = r > 1e-12 ? Vec3(dx / r, dy / r, 0.0) : Vec3(1.0, 0.0, 0.0);
  const double vn_old = v.dot(normal);
  const double vn_new = (radius - r) / dt;
  if (vn_new <= vn_old) return;
  const Vec3 vt = coulomb_clamp(v - vn_old * normal, vn_new - vn_old, mu);
  v = vt + vn_new * normal;
}

void add_spring(SimState& s, int a, int b, double k, SpringKind kind) {
  const double rest = (s.position[b] - s.position[a]).norm();
  s.springs.push_back(Spring{a, b, rest, k, kind});
}

}  // namespace

void validate(const SimParams& p) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (p.nx < 2 || p.ny < 2) fail(fmt::format("grid must be at least 2x2, got {}x{}", p.nx, p.ny));
  if (!finite_positive(p.width_mm) || !finite_positive(p.height_mm)) fail("cloth size must be > 0");
  if (!finite_positive(p.density_g_per_mm2)) fail("mass density must be > 0");
  if (!(p.k_stretch >= 0.0) || !(p.k_bend >= 0.0)) fail("spring stiffnesses must be >= 0");
  if (!std::isfinite(p.k_stretch) || !std::isfinite(p.k_bend)) fail("spring stiffnesses must be finite");
  if (!(p.friction >= 0.0) || !std::isfinite(p.friction)) fail("friction must be >= 0");
  if (!(p.damping >= 0.0) || !std::isfinite(p.damping)) fail("damping must be >= 0");
  if (!finite_positive(p.dt)) fail("dt must be > 0");
  if (!(p.gravity >= 0.0) || !std::isfinite(p.gravity)) fail("gravity must be >= 0");
}

double GripPath::duration() const {
  double length = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    length += (waypoints[i] - waypoints[i - 1]).norm();
  }
  return length / speed;
}

Vec3 GripPath::displacement_at(double time) const {
  if (waypoints.empty()) return Vec3::Zero();
  double remaining = std::max(0.0, time - start_time) * speed;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Vec3 segment = waypoints[i] - waypoints[i - 1];
    const double length = segment.norm();
    if (remaining < length) return waypoints[i - 1] + segment * (remaining / length);
    remaining -= length;
  }
  return waypoints.back();
}

SimState make_cloth(const SimParams& params, const Vec3& origin) {
  validate(params);
  SimState s;
  s.nx = params.nx;
  s.ny = params.ny;
  const std::size_t n = static_cast<std::size_t>(params.nx) * params.ny;
  const double width = params.width_mm / 1000.0;
  const double height = params.height_mm / 1000.0;
  const double total_mass_kg = params.density_g_per_mm2 * params.width_mm * params.height_mm / 1000.0;

  s.position.reserve(n);
  for (int j = 0; j < params.ny; ++j) {
    for (int i = 0; i < params.nx; ++i) {
      s.position.push_back(origin + Vec3(width * i / (params.nx - 1),
                                         height * j / (params.ny - 1), 0.0));
    }
  }
  s.rest_position = s.position;
  s.velocity.assign(n, Vec3::Zero());
  s.mass.assign(n, total_mass_kg / static_cast<double>(n));
  s.pinned.assign(n, 0);
  s.gripped.assign(n, 0);

  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const int p = s.index(i, j);
      if (i + 1 < s.nx) add_spring(s, p, s.index(i + 1, j), params.k_stretch, SpringKind::Structural);
      if (j + 1 < s.ny) add_spring(s, p, s.index(i, j + 1), params.k_stretch, SpringKind::Structural);
      if (i + 1 < s.nx && j + 1 < s.ny) {
        add_spring(s, p, s.index(i + 1, j + 1), params.k_stretch, SpringKind::Shear);
        add_spring(s, s.index(i + 1, j), s.index(i, j + 1), params.k_stretch, SpringKind::Shear);
      }
      if (params.k_bend > 0.0) {
        if (i + 2 < s.nx) add_spring(s, p, s.index(i + 2, j), params.k_bend, SpringKind::Bend);
        if (j + 2 < s.ny) add_spring(s, p, s.index(i, j + 2), params.k_bend, SpringKind::Bend);
      }
    }
  }
  return s;
}

void pin(SimState& state, int particle) {
  state.pinned.at(particle) = 1;
  state.velocity[particle] = Vec3::Zero();
}

void attach_grip(SimState& state, std::vector<int> particles, GripPath path) {
  if (!(path.speed > 0.0)) throw Error(ErrorCode::InvalidArgument, "grip speed must be > 0");
  std::fill(state.gripped.begin(), state.gripped.end(), 0);
  Grip grip;
  grip.path = std::move(path);
  for (int p : particles) {
    state.gripped.at(p) = 1;
    grip.anchors.push_back(state.position[p]);
  }
  grip.particles = std::move(particles);
  state.grip = std::move(grip);
}

void step(SimState& s, const SimParams& params) {
  const double dt = params.dt;
  const std::size_t n = s.size();
  const Vec3 g = params.gravity * s.scene.gravity_dir;

  std::vector<Vec3> force(n);
  for (std::size_t p = 0; p < n; ++p) {
    force[p] = s.mass[p] * (g - params.damping * s.velocity[p]);
  }
  if (!s.external_force.empty()) {
    for (std::size_t p = 0; p < n; ++p) force[p] += s.external_force[p];
  }
  for (const auto& spring : s.springs) {
    const Vec3 d = s.position[spring.b] - s.position[spring.a];
    const double length = d.norm();
    if (length < 1e-12) continue;
    const Vec3 f = (spring.k * (length - spring.rest) / length) * d;
    force[spring.a] += f;
    force[spring.b] -= f;
  }

  for (std::size_t p = 0; p < n; ++p) {
    if (!s.is_free(p)) continue;
    Vec3& v = s.velocity[p];
    v += (dt / s.mass[p]) * force[p];
    if (s.scene.plate) resolve_plate(s.position[p], v, dt, params.friction, *s.scene.plate);
    if (s.scene.ground) resolve_plane(s.position[p], v, dt, params.friction, 0.0);
    s.position[p] += dt * v;
  }

  const double t_new = s.time + dt;
  if (s.grip) {
    const Vec3 offset = s.grip->path.displacement_at(t_new);
    for (std::size_t k = 0; k < s.grip->particles.size(); ++k) {
      const int p = s.grip->particles[k];
      const Vec3 target = s.grip->anchors[k] + offset;
      s.velocity[p] = (target - s.position[p]) / dt;
      s.position[p] = target;
    }
  }
  s.time = t_new;
  ++s.steps;

  for (std::size_t p = 0; p < n; ++p) {
    const Vec3& x = s.position[p];
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kBlowupLimit) {
      throw Error(ErrorCode::NumericalBlowup,
                  fmt::format("particle {} left the valid domain at step {} (t = {:.4f} s)", p,
                              s.steps, s.time));
    }
  }
}

double max_free_speed(const SimState& state) {
  double best = 0.0;
  for (std::size_t p = 0; p < state.size(); ++p) {
    if (state.is_free(p)) best = std::max(best, state.velocity[p].norm());
  }
  return best;
}

SettleReport settle(SimState& state, const SimParams& params, const SettleCriteria& criteria,
                    const StepObserver& observer) {
  if (!(criteria.v_max > 0.0) || criteria.hold_steps <= 0 || criteria.max_steps <= 0) {
    throw Error(ErrorCode::InvalidArgument, "settle criteria must be positive");
  }
  SettleReport report;
  int calm = 0;
  while (true) {
    if (report.steps >= criteria.max_steps) {
      throw Error(ErrorCode::DidNotSettle,
                  fmt::format("still moving at {:.3g} m/s after {} steps", report.max_speed,
                              report.steps));
    }
    step(state, params);
    ++report.steps;
    if (observer) observer(state);
    report.max_speed = max_free_speed(state);
    calm = report.max_speed < criteria.v_max ? calm + 1 : 0;
    if (calm >= criteria.hold_steps) return report;
  }
}

Energy energy(const SimState& state, const SimParams& params) {
  Energy e;
  const Vec3 g = params.gravity * state.scene.gravity_dir;
  for (std::size_t p = 0; p < state.size(); ++p) {
    e.kinetic += 0.5 * state.mass[p] * state.velocity[p].squaredNorm();
    e.gravitational -= state.mass[p] * g.dot(state.position[p]);
  }
  for (const auto& spring : state.springs) {
    const double stretch = (state.position[spring.b] - state.position[spring.a]).norm() - spring.rest;
    e.elastic += 0.5 * spring.k * stretch * stretch;
  }
  return e;
}

}  // namespace clothbench::sim
