#include <algorithm>
#include <cmath>
#include <limits>

#include "clothbench/sim.hpp"

namespace clothbench::sim {
namespace {

constexpr double kMmPerM = 1000.0;

double edge(double ax, double ay, double bx, double by, double px, double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

}  // namespace

std::vector<Triangle> triangles(const SimState& state) {
  std::vector<Triangle> out;
  out.reserve(static_cast<std::size_t>(state.nx - 1) * (state.ny - 1) * 2);
  for (int j = 0; j + 1 < state.ny; ++j) {
    for (int i = 0; i + 1 < state.nx; ++i) {
      const int a = state.index(i, j);
      const int b = state.index(i + 1, j);
      const int c = state.index(i + 1, j + 1);
      const int d = state.index(i, j + 1);
      out.push_back({a, b, c});
      out.push_back({a, c, d});
    }
  }
  return out;
}

RasterFrame frame_of(const SimState& state) {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const auto& x : state.position) {
    min_x = std::min(min_x, x.x());
    min_y = std::min(min_y, x.y());
    max_x = std::max(max_x, x.x());
    max_y = std::max(max_y, x.y());
  }
  RasterFrame frame;
  frame.x0 = static_cast<int>(std::floor(min_x * kMmPerM)) - 1;
  frame.y0 = static_cast<int>(std::floor(min_y * kMmPerM)) - 1;
  frame.width = static_cast<int>(std::ceil(max_x * kMmPerM)) + 1 - frame.x0;
  frame.height = static_cast<int>(std::ceil(max_y * kMmPerM)) + 1 - frame.y0;
  return frame;
}

BinaryMask rasterize_top_view(const SimState& state, const RasterFrame& frame,
                              const std::vector<Triangle>& tris) {
  BinaryMask mask(frame.width, frame.height, 1.0);
  for (const auto& tri : tris) {
    // Vertices in pixel units relative to the frame origin.
    double vx[3];
    double vy[3];
    for (int k = 0; k < 3; ++k) {
      vx[k] = state.position[tri[k]].x() * kMmPerM - frame.x0;
      vy[k] = state.position[tri[k]].y() * kMmPerM - frame.y0;
    }
    double area = edge(vx[0], vy[0], vx[1], vy[1], vx[2], vy[2]);
    if (std::abs(area) < 1e-9) continue;
    const double sign = area > 0.0 ? 1.0 : -1.0;

    const int x_lo = std::max(0, static_cast<int>(std::floor(std::min({vx[0], vx[1], vx[2]}))));
    const int x_hi = std::min(frame.width - 1, static_cast<int>(std::ceil(std::max({vx[0], vx[1], vx[2]}))));
    const int y_lo = std::max(0, static_cast<int>(std::floor(std::min({vy[0], vy[1], vy[2]}))));
    const int y_hi = std::min(frame.height - 1, static_cast<int>(std::ceil(std::max({vy[0], vy[1], vy[2]}))));
    for (int py = y_lo; py <= y_hi; ++py) {
      const double cy = py + 0.5;
      for (int px = x_lo; px <= x_hi; ++px) {
        const double cx = px + 0.5;
        const double w0 = sign * edge(vx[1], vy[1], vx[2], vy[2], cx, cy);
        const double w1 = sign * edge(vx[2], vy[2], vx[0], vy[0], cx, cy);
        const double w2 = sign * edge(vx[0], vy[0], vx[1], vy[1], cx, cy);
        if (w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0) mask.set(px, py);
      }
    }
  }
  return mask;
}

BinaryMask top_view_mask(const SimState& state) {
  return rasterize_top_view(state, frame_of(state), triangles(state));
}

double project_area(const SimState& state) { return area_mm2(top_view_mask(state)); }

}  // namespace clothbench::sim
