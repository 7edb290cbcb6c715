#pragma once

// Reference computations written independently of the library, used as test
// oracles.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "clothbench/mask.hpp"
#include "clothbench/sim.hpp"

namespace oracle {

inline std::string data_path(const std::string& name) { return std::string(CLOTHBENCH_TEST_DATA) + "/" + name; }

inline double disk_area(double r) { return std::numbers::pi * r * r; }

// Pixels whose centre lies within radius r of (cx, cy) take `fg`.
inline void paint_disk(clothbench::GrayImage& img, double cx, double cy, double r, std::uint8_t fg) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= r * r) img.set(x, y, fg);
    }
  }
}

inline clothbench::GrayImage disk_image(int w, int h, double cx, double cy, double r, std::uint8_t fg = 0,
                                        std::uint8_t bg = 255) {
  clothbench::GrayImage img(w, h, bg);
  paint_disk(img, cx, cy, r, fg);
  return img;
}

inline clothbench::BinaryMask disk_mask(int w, int h, double cx, double cy, double r,
                                        std::optional<double> scale = std::nullopt) {
  clothbench::BinaryMask m(w, h, scale);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= r * r) m.set(x, y);
    }
  }
  return m;
}

inline std::size_t count_set(const clothbench::BinaryMask& m) {
  std::size_t n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) n += m.at(x, y) ? 1 : 0;
  return n;
}

// Sizes of 4-connected components, in discovery order (row-major scan).
inline std::vector<std::size_t> flood_fill_sizes(const clothbench::BinaryMask& m) {
  std::vector<char> seen(static_cast<std::size_t>(m.width()) * m.height(), 0);
  std::vector<std::size_t> sizes;
  for (int y0 = 0; y0 < m.height(); ++y0) {
    for (int x0 = 0; x0 < m.width(); ++x0) {
      if (!m.at(x0, y0) || seen[static_cast<std::size_t>(y0) * m.width() + x0]) continue;
      std::size_t size = 0;
      std::vector<std::pair<int, int>> stack{{x0, y0}};
      seen[static_cast<std::size_t>(y0) * m.width() + x0] = 1;
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        ++size;
        const int nbr[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
        for (const auto& n : nbr) {
          if (!m.contains(n[0], n[1]) || !m.at(n[0], n[1])) continue;
          auto& s = seen[static_cast<std::size_t>(n[1]) * m.width() + n[0]];
          if (!s) {
            s = 1;
            stack.emplace_back(n[0], n[1]);
          }
        }
      }
      sizes.push_back(size);
    }
  }
  return sizes;
}

// Small-strain elongation ratio of the pinned-edge pull test. The sheet is
// treated as uniformly strained: stretch along the load (ex) with free lateral
// contraction (ey). Axial, lateral, diagonal and second-neighbour springs each
// contribute k * (projected rest component)^2 terms to the quadratic energy;
// minimising over ey gives the effective axial stiffness.
inline double pull_elasticity(const clothbench::sim::SimParams& p, double force_n) {
  const int nx = p.nx;
  const int ny = p.ny;
  const double length = p.width_mm / 1000.0;
  const double a = length / (nx - 1);
  const double b = p.height_mm / 1000.0 / (ny - 1);
  const double d2 = a * a + b * b;
  const double cells = static_cast<double>(nx - 1) * (ny - 1);
  const double ks = p.k_stretch;
  const double kb = p.k_bend;
  const double xx = (nx - 1.0) * ny * ks * a * a + 2.0 * cells * ks * std::pow(a, 4) / d2 +
                    (nx - 2.0) * ny * kb * 4.0 * a * a;
  const double yy = nx * (ny - 1.0) * ks * b * b + 2.0 * cells * ks * std::pow(b, 4) / d2 +
                    nx * (ny - 2.0) * kb * 4.0 * b * b;
  const double xy = 2.0 * cells * ks * a * a * b * b / d2;
  const double k_eff = (xx - xy * xy / yy) / (length * length);
  return force_n / k_eff / length;
}

}  // namespace oracle
