#include "clothbench/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "clothbench/error.hpp"

namespace clothbench {
namespace {

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("raster dimensions must be positive, got {}x{}", width, height));
  }
}

// Offsets of a Euclidean disk structuring element.
std::vector<std::pair<int, int>> disk_offsets(int radius) {
  std::vector<std::pair<int, int>> out;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) out.emplace_back(dx, dy);
    }
  }
  return out;
}

// Labels 4-connected components; returns per-pixel labels (-1 = background)
// and the size of each label.
std::pair<std::vector<int>, std::vector<std::size_t>> label_components(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> labels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::pair<int, int>> stack;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto idx = static_cast<std::size_t>(y) * w + x;
      if (!mask.at(x, y) || labels[idx] >= 0) continue;
      const int label = static_cast<int>(sizes.size());
      std::size_t size = 0;
      labels[idx] = label;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++size;
        constexpr std::pair<int, int> kNeighbours[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& [dx, dy] : kNeighbours) {
          const int nx = cx + dx;
          const int ny = cy + dy;
          if (!mask.contains(nx, ny) || !mask.at(nx, ny)) continue;
          const auto nidx = static_cast<std::size_t>(ny) * w + nx;
          if (labels[nidx] >= 0) continue;
          labels[nidx] = label;
          stack.emplace_back(nx, ny);
        }
      }
      sizes.push_back(size);
    }
  }
  return {std::move(labels), std::move(sizes)};
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dimensions(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{}x{} image needs {} pixels, got {}", width, height,
                            static_cast<std::size_t>(width) * height, pixels_.size()));
  }
}

BinaryMask::BinaryMask(int width, int height, std::optional<double> scale_mm_per_px)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  set_scale(scale_mm_per_px);
}

void BinaryMask::set_scale(std::optional<double> scale_mm_per_px) {
  if (scale_mm_per_px && !(std::isfinite(*scale_mm_per_px) && *scale_mm_per_px > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("mask scale must be finite and > 0, got {}", *scale_mm_per_px));
  }
  scale_ = scale_mm_per_px;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius <= 0) return mask;
  BinaryMask out(mask.width(), mask.height(), mask.scale());
  const auto offsets = disk_offsets(radius);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      for (const auto& [dx, dy] : offsets) {
        if (out.contains(x + dx, y + dy)) out.set(x + dx, y + dy);
      }
    }
  }
  return out;
}

BinaryMask erode(const BinaryMask& mask, int radius) {
  if (radius <= 0) return mask;
  BinaryMask out(mask.width(), mask.height(), mask.scale());
  const auto offsets = disk_offsets(radius);
  // Pixels outside the raster count as set so the border is not eaten away.
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      const bool keep = std::all_of(offsets.begin(), offsets.end(), [&](const auto& o) {
        const int nx = x + o.first;
        const int ny = y + o.second;
        return !mask.contains(nx, ny) || mask.at(nx, ny);
      });
      if (keep) out.set(x, y);
    }
  }
  return out;
}

BinaryMask close(const BinaryMask& mask, int radius) { return erode(dilate(mask, radius), radius); }

std::vector<std::size_t> component_sizes(const BinaryMask& mask) {
  return label_components(mask).second;
}

BinaryMask largest_component(const BinaryMask& mask) {
  const auto [labels, sizes] = label_components(mask);
  BinaryMask out(mask.width(), mask.height(), mask.scale());
  if (sizes.empty()) return out;
  // Ties resolve to the component discovered first in row-major order.
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (labels[static_cast<std::size_t>(y) * mask.width() + x] == best) out.set(x, y);
    }
  }
  return out;
}

BinaryMask segment(const GrayImage& image, const SegmentationConfig& config) {
  if (config.threshold < 0 || config.threshold > 255) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("threshold {} outside [0, 255]", config.threshold));
  }
  if (config.closing_radius < 0) {
    throw Error(ErrorCode::InvalidArgument, "closing radius must be >= 0");
  }

  BinaryMask mask(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const int value = image.at(x, y);
      const bool cloth = config.polarity == Polarity::ClothDarker ? value < config.threshold
                                                                  : value > config.threshold;
      if (cloth) mask.set(x, y);
    }
  }
  mask = close(mask, config.closing_radius);
  if (config.keep == ComponentFilter::LargestComponent) mask = largest_component(mask);
  if (area_px(mask) == 0) {
    throw Error(ErrorCode::NoClothDetected, "segmentation produced an empty mask");
  }
  return mask;
}

std::size_t area_px(const BinaryMask& mask) noexcept {
  std::size_t count = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) count += mask.at(x, y) ? 1 : 0;
  }
  return count;
}

double area_mm2(const BinaryMask& mask) {
  if (!mask.scale()) throw Error(ErrorCode::MissingScale, "mask has no mm-per-pixel scale");
  const double scale = *mask.scale();
  return static_cast<double>(area_px(mask)) * scale * scale;
}

double scale_from_plate(const BinaryMask& plate_mask, double plate_diameter_mm) {
  if (!(std::isfinite(plate_diameter_mm) && plate_diameter_mm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("plate diameter must be > 0, got {}", plate_diameter_mm));
  }
  const auto pixels = area_px(plate_mask);
  if (pixels == 0) throw Error(ErrorCode::NoClothDetected, "plate mask is empty");
  const double diameter_px = 2.0 * std::sqrt(static_cast<double>(pixels) / std::numbers::pi);
  return plate_diameter_mm / diameter_px;
}

}  // namespace clothbench
