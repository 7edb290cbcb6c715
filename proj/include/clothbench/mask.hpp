#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace clothbench {

/// 8-bit grayscale raster, row-major.
class GrayImage {
 public:
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  void set(int x, int y, std::uint8_t value) { pixels_[index(x, y)] = value; }
  [[nodiscard]] const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

  bool operator==(const GrayImage&) const = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Row-major boolean pixel grid with an optional physical scale (mm per px).
class BinaryMask {
 public:
  BinaryMask(int width, int height, std::optional<double> scale_mm_per_px = std::nullopt);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }
  [[nodiscard]] bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  [[nodiscard]] const std::optional<double>& scale() const noexcept { return scale_; }
  /// Throws InvalidArgument unless the scale is finite and positive.
  void set_scale(std::optional<double> scale_mm_per_px);

  bool operator==(const BinaryMask&) const = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
  std::optional<double> scale_;
};

enum class Polarity { ClothDarker, ClothBrighter };
enum class ComponentFilter { LargestComponent, All };

struct SegmentationConfig {
  int threshold = 128;
  Polarity polarity = Polarity::ClothDarker;
  int closing_radius = 0;
  ComponentFilter keep = ComponentFilter::LargestComponent;
};

/// Thresholds, closes with a disk of `closing_radius` px, then optionally keeps
/// the largest 4-connected component. Throws NoClothDetected on an empty result.
[[nodiscard]] BinaryMask segment(const GrayImage& image, const SegmentationConfig& config);

[[nodiscard]] std::size_t area_px(const BinaryMask& mask) noexcept;

/// area_px * scale^2. Throws MissingScale when the mask is uncalibrated.
[[nodiscard]] double area_mm2(const BinaryMask& mask);

/// mm-per-px from a plate mask, using the equivalent-circle diameter
/// 2*sqrt(area_px/pi).
[[nodiscard]] double scale_from_plate(const BinaryMask& plate_mask, double plate_diameter_mm);

// Morphology and component helpers, exposed for reuse and testing.
[[nodiscard]] BinaryMask dilate(const BinaryMask& mask, int radius);
[[nodiscard]] BinaryMask erode(const BinaryMask& mask, int radius);
[[nodiscard]] BinaryMask close(const BinaryMask& mask, int radius);
[[nodiscard]] BinaryMask largest_component(const BinaryMask& mask);
/// Sizes of all 4-connected components in row-major discovery order.
[[nodiscard]] std::vector<std::size_t> component_sizes(const BinaryMask& mask);

/// Fixed-point Rec.601 luma: (299 R + 587 G + 114 B + 500) / 1000.
[[nodiscard]] constexpr std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

// Raster I/O. Reads PNG (gray, gray+alpha, RGB, RGBA; 8-bit) and binary or
// ASCII Netpbm (P2/P3/P5/P6). Throws IoError or UnsupportedFormat.
[[nodiscard]] GrayImage load_image(const std::filesystem::path& path);
/// Any nonzero channel sets the bit. The returned mask carries no scale.
[[nodiscard]] BinaryMask load_mask(const std::filesystem::path& path);

/// Writes 8-bit grayscale PNG, or PGM when the extension is .pgm.
void save_image(const GrayImage& image, const std::filesystem::path& path);
/// Set bits become 255.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
/// Writes an 8-bit RGB PNG from interleaved rgb bytes (used for fixtures).
void save_rgb_png(int width, int height, const std::vector<std::uint8_t>& rgb,
                  const std::filesystem::path& path);

}  // namespace clothbench
