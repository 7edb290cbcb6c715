#include <png.h>

#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <fmt/format.h>

#include "clothbench/error.hpp"
#include "clothbench/mask.hpp"

namespace clothbench {
namespace {

// Decoded 8-bit raster with 1 (gray) or 3 (rgb) channels.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Raster decode_png(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::IoError,
                fmt::format("cannot read PNG '{}': {}", path.string(), image.message));
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  // Alpha is kept and dropped afterwards so libpng never composites.
  image.format = color ? PNG_FORMAT_RGBA : PNG_FORMAT_GA;
  const int in_channels = color ? 4 : 2;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::IoError, fmt::format("cannot decode PNG '{}': {}", path.string(), message));
  }

  Raster out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.channels = color ? 3 : 1;
  const std::size_t pixels = static_cast<std::size_t>(out.width) * out.height;
  out.data.resize(pixels * out.channels);
  for (std::size_t i = 0; i < pixels; ++i) {
    for (int c = 0; c < out.channels; ++c) {
      out.data[i * out.channels + c] = buffer[i * in_channels + c];
    }
  }
  return out;
}

class NetpbmReader {
 public:
  NetpbmReader(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  Raster read() {
    const char kind = static_cast<char>(bytes_.at(1));
    pos_ = 2;
    Raster out;
    out.channels = (kind == '3' || kind == '6') ? 3 : 1;
    out.width = static_cast<int>(next_number());
    out.height = static_cast<int>(next_number());
    const long maxval = next_number();
    if (out.width < 1 || out.height < 1) truncated();
    if (maxval < 1 || maxval > 255) {
      throw Error(ErrorCode::UnsupportedFormat,
                  fmt::format("'{}': only 8-bit Netpbm is supported", path_.string()));
    }
    const std::size_t count = static_cast<std::size_t>(out.width) * out.height * out.channels;
    out.data.resize(count);
    const bool binary = kind == '5' || kind == '6';
    if (binary) {
      ++pos_;  // single whitespace after maxval
      if (bytes_.size() < pos_ + count) truncated();
      for (std::size_t i = 0; i < count; ++i) out.data[i] = rescale(bytes_[pos_ + i], maxval);
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        const long value = next_number();
        if (value > maxval) truncated();
        out.data[i] = rescale(static_cast<std::uint8_t>(value), maxval);
      }
    }
    return out;
  }

 private:
  static std::uint8_t rescale(std::uint8_t value, long maxval) {
    if (maxval == 255) return value;
    return static_cast<std::uint8_t>((static_cast<long>(value) * 255 + maxval / 2) / maxval);
  }

  [[noreturn]] void truncated() const {
    throw Error(ErrorCode::IoError, fmt::format("'{}' is truncated or malformed", path_.string()));
  }

  long next_number() {
    while (pos_ < bytes_.size()) {
      const char c = static_cast<char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) truncated();
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) truncated();
      ++pos_;
    }
    return value;
  }

  const std::vector<std::uint8_t>& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

Raster decode(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= kPngSignature.size() &&
      std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6')) {
    return NetpbmReader(bytes, path).read();
  }
  if (bytes.empty()) throw Error(ErrorCode::IoError, fmt::format("'{}' is empty", path.string()));
  throw Error(ErrorCode::UnsupportedFormat,
              fmt::format("'{}' is not a PNG or 8-bit Netpbm raster", path.string()));
}

void write_png(int width, int height, std::uint32_t format, const std::uint8_t* data,
               const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    throw Error(ErrorCode::IoError,
                fmt::format("cannot write PNG '{}': {}", path.string(), image.message));
  }
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  Raster raster = decode(path);
  if (raster.channels == 1) return GrayImage(raster.width, raster.height, std::move(raster.data));
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(raster.width) * raster.height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = luminance(raster.data[3 * i], raster.data[3 * i + 1], raster.data[3 * i + 2]);
  }
  return GrayImage(raster.width, raster.height, std::move(gray));
}

BinaryMask load_mask(const std::filesystem::path& path) {
  const Raster raster = decode(path);
  BinaryMask mask(raster.width, raster.height);
  for (int y = 0; y < raster.height; ++y) {
    for (int x = 0; x < raster.width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * raster.width + x) * raster.channels;
      bool any = false;
      for (int c = 0; c < raster.channels; ++c) any = any || raster.data[base + c] != 0;
      if (any) mask.set(x, y);
    }
  }
  return mask;
}

void save_image(const GrayImage& image, const std::filesystem::path& path) {
  if (path.extension() == ".pgm") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels().data()),
              static_cast<std::streamsize>(image.pixels().size()));
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
    return;
  }
  write_png(image.width(), image.height(), PNG_FORMAT_GRAY, image.pixels().data(), path);
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  GrayImage image(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) image.set(x, y, mask.at(x, y) ? 255 : 0);
  }
  save_image(image, path);
}

void save_rgb_png(int width, int height, const std::vector<std::uint8_t>& rgb,
                  const std::filesystem::path& path) {
  if (width < 1 || height < 1 ||
      rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
    throw Error(ErrorCode::InvalidArgument, "rgb buffer does not match dimensions");
  }
  write_png(width, height, PNG_FORMAT_RGB, rgb.data(), path);
}

}  // namespace clothbench
