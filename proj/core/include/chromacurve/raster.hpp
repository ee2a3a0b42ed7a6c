#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chromacurve/vec3.hpp"

namespace chromacurve {

// Row-major RGB raster with real-valued channels. Decoded images carry
// integral values in [0, 255]; rendered images may carry fractional ones.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, RgbPoint fill = {});
  RasterImage(int width, int height, std::vector<RgbPoint> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  const RgbPoint& at(int x, int y) const { return pixels_[index(x, y)]; }
  RgbPoint& at(int x, int y) { return pixels_[index(x, y)]; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  std::span<const RgbPoint> pixels() const { return pixels_; }
  std::span<RgbPoint> pixels() { return pixels_; }

  // Copy with every channel rounded to the nearest integer and clamped to
  // [0, 255], i.e. what an 8-bit encoder would store.
  RasterImage quantized_to_8bit() const;

  // Sub-rectangle copy; the rectangle must lie inside the image.
  RasterImage crop(int x0, int y0, int w, int h) const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<RgbPoint> pixels_;
};

// Per-pixel boolean grid aligned with a RasterImage.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v) { bits_[index(x, y)] = v ? 1 : 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  std::size_t count() const;
  bool same_shape(const RasterImage& image) const {
    return width_ == image.width() && height_ == image.height();
  }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// 64-bit FNV-1a over the dimensions and 8-bit-rounded pixels, as 16 hex
// digits. Identifies the source image in model provenance.
std::string content_hash(const RasterImage& image);

}  // namespace chromacurve
