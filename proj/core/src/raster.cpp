#include "chromacurve/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "chromacurve/error.hpp"

namespace chromacurve {

double angle_degrees(const Vec3& a, const Vec3& b) {
  const double c = dot(a, b) / (norm(a) * norm(b));
  // atan2 keeps precision for nearly parallel vectors, where acos does not.
  const double s = norm(cross(a, b)) / (norm(a) * norm(b));
  return std::atan2(s, c) * 180.0 / 3.14159265358979323846;
}

RasterImage::RasterImage(int width, int height, RgbPoint fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw MismatchedDimensions("raster dimensions must be positive");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

RasterImage::RasterImage(int width, int height, std::vector<RgbPoint> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) throw MismatchedDimensions("raster dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw MismatchedDimensions("pixel count does not match width*height");
}

RasterImage RasterImage::quantized_to_8bit() const {
  RasterImage out = *this;
  auto q = [](double c) { return std::clamp(std::round(c), 0.0, 255.0); };
  for (auto& p : out.pixels_) p = {q(p.r), q(p.g), q(p.b)};
  return out;
}

RasterImage RasterImage::crop(int x0, int y0, int w, int h) const {
  if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > width_ || y0 + h > height_)
    throw MismatchedDimensions("crop rectangle outside image");
  RasterImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = at(x0 + x, y0 + y);
  return out;
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw MismatchedDimensions("mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string content_hash(const RasterImage& image) {
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (int dim : {image.width(), image.height()})
    for (int k = 0; k < 4; ++k) feed(static_cast<std::uint8_t>((static_cast<std::uint32_t>(dim) >> (8 * k)) & 0xff));
  for (const auto& p : image.pixels())
    for (int c = 0; c < 3; ++c) feed(static_cast<std::uint8_t>(std::clamp(std::round(p[c]), 0.0, 255.0)));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace chromacurve
