#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chromacurve/raster.hpp"

namespace chromacurve {

struct DecodedImage {
  RasterImage image;
  std::vector<std::string> warnings;  // e.g. discarded alpha
};

// Decodes 8-bit RGB from PNG or JPEG bytes (detected by signature).
// Grayscale is expanded to RGB; alpha is dropped with a warning.
// Throws DecodeError.
DecodedImage decode_image(std::span<const std::uint8_t> bytes);
DecodedImage decode_image_file(const std::filesystem::path& path);

// 8-bit RGB PNG; channels are rounded and clamped to [0, 255].
std::vector<std::uint8_t> encode_png(const RasterImage& image);
// 8-bit grayscale PNG, 255 where the mask is set.
std::vector<std::uint8_t> encode_png(const Mask& mask);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Writes through a temporary file in the target directory and renames it
// into place, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace chromacurve
