#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chromacurve/raster.hpp"

namespace chromacurve {

enum class QuantizerMethod { MinimumVariance, MedianCut, Octree, KMeans };

inline constexpr QuantizerMethod kAllQuantizers[] = {QuantizerMethod::MinimumVariance, QuantizerMethod::MedianCut,
                                                     QuantizerMethod::Octree, QuantizerMethod::KMeans};

// "minimum-variance", "median-cut", "octree", "k-means".
std::string_view to_string(QuantizerMethod method);
// Throws UnsupportedMethod for any other identifier.
QuantizerMethod parse_quantizer_method(std::string_view name);

struct QuantizeOptions {
  int paletteSize = 256;
  std::uint64_t seed = 0;
  // k-means only; it starts from the median-cut palette.
  int kmeansMaxIterations = 50;
  double kmeansEpsilon = 0.01;
};

// Quantized color set of an image plus the per-pixel assignment.
// Colors are real-valued centroids; rounding happens only on export.
struct Palette {
  std::vector<RgbPoint> colors;
  std::vector<std::uint32_t> assignment;  // one entry per pixel, row-major
  std::vector<std::uint64_t> counts;      // pixels per color
  QuantizerMethod method = QuantizerMethod::MinimumVariance;
  int width = 0;
  int height = 0;

  std::vector<double> weights() const { return {counts.begin(), counts.end()}; }
  RasterImage reconstruct() const;
};

// Reduces `image` to at most options.paletteSize colors. Images that already
// have that few distinct colors keep them exactly. Whatever the method, a
// final pass assigns every pixel to its nearest palette color (lowest index on
// ties) and drops colors that end up unused.
Palette quantize(const RasterImage& image, QuantizerMethod method, const QuantizeOptions& options = {});

struct ErrorHistogram {
  double binWidth = 1.0;
  std::vector<double> bins;  // fraction of pixels per [k*binWidth, (k+1)*binWidth)
  double meanError = 0.0;
  double maxError = 0.0;

  // Fraction of pixels whose error is strictly below `limit`, at bin
  // resolution (exact when limit is a multiple of binWidth).
  double fraction_below(double limit) const;
};

// Euclidean reconstruction error of each pixel against its palette color.
// Throws MismatchedDimensions if the palette was built for another size.
ErrorHistogram error_histogram(const RasterImage& image, const Palette& palette, double binWidth = 1.0);

// Structured text export: {"method", "paletteSize", "colors": [[r,g,b],...], "counts": [...]}.
std::string palette_to_json(const Palette& palette);
// "bin_start,fraction" rows.
std::string histogram_to_csv(const ErrorHistogram& histogram);

}  // namespace chromacurve
