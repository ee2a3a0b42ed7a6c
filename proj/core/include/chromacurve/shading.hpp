#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "chromacurve/raster.hpp"
#include "chromacurve/spectral.hpp"

namespace chromacurve {

enum class Variation { Shading, Reflectance, Ambiguous };

std::string_view to_string(Variation label);

// v1 cutoffs on the planarity measure. Shading when v1 >= shadingMinV1,
// reflectance when v1 < reflectanceMaxV1, ambiguous in between.
struct ShadingThresholds {
  double shadingMinV1 = 96.0;
  double reflectanceMaxV1 = 89.0;
};

struct VariationLabel {
  Variation label = Variation::Ambiguous;
  PlanarityMeasure pm;
  // RMS distance to the best line through the origin. Reported only; the
  // label depends on pm.v1 alone.
  double lineResidual = 0.0;
};

Variation label_from_planarity(const PlanarityMeasure& pm, const ShadingThresholds& thresholds = {});

// Classifies the color variation of a pixel set (typically a quantized
// patch palette). Throws DegenerateInput for fewer than 2 distinct points.
VariationLabel classify_variation(std::span<const RgbPoint> points, const ShadingThresholds& thresholds = {});

struct NormalField {
  int width = 0;
  int height = 0;
  std::vector<Vec3> normals;  // row-major, unit length
};

// Lambertian scene: one albedo per channel, a distant point light of flux
// density `flux` along `lightDirection`, and a surface normal per pixel.
struct LambertianScene {
  Vec3 albedo{1, 1, 1};  // each in (0, 1]
  double flux = 1.0;
  Vec3 lightDirection{0, 0, 1};
  NormalField normalField;
};

// Renders L = flux * max(0, N_S . N_L) per pixel and channel c = L * albedo_c * 255,
// clamped to [0, 255]. No rounding: channels stay real-valued.
// Throws ConfigError for non-unit normals or light, albedo outside (0, 1],
// or nonpositive flux.
RasterImage synthesize_lambertian(const LambertianScene& scene);

}  // namespace chromacurve
