#include "chromacurve/shading.hpp"

#include <algorithm>
#include <cmath>

#include "chromacurve/error.hpp"

namespace chromacurve {

std::string_view to_string(Variation label) {
  switch (label) {
    case Variation::Shading: return "shading";
    case Variation::Reflectance: return "reflectance";
    case Variation::Ambiguous: return "ambiguous";
  }
  return "unknown";
}

Variation label_from_planarity(const PlanarityMeasure& pm, const ShadingThresholds& t) {
  if (pm.v1 >= t.shadingMinV1) return Variation::Shading;
  if (pm.v1 < t.reflectanceMaxV1) return Variation::Reflectance;
  return Variation::Ambiguous;
}

VariationLabel classify_variation(std::span<const RgbPoint> points, const ShadingThresholds& thresholds) {
  if (thresholds.reflectanceMaxV1 > thresholds.shadingMinV1)
    throw ConfigError("reflectance threshold must not exceed the shading threshold");
  VariationLabel out;
  out.pm = planarity_measure(points);
  out.label = label_from_planarity(out.pm, thresholds);
  // All-black patches have no origin line; the label is still defined.
  const bool anyLight = std::any_of(points.begin(), points.end(), [](const RgbPoint& p) { return squared_norm(p) > 0; });
  out.lineResidual = anyLight ? fit_line_through_origin(points).rmsResidual : 0.0;
  return out;
}

RasterImage synthesize_lambertian(const LambertianScene& scene) {
  const NormalField& nf = scene.normalField;
  if (nf.width < 1 || nf.height < 1 ||
      nf.normals.size() != static_cast<std::size_t>(nf.width) * static_cast<std::size_t>(nf.height))
    throw ConfigError("normal field does not match its dimensions");
  for (int c = 0; c < 3; ++c)
    if (!(scene.albedo[c] > 0.0 && scene.albedo[c] <= 1.0)) throw ConfigError("albedo must lie in (0, 1]");
  if (!(scene.flux > 0.0)) throw ConfigError("flux must be positive");
  if (std::abs(norm(scene.lightDirection) - 1.0) > 1e-9) throw ConfigError("light direction must be a unit vector");

  std::vector<RgbPoint> px(nf.normals.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const Vec3& n = nf.normals[i];
    if (std::abs(norm(n) - 1.0) > 1e-9) throw ConfigError("surface normals must be unit vectors");
    const double shading = scene.flux * std::max(0.0, dot(n, scene.lightDirection));
    for (int c = 0; c < 3; ++c) px[i][c] = std::clamp(shading * scene.albedo[c] * 255.0, 0.0, 255.0);
  }
  return RasterImage(nf.width, nf.height, std::move(px));
}

}  // namespace chromacurve
