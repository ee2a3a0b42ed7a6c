#pragma once

#include <array>
#include <cstdint>

#include "chromacurve/raster.hpp"
#include "chromacurve/shading.hpp"
#include "chromacurve/spectral.hpp"

namespace chromacurve::synthetic {

// Smooth scalar field on [0, 1]: a sum of random low-frequency sinusoids,
// rank-equalised so values are spread uniformly over the unit interval.
std::vector<double> smooth_field(int width, int height, std::uint64_t seed);

// Unit normals of a random smooth height field (tilts up to roughly 60 deg).
NormalField smooth_normal_field(int width, int height, std::uint64_t seed);

// Random albedo in [0.15, 1]^3, flux in [0.7, 1], light tilted towards the
// viewer, over a smooth normal field. Rendering never clamps from above.
LambertianScene random_lambertian_scene(int width, int height, std::uint64_t seed);

// Single-process material: colors along a planar cubic
// v = a0 + a1 u + a2 u^2 + a3 u^3 over [uMin, uMax] in `frame`.
struct CubicMaterial {
  PlaneFrame frame;
  std::array<double, 4> coefficients{};
  double uMin = -100.0;
  double uMax = 100.0;

  RgbPoint at(double u) const;
};

// Random material centred in the cube with its leading axis near the gray
// diagonal, spanning an arc of roughly 200 RGB units.
CubicMaterial random_cubic_material(std::uint64_t seed);

// Image whose pixels follow the material's curve over a smooth spatial u
// field, with isotropic Gaussian noise of `noiseSigma` and 8-bit rounding.
RasterImage render_material(const CubicMaterial& material, int width, int height, std::uint64_t seed,
                            double noiseSigma);

// Same, restricted to the u sub-range [uFrom, uTo].
RasterImage render_material_range(const CubicMaterial& material, double uFrom, double uTo, int width, int height,
                                  std::uint64_t seed, double noiseSigma);

struct LabeledScene {
  RasterImage image;
  Mask truth;  // pixels of the modelled material
};

// Left half rendered from `material`; right half from a straight segment
// offset by `offset` RGB units along the material plane's normal.
LabeledScene two_material_scene(const CubicMaterial& material, int width, int height, std::uint64_t seed,
                                double noiseSigma, double offset = 60.0);

}  // namespace chromacurve::synthetic
