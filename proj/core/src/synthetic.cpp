#include "chromacurve/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace chromacurve::synthetic {
namespace {

struct Wave {
  double fx, fy, phase, amplitude;
};

std::vector<Wave> random_waves(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> freq(0.3, 2.2), phase(0.0, 2.0 * std::numbers::pi), amp(0.5, 1.0),
      sign(-1.0, 1.0);
  std::vector<Wave> waves;
  for (int k = 0; k < count; ++k)
    waves.push_back({freq(rng) * (sign(rng) < 0 ? -1 : 1), freq(rng) * (sign(rng) < 0 ? -1 : 1), phase(rng), amp(rng)});
  return waves;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do v = {n(rng), n(rng), n(rng)};
  while (norm(v) < 1e-6);
  return normalized(v);
}

RgbPoint noisy_8bit(RgbPoint p, double sigma, std::normal_distribution<double>& unit, std::mt19937_64& rng) {
  for (int c = 0; c < 3; ++c) {
    const double n = sigma > 0.0 ? sigma * unit(rng) : 0.0;
    p[c] = std::clamp(std::round(p[c] + n), 0.0, 255.0);
  }
  return p;
}

}  // namespace

std::vector<double> smooth_field(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto waves = random_waves(rng, 6);
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> raw(n);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (const auto& w : waves)
        acc += w.amplitude * std::sin(2.0 * std::numbers::pi * (w.fx * x / width + w.fy * y / height) + w.phase);
      raw[static_cast<std::size_t>(y) * width + x] = acc;
    }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) out[order[r]] = n > 1 ? static_cast<double>(r) / static_cast<double>(n - 1) : 0.5;
  return out;
}

NormalField smooth_normal_field(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto waves = random_waves(rng, 5);
  NormalField nf{width, height, {}};
  nf.normals.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  const double slope = 0.35;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double hx = 0.0, hy = 0.0;
      for (const auto& w : waves) {
        const double c = w.amplitude * std::cos(2.0 * std::numbers::pi * (w.fx * x / width + w.fy * y / height) + w.phase);
        hx += c * w.fx;
        hy += c * w.fy;
      }
      nf.normals.push_back(normalized(Vec3{-slope * hx, -slope * hy, 1.0}));
    }
  return nf;
}

LambertianScene random_lambertian_scene(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> albedo(0.15, 1.0), flux(0.7, 1.0), tilt(-0.4, 0.4);
  LambertianScene s;
  s.albedo = {albedo(rng), albedo(rng), albedo(rng)};
  s.flux = flux(rng);
  s.lightDirection = normalized(Vec3{tilt(rng), tilt(rng), 1.0});
  s.normalField = smooth_normal_field(width, height, seed);
  return s;
}

RgbPoint CubicMaterial::at(double u) const {
  const auto& a = coefficients;
  return frame.lift(u, a[0] + u * (a[1] + u * (a[2] + u * a[3])));
}

CubicMaterial random_cubic_material(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x51ed270b7a3c4d21ull);
  std::uniform_real_distribution<double> jitter(-5.0, 5.0);
  CubicMaterial m;
  m.frame.origin = {128.0 + jitter(rng), 128.0 + jitter(rng), 128.0 + jitter(rng)};
  m.frame.axisU = normalized(Vec3{1, 1, 1} * (1.0 / std::sqrt(3.0)) + random_unit(rng) * 0.25);
  const Vec3 r = random_unit(rng);
  m.frame.axisV = normalized(r - m.frame.axisU * dot(r, m.frame.axisU));
  m.frame.normal = cross(m.frame.axisU, m.frame.axisV);
  std::uniform_real_distribution<double> a0(-3, 3), a1(-0.05, 0.05), a2(-0.0012, 0.0012), a3(-4e-6, 4e-6);
  m.coefficients = {a0(rng), a1(rng), a2(rng), a3(rng)};
  m.uMin = -100.0;
  m.uMax = 100.0;
  return m;
}

RasterImage render_material_range(const CubicMaterial& material, double uFrom, double uTo, int width, int height,
                                  std::uint64_t seed, double noiseSigma) {
  const std::vector<double> field = smooth_field(width, height, seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<RgbPoint> px(field.size());
  for (std::size_t i = 0; i < field.size(); ++i)
    px[i] = noisy_8bit(material.at(uFrom + (uTo - uFrom) * field[i]), noiseSigma, unit, rng);
  return RasterImage(width, height, std::move(px));
}

RasterImage render_material(const CubicMaterial& material, int width, int height, std::uint64_t seed,
                            double noiseSigma) {
  return render_material_range(material, material.uMin, material.uMax, width, height, seed, noiseSigma);
}

LabeledScene two_material_scene(const CubicMaterial& material, int width, int height, std::uint64_t seed,
                                double noiseSigma, double offset) {
  const RgbPoint a = material.at(material.uMin);
  const RgbPoint b = material.at(material.uMax);
  // Offset side and chord portion chosen so the second material stays inside
  // the cube without clamping.
  const double lo = 3.0, hi = 252.0;
  Vec3 shift = material.frame.normal * offset;
  double keep = 1.0;
  for (; keep > 0.05; keep -= 0.05) {
    const double s0 = 0.5 - keep / 2, s1 = 0.5 + keep / 2;
    if (inside_cube(a + (b - a) * s0 + shift, lo, hi) && inside_cube(a + (b - a) * s1 + shift, lo, hi)) break;
    if (inside_cube(a + (b - a) * s0 - shift, lo, hi) && inside_cube(a + (b - a) * s1 - shift, lo, hi)) {
      shift = -shift;
      break;
    }
  }
  const RgbPoint lineFrom = a + (b - a) * (0.5 - keep / 2) + shift;
  const RgbPoint lineTo = a + (b - a) * (0.5 + keep / 2) + shift;

  const std::vector<double> field = smooth_field(width, height, seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> unit(0.0, 1.0);
  LabeledScene scene{RasterImage(width, height), Mask(width, height)};
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double t = field[static_cast<std::size_t>(y) * width + x];
      const bool left = x < width / 2;
      const RgbPoint c = left ? material.at(material.uMin + (material.uMax - material.uMin) * t)
                              : lineFrom + (lineTo - lineFrom) * t;
      scene.image.at(x, y) = noisy_8bit(c, noiseSigma, unit, rng);
      scene.truth.set(x, y, left);
    }
  return scene;
}

}  // namespace chromacurve::synthetic
