#include <doctest.h>

#include <cmath>
#include <vector>

#include "chromacurve/error.hpp"
#include "chromacurve/quantize.hpp"
#include "chromacurve/shading.hpp"
#include "chromacurve/synthetic.hpp"
#include "support/oracles.hpp"

using namespace chromacurve;

namespace {

// Six points +-s_i e_i around a gray centre have covariance diag(s_i^2 / 3),
// so the eigenvalues (and PM) can be dialled in directly.
std::vector<RgbPoint> cloud_with_pm(double v1, double v2) {
  const double lambda[3] = {v1, v2 - v1, 100.0 - v2};
  std::vector<RgbPoint> pts;
  for (int i = 0; i < 3; ++i) {
    Vec3 e{};
    e[i] = std::sqrt(3.0 * lambda[i]);
    pts.push_back(Vec3{128, 128, 128} + e);
    pts.push_back(Vec3{128, 128, 128} - e);
  }
  return pts;
}

NormalField flat_field(int w, int h, Vec3 n) {
  return {w, h, std::vector<Vec3>(static_cast<std::size_t>(w) * h, n)};
}

}  // namespace

TEST_CASE("label_from_planarity: reference patches") {
  CHECK(label_from_planarity({99.54, 99.98}) == Variation::Shading);
  CHECK(label_from_planarity({76.41, 98.86}) == Variation::Reflectance);
  CHECK(label_from_planarity({91.28, 99.34}) == Variation::Ambiguous);
  CHECK(label_from_planarity({96.0, 99.0}) == Variation::Shading);
  CHECK(label_from_planarity({89.0, 99.0}) == Variation::Ambiguous);
  CHECK(label_from_planarity({88.999, 99.0}) == Variation::Reflectance);
  CHECK(label_from_planarity({91.28, 99.34}, {.shadingMinV1 = 91.0, .reflectanceMaxV1 = 89.0}) == Variation::Shading);
  CHECK(to_string(Variation::Reflectance) == "reflectance");
}

TEST_CASE("classify_variation: point sets with the reference PMs") {
  struct Row {
    double v1, v2;
    Variation expect;
  };
  for (const Row& r : {Row{99.54, 99.98, Variation::Shading}, Row{76.41, 98.86, Variation::Reflectance},
                       Row{91.28, 99.34, Variation::Ambiguous}}) {
    const auto pts = cloud_with_pm(r.v1, r.v2);
    const VariationLabel lab = classify_variation(pts);
    CHECK(lab.pm.v1 == doctest::Approx(r.v1).epsilon(1e-9));
    CHECK(lab.pm.v2 == doctest::Approx(r.v2).epsilon(1e-9));
    CHECK(lab.label == r.expect);
    CHECK(lab.lineResidual > 0.0);
  }
  CHECK_THROWS_AS(classify_variation(std::vector<RgbPoint>(3, RgbPoint{4, 5, 6})), DegenerateInput);
}

TEST_CASE("synthesize_lambertian: trivial scenes") {
  LambertianScene s;
  s.albedo = {1, 1, 1};
  s.flux = 0.5;
  s.lightDirection = {0, 0, 1};
  s.normalField = flat_field(8, 4, {0, 0, 1});
  const RasterImage img = synthesize_lambertian(s);
  REQUIRE(img.width() == 8);
  for (const auto& p : img.pixels()) CHECK(p == RgbPoint{127.5, 127.5, 127.5});

  s.normalField = flat_field(8, 4, {1, 0, 0});
  {
    const RasterImage r = synthesize_lambertian(s);
    for (const auto& p : r.pixels()) CHECK(p == RgbPoint{0, 0, 0});
  }

  // Back-facing normals are black, not negative.
  s.normalField = flat_field(2, 2, {0, 0, -1});
  {
    const RasterImage r = synthesize_lambertian(s);
    for (const auto& p : r.pixels()) CHECK(p == RgbPoint{0, 0, 0});
  }

  // Clamped from above.
  s.flux = 3.0;
  s.normalField = flat_field(2, 2, {0, 0, 1});
  {
    const RasterImage r = synthesize_lambertian(s);
    for (const auto& p : r.pixels()) CHECK(p == RgbPoint{255, 255, 255});
  }
}

TEST_CASE("synthesize_lambertian: invalid scenes") {
  LambertianScene s;
  s.normalField = flat_field(2, 2, {0, 0, 1});
  LambertianScene bad = s;
  bad.albedo = {0, 0.5, 0.5};
  CHECK_THROWS_AS(synthesize_lambertian(bad), ConfigError);
  bad = s;
  bad.flux = 0;
  CHECK_THROWS_AS(synthesize_lambertian(bad), ConfigError);
  bad = s;
  bad.lightDirection = {0, 0, 2};
  CHECK_THROWS_AS(synthesize_lambertian(bad), ConfigError);
  bad = s;
  bad.normalField.normals[1] = {0, 0.5, 0.5};
  CHECK_THROWS_AS(synthesize_lambertian(bad), ConfigError);
}

TEST_CASE("rendered channels are proportional") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const LambertianScene s = synthetic::random_lambertian_scene(64, 64, seed);
    const RasterImage img = synthesize_lambertian(s);
    for (const auto& p : img.pixels()) {
      if (p.r <= 0.0) continue;
      CHECK(std::abs(p.g / p.r - s.albedo.g / s.albedo.r) < 1e-6);
      CHECK(std::abs(p.b / p.r - s.albedo.b / s.albedo.r) < 1e-6);
    }
  }
}

TEST_CASE("Lambertian palette is a line through the origin along the albedo") {
  LambertianScene s;
  s.albedo = {0.9, 0.6, 0.3};
  s.flux = 1.0;
  s.lightDirection = normalized(Vec3{0.2, -0.1, 1.0});
  s.normalField = synthetic::smooth_normal_field(128, 128, 17);
  const RasterImage img = synthesize_lambertian(s);
  const Palette pal = quantize(img, QuantizerMethod::MinimumVariance);
  const VariationLabel lab = classify_variation(pal.colors);
  CHECK(lab.label == Variation::Shading);
  CHECK(lab.pm.v1 >= 99.5);
  const OriginLine line = fit_line_through_origin(pal.colors);
  CHECK(angle_degrees(line.direction, s.albedo) <= 0.5);
}

TEST_CASE("flux does not change the classification") {
  LambertianScene s = synthetic::random_lambertian_scene(64, 64, 3);
  s.flux = 0.4;
  const RasterImage a = synthesize_lambertian(s);
  s.flux = 0.8;
  const RasterImage b = synthesize_lambertian(s);
  std::vector<RgbPoint> pa(a.pixels().begin(), a.pixels().end()), pb(b.pixels().begin(), b.pixels().end());
  const auto la = classify_variation(pa), lb = classify_variation(pb);
  CHECK(la.label == lb.label);
  CHECK(la.pm.v1 == doctest::Approx(lb.pm.v1).epsilon(1e-9));
  CHECK(la.pm.v2 == doctest::Approx(lb.pm.v2).epsilon(1e-9));
}

TEST_CASE("two albedos 30 degrees apart are not shading") {
  const Vec3 a1 = normalized(Vec3{0.8, 0.5, 0.3});
  const Vec3 axis = normalized(cross(a1, Vec3{0, 0, 1}));
  const Vec3 a2 = oracle::rotate(a1, axis, 30.0 * M_PI / 180.0);
  REQUIRE(angle_degrees(a1, a2) == doctest::Approx(30.0));
  REQUIRE(a2.r > 0);
  REQUIRE(a2.g > 0);
  REQUIRE(a2.b > 0);

  const NormalField nf = synthetic::smooth_normal_field(128, 128, 8);
  LambertianScene s;
  s.flux = 0.9;
  s.lightDirection = {0, 0, 1};
  s.normalField = nf;
  s.albedo = a1;
  const RasterImage left = synthesize_lambertian(s);
  s.albedo = a2;
  const RasterImage right = synthesize_lambertian(s);
  RasterImage mixed(128, 128);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) mixed.at(x, y) = x < 64 ? left.at(x, y) : right.at(x, y);
  const Palette pal = quantize(mixed, QuantizerMethod::MinimumVariance);
  CHECK(classify_variation(pal.colors).label != Variation::Shading);
}
