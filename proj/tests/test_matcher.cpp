#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "chromacurve/curve_model.hpp"
#include "chromacurve/matcher.hpp"
#include "chromacurve/quantize.hpp"
#include "chromacurve/synthetic.hpp"

using namespace chromacurve;

namespace {

PlaneFrame tilted_frame() {
  PlaneFrame f;
  f.origin = {128, 120, 110};
  f.axisU = normalized(Vec3{1, 1, 1});
  f.axisV = normalized(Vec3{1, -1, 0});
  f.normal = cross(f.axisU, f.axisV);
  return f;
}

CurveModel reference_model() {
  return CurveModel::from_parameters(tilted_frame(), {5, 0.4, -0.003, 1e-5}, -110, 110, 512);
}

struct Fixture {
  synthetic::CubicMaterial material;
  RasterImage image;
  CurveModel model;
};

Fixture exemplar(std::uint64_t seed, int size = 128, double sigma = 3.0) {
  auto mat = synthetic::random_cubic_material(seed);
  RasterImage img = synthetic::render_material(mat, size, size, seed, sigma);
  CurveModel m = fit_curve(quantize(img, QuantizerMethod::MinimumVariance));
  return {mat, std::move(img), std::move(m)};
}

// Union-find labelling of 8-connected true pixels; returns component sizes
// of those with at least `floor` pixels, sorted.
std::vector<std::size_t> oracle_component_sizes(const Mask& mask, std::size_t floor) {
  const int w = mask.width(), h = mask.height();
  std::vector<std::size_t> parent(mask.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask.at(nx, ny)) continue;
          parent[find(mask.index(x, y))] = find(mask.index(nx, ny));
        }
    }
  std::vector<std::size_t> count(mask.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) ++count[find(i)];
  std::vector<std::size_t> sizes;
  for (auto c : count)
    if (c >= floor && c > 0) sizes.push_back(c);
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

RasterImage tile_samples(const CurveModel& m, int w, int h, std::size_t from, std::size_t to, int repeats) {
  RasterImage img(w, h);
  std::size_t k = 0;
  for (std::size_t s = from; s < to; ++s)
    for (int r = 0; r < repeats; ++r) img.pixels()[k++] = m.samples()[s];
  // Remaining pixels sit far from the curve.
  for (; k < img.size(); ++k) img.pixels()[k] = m.samples()[from] + m.plane().normal * 200.0;
  return img;
}

double iou(const Mask& a, const Mask& b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  return uni == 0 ? 1.0 : double(inter) / double(uni);
}

}  // namespace

TEST_CASE("conformity_mask: tiled samples and a far color") {
  const CurveModel m = reference_model();
  RasterImage img(32, 16);
  for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = m.samples()[i % m.sample_count()];
  CHECK(conformity_mask(img, m).count() == img.size());

  const RgbPoint far = m.samples()[200] + m.plane().normal * 100.0;
  REQUIRE(distance_to_curve(far, m).distance == doctest::Approx(100.0).epsilon(1e-3));
  const RasterImage flat(20, 20, far);
  CHECK(conformity_mask(flat, m).count() == 0);
}

TEST_CASE("conformity_mask: complement of the outlier mask on the exemplar") {
  const Fixture f = exemplar(2);
  const Mask c = conformity_mask(f.image, f.model);
  const auto om = outlier_mask(f.image, f.model);
  std::size_t inliers = 0, agree = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (om.mask[i]) continue;
    ++inliers;
    agree += c[i];
  }
  CHECK(agree >= 0.95 * inliers);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] != om.mask[i]);
}

TEST_CASE("extract_regions: trivial masks") {
  CHECK(extract_regions(Mask(30, 30, false)).empty());

  Mask two(40, 20, false);
  for (int y = 2; y < 12; ++y)
    for (int x = 1; x < 11; ++x) {
      two.set(x, y, true);
      two.set(x + 25, y + 5 < 20 ? y + 5 : y, true);
    }
  const auto regions = extract_regions(two);
  REQUIRE(regions.size() == 2);
  CHECK(regions[0].pixels.size() == 100);
  CHECK(regions[1].pixels.size() == 100);

  Mask speckle(50, 50, false);
  for (int y = 0; y < 50; y += 3)
    for (int x = 0; x < 50; x += 3) speckle.set(x, y, true);
  CHECK(extract_regions(speckle).empty());
  CHECK(extract_regions(speckle, 1).size() == speckle.count());
}

TEST_CASE("extract_regions: diagonal contact joins regions") {
  Mask m(10, 10, false);
  for (int i = 0; i < 10; ++i) m.set(i, i, true);
  const auto r = extract_regions(m, 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0].pixels.size() == 10);
}

TEST_CASE("extract_regions: matches a union-find labelling") {
  std::mt19937_64 rng(77);
  std::bernoulli_distribution on(0.45);
  for (int trial = 0; trial < 10; ++trial) {
    Mask m(60, 45, false);
    for (std::size_t i = 0; i < m.size(); ++i) m.set(i, on(rng));
    const int floor = 1 + trial * 3;
    auto regions = extract_regions(m, floor);
    std::vector<std::size_t> sizes;
    for (const auto& r : regions) {
      sizes.push_back(r.pixels.size());
      for (const auto& p : r.pixels) CHECK(m.at(p.x, p.y));
      CHECK(std::is_sorted(r.pixels.begin(), r.pixels.end(), [](const PixelCoord& a, const PixelCoord& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
      }));
    }
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == oracle_component_sizes(m, static_cast<std::size_t>(floor)));
  }
}

TEST_CASE("coverage_length: constructed vote patterns") {
  const CurveModel m = reference_model();

  // Every pixel on one sample.
  {
    const RasterImage img(20, 20, m.samples()[100]);
    Region r = extract_regions(Mask(20, 20, true)).at(0);
    CHECK(coverage_length(r, img, m) == 0.0);
    CHECK(r.voteHistogram[100] == 400);
  }
  // Every sample with 12 votes.
  {
    const RasterImage img = tile_samples(m, 512, 12, 0, 512, 12);
    Region r = extract_regions(conformity_mask(img, m)).at(0);
    CHECK(coverage_length(r, img, m) == doctest::Approx(m.arc_length()).epsilon(1e-12));
    const auto total = std::accumulate(r.voteHistogram.begin(), r.voteHistogram.end(), std::uint64_t{0});
    CHECK(total == r.pixels.size());
  }
  // First half of the samples with 20 votes each.
  {
    const RasterImage img = tile_samples(m, 256, 20, 0, 256, 20);
    Region r = extract_regions(conformity_mask(img, m)).at(0);
    const double cov = coverage_length(r, img, m);
    double direct = 0.0;
    for (std::size_t i = 0; i < 255; ++i) direct += distance(m.samples()[i], m.samples()[i + 1]);
    CHECK(cov == doctest::Approx(direct).epsilon(1e-12));
    CHECK(cov <= m.arc_length());
  }
  // Same on a straight curve, where samples split the arc evenly.
  {
    const CurveModel line = CurveModel::from_parameters(tilted_frame(), {2, 0.3, 0, 0}, -110, 110, 512);
    const RasterImage img = tile_samples(line, 256, 20, 0, 256, 20);
    Region r = extract_regions(conformity_mask(img, line)).at(0);
    CHECK(std::abs(coverage_length(r, img, line) - line.arc_length() / 2) <= line.max_sample_spacing());
  }
}

TEST_CASE("covered_length: strict vote threshold and coverage rules") {
  const CurveModel m = CurveModel::from_parameters(tilted_frame(), {0, 0, 0, 0}, 0, 10, 11);
  std::vector<std::uint32_t> votes(11, 0);
  votes[3] = 11;
  votes[4] = 11;
  votes[7] = 10;  // not kept: votes must exceed lS
  CHECK(covered_length(votes, m, 10, CoverageRule::BothEndpoints) == doctest::Approx(1.0));
  CHECK(covered_length(votes, m, 10, CoverageRule::EitherEndpoint) == doctest::Approx(3.0));
  CHECK(covered_length(votes, m, 9, CoverageRule::BothEndpoints) == doctest::Approx(1.0));
  CHECK(covered_length(votes, m, 9, CoverageRule::EitherEndpoint) == doctest::Approx(5.0));
}

TEST_CASE("detect: exemplar self-probe") {
  for (std::uint64_t seed : {1u, 4u}) {
    const Fixture f = exemplar(seed);
    const DetectionResult d = detect(f.image, f.model);
    const std::size_t conforming = d.conformityMask.count();
    std::size_t best = 0;
    for (const auto& r : d.regions) {
      CHECK(r.coverageLength <= f.model.arc_length() + 1e-9);
      if (r.accepted) {
        CHECK(r.coverageLength > d.params.lT);
        best = std::max(best, r.pixels.size());
      }
    }
    CHECK(best * 2 > conforming);
  }
}

TEST_CASE("detect: far uniform probe has no regions") {
  const CurveModel m = reference_model();
  const RasterImage img(64, 64, m.samples()[300] + m.plane().normal * 90.0);
  const auto d = detect(img, m);
  CHECK(d.regions.empty());
  CHECK(d.accepted_count() == 0);
}

TEST_CASE("detect: two-material scene") {
  const auto mat = synthetic::random_cubic_material(6);
  const RasterImage train = synthetic::render_material(mat, 128, 128, 60, 3.0);
  const CurveModel m = fit_curve(quantize(train, QuantizerMethod::MinimumVariance));
  const auto scene = synthetic::two_material_scene(mat, 160, 120, 61, 3.0);
  const auto d = detect(scene.image, m);
  CHECK(iou(d.accepted_mask(), scene.truth) >= 0.9);
  for (const auto& r : d.regions) {
    if (!r.accepted) continue;
    std::size_t inside = 0;
    for (const auto& p : r.pixels) inside += scene.truth.at(p.x, p.y);
    CHECK(inside * 2 > r.pixels.size());
  }
}

TEST_CASE("detect: threshold monotonicity") {
  const Fixture f = exemplar(9, 96, 6.0);
  const auto scene = synthetic::two_material_scene(f.material, 120, 96, 9, 6.0, 35.0);
  const RasterImage& img = scene.image;

  Mask prev(img.width(), img.height(), false);
  for (double dT : {10.0, 25.0, 40.0}) {
    const Mask c = conformity_mask(img, f.model, dT);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK((!prev[i] || c[i]));
    prev = c;
  }

  Region base = extract_regions(conformity_mask(img, f.model)).at(0);
  double last = 1e300;
  for (double lS : {2.0, 10.0, 30.0}) {
    Region r = base;
    const double cov = coverage_length(r, img, f.model, lS);
    CHECK(cov <= last);
    last = cov;
  }

  std::size_t lastAccepted = SIZE_MAX;
  for (double lT : {50.0, 150.0, 300.0}) {
    DetectionParams p;
    p.lT = lT;
    const std::size_t n = detect(img, f.model, p).accepted_count();
    CHECK(n <= lastAccepted);
    lastAccepted = n;
  }
}

TEST_CASE("detect: acceptance does not depend on scan order") {
  const Fixture f = exemplar(12, 96, 5.0);
  const auto scene = synthetic::two_material_scene(f.material, 100, 80, 12, 5.0);
  const RasterImage& img = scene.image;
  RasterImage flipped(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      flipped.at(img.width() - 1 - x, img.height() - 1 - y) = img.at(x, y);
  const Mask a = detect(img, f.model).accepted_mask();
  const Mask b = detect(flipped, f.model).accepted_mask();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) CHECK(a.at(x, y) == b.at(img.width() - 1 - x, img.height() - 1 - y));
}

TEST_CASE("recognize: zero conforming pixels") {
  const CurveModel m = reference_model();
  const RasterImage img(50, 50, m.samples()[10] + m.plane().normal * 80.0);
  const auto s = recognize(img, m);
  CHECK(s.score == 0.0);
  CHECK(s.conformingPixels == 0);
  CHECK(s.adaptiveLs == 10);
}

TEST_CASE("recognize: adaptive threshold grows with conforming pixels") {
  const CurveModel m = reference_model();
  const RasterImage big = tile_samples(m, 512, 600, 0, 512, 600);
  const auto s = recognize(big, m);
  CHECK(s.conformingPixels == big.size());
  CHECK(s.adaptiveLs == std::lround(0.02 * double(big.size()) / 512.0));
  CHECK(s.adaptiveLs > 10);
  CHECK(s.score == doctest::Approx(m.arc_length()));
}

TEST_CASE("recognize: self-recognition and short dense arcs") {
  const Fixture f = exemplar(3, 128);
  const auto self = recognize(f.image, f.model);
  const Mask c = conformity_mask(f.image, f.model);
  const auto proj = project_onto_curve(f.image, f.model);
  std::vector<std::uint32_t> votes(f.model.sample_count(), 0);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i]) ++votes[proj.sampleIndex[i]];
  const double own = covered_length(votes, f.model, 10.0);
  CHECK(std::abs(self.score - own) <= 0.1 * own);
  CHECK(self.score <= f.model.arc_length());

  const double span = f.material.uMax - f.material.uMin;
  const RasterImage narrow =
      synthetic::render_material_range(f.material, f.material.uMin + 0.45 * span, f.material.uMin + 0.55 * span, 128,
                                       128, 3, 3.0);
  const auto low = recognize(narrow, f.model);
  CHECK(low.conformingPixels > 0.9 * narrow.size());
  CHECK(low.score < 0.25 * self.score);
}

TEST_CASE("recognize: full curve beats a quarter of it, crops never score higher") {
  const Fixture f = exemplar(5, 128);
  const double span = f.material.uMax - f.material.uMin;
  const RasterImage full = synthetic::render_material(f.material, 128, 128, 50, 3.0);
  const RasterImage quarter =
      synthetic::render_material_range(f.material, f.material.uMin, f.material.uMin + 0.25 * span, 128, 128, 50, 3.0);
  CHECK(recognize(full, f.model).score > recognize(quarter, f.model).score);

  const double whole = recognize(full, f.model).score;
  CHECK(recognize(full.crop(10, 20, 90, 70), f.model).score <= whole);
  CHECK(recognize(full.crop(0, 0, 128, 64), f.model).score <= whole);
}
