#include "chromacurve/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "chromacurve/error.hpp"

namespace chromacurve {

Mask DetectionResult::accepted_mask() const {
  Mask out(conformityMask.width(), conformityMask.height());
  for (const auto& r : regions)
    if (r.accepted)
      for (const auto& p : r.pixels) out.set(p.x, p.y, true);
  return out;
}

std::size_t DetectionResult::accepted_count() const {
  return static_cast<std::size_t>(std::count_if(regions.begin(), regions.end(), [](const Region& r) { return r.accepted; }));
}

CurveProjection project_onto_curve(const RasterImage& image, const CurveModel& model) {
  CurveProjection out;
  const auto px = image.pixels();
  out.sampleIndex.resize(px.size());
  out.distance.resize(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const CurveDistance d = model.nearest(px[i]);
    out.sampleIndex[i] = static_cast<std::uint32_t>(d.nearestSampleIndex);
    out.distance[i] = d.distance;
  }
  return out;
}

Mask conformity_mask(const CurveProjection& projection, int width, int height, double dT) {
  Mask m(width, height);
  if (projection.distance.size() != m.size()) throw MismatchedDimensions("projection does not match mask size");
  for (std::size_t i = 0; i < projection.distance.size(); ++i) m.set(i, projection.distance[i] < dT);
  return m;
}

Mask conformity_mask(const RasterImage& image, const CurveModel& model, double dT) {
  return conformity_mask(project_onto_curve(image, model), image.width(), image.height(), dT);
}

std::vector<Region> extract_regions(const Mask& mask, int minRegionPixels) {
  std::vector<Region> regions;
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<PixelCoord> stack;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y) || seen[mask.index(x, y)]) continue;
      Region region;
      seen[mask.index(x, y)] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        region.pixels.push_back(p);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx, ny = p.y + dy;
            if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= mask.width() || ny >= mask.height()) continue;
            const std::size_t ni = mask.index(nx, ny);
            if (!mask[ni] || seen[ni]) continue;
            seen[ni] = 1;
            stack.push_back({nx, ny});
          }
      }
      if (static_cast<int>(region.pixels.size()) < minRegionPixels) continue;
      std::sort(region.pixels.begin(), region.pixels.end(),
                [](const PixelCoord& a, const PixelCoord& b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
      regions.push_back(std::move(region));
    }
  return regions;
}

double covered_length(std::span<const std::uint32_t> votes, const CurveModel& model, double threshold,
                      CoverageRule rule) {
  if (votes.size() != model.sample_count()) throw MismatchedDimensions("vote histogram does not match curve samples");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < votes.size(); ++i) {
    const bool a = votes[i] > threshold;
    const bool b = votes[i + 1] > threshold;
    if (rule == CoverageRule::BothEndpoints ? (a && b) : (a || b)) total += model.segment_length(i);
  }
  return total;
}

namespace {

double score_region(Region& region, std::span<const std::uint32_t> sampleOfPixel, int width, const CurveModel& model,
                    double lS, CoverageRule rule) {
  region.voteHistogram.assign(model.sample_count(), 0);
  for (const auto& p : region.pixels)
    ++region.voteHistogram[sampleOfPixel[static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width) + p.x]];
  region.coverageLength = covered_length(region.voteHistogram, model, lS, rule);
  return region.coverageLength;
}

}  // namespace

double coverage_length(Region& region, const RasterImage& image, const CurveModel& model, double lS,
                       CoverageRule rule) {
  region.voteHistogram.assign(model.sample_count(), 0);
  for (const auto& p : region.pixels) ++region.voteHistogram[model.nearest(image.at(p.x, p.y)).nearestSampleIndex];
  region.coverageLength = covered_length(region.voteHistogram, model, lS, rule);
  return region.coverageLength;
}

DetectionResult detect(const RasterImage& image, const CurveModel& model, const DetectionParams& params) {
  const CurveProjection proj = project_onto_curve(image, model);
  DetectionResult result;
  result.params = params;
  result.conformityMask = conformity_mask(proj, image.width(), image.height(), params.dT);
  result.regions = extract_regions(result.conformityMask, params.minRegionPixels);
  for (auto& region : result.regions) {
    score_region(region, proj.sampleIndex, image.width(), model, params.lS, params.coverage);
    region.accepted = region.coverageLength > params.lT;
  }
  return result;
}

RecognitionScore recognize(const RasterImage& image, const CurveModel& model, const RecognitionParams& params) {
  RecognitionScore out;
  std::vector<std::uint32_t> votes(model.sample_count(), 0);
  for (const auto& p : image.pixels()) {
    const CurveDistance d = model.nearest(p);
    if (!(d.distance < params.dT)) continue;
    ++votes[d.nearestSampleIndex];
    ++out.conformingPixels;
  }
  const double density = params.kappa * static_cast<double>(out.conformingPixels) / static_cast<double>(model.sample_count());
  out.adaptiveLs = std::max(static_cast<long>(std::lround(params.lSFloor)), std::lround(density));
  out.score = covered_length(votes, model, static_cast<double>(out.adaptiveLs), params.coverage);
  return out;
}

}  // namespace chromacurve
