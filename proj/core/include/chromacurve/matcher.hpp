#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "chromacurve/curve_model.hpp"
#include "chromacurve/raster.hpp"

namespace chromacurve {

// Which polyline segments count as covered by the kept samples.
enum class CoverageRule {
  BothEndpoints,   // both end samples kept (default)
  EitherEndpoint,  // at least one end sample kept
};

struct DetectionParams {
  double dT = kDefaultDistanceThreshold;  // pixel conformity: distance < dT
  double lS = 10.0;                       // sample kept when votes > lS
  double lT = 150.0;                      // region accepted when coverage > lT
  int minRegionPixels = 50;
  CoverageRule coverage = CoverageRule::BothEndpoints;
};

struct PixelCoord {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

struct Region {
  std::vector<PixelCoord> pixels;           // raster order
  std::vector<std::uint32_t> voteHistogram;  // per curve sample; empty until scored
  double coverageLength = 0.0;
  bool accepted = false;
};

struct DetectionResult {
  Mask conformityMask;
  std::vector<Region> regions;
  DetectionParams params;

  // Pixels of accepted regions.
  Mask accepted_mask() const;
  std::size_t accepted_count() const;
};

// Nearest curve sample and distance for every pixel of an image.
struct CurveProjection {
  std::vector<std::uint32_t> sampleIndex;
  std::vector<double> distance;
};

CurveProjection project_onto_curve(const RasterImage& image, const CurveModel& model);

// Pixel is conforming iff its curve distance < dT. Probes are not quantized.
Mask conformity_mask(const RasterImage& image, const CurveModel& model, double dT = kDefaultDistanceThreshold);
Mask conformity_mask(const CurveProjection& projection, int width, int height, double dT);

// 8-connected components of the true pixels, ordered by their first pixel in
// raster order. Components smaller than minRegionPixels are dropped.
std::vector<Region> extract_regions(const Mask& mask, int minRegionPixels = 50);

// Total length of polyline segments whose samples have more than `threshold`
// votes (per `rule`).
double covered_length(std::span<const std::uint32_t> votes, const CurveModel& model, double threshold,
                      CoverageRule rule = CoverageRule::BothEndpoints);

// Each region pixel votes for its nearest curve sample; returns the covered
// length under votes > lS and stores the votes in region.voteHistogram.
double coverage_length(Region& region, const RasterImage& image, const CurveModel& model, double lS = 10.0,
                       CoverageRule rule = CoverageRule::BothEndpoints);

// conformity_mask -> extract_regions -> coverage; accepted iff coverage > lT.
DetectionResult detect(const RasterImage& image, const CurveModel& model, const DetectionParams& params = {});

struct RecognitionParams {
  double dT = kDefaultDistanceThreshold;
  double kappa = 0.02;
  double lSFloor = 10.0;
  CoverageRule coverage = CoverageRule::BothEndpoints;
};

struct RecognitionScore {
  double score = 0.0;  // covered arc length, RGB units
  long adaptiveLs = 0;
  std::size_t conformingPixels = 0;
};

// Whole-probe score: one vote histogram over all conforming pixels, kept
// samples need votes > max(lSFloor, round(kappa * conforming / samples)).
RecognitionScore recognize(const RasterImage& image, const CurveModel& model, const RecognitionParams& params = {});

}  // namespace chromacurve
