#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chromacurve/nearest_index.hpp"
#include "chromacurve/quantize.hpp"
#include "chromacurve/raster.hpp"
#include "chromacurve/spectral.hpp"

namespace chromacurve {

inline constexpr int kModelDocumentVersion = 1;
inline constexpr double kDefaultDistanceThreshold = 25.0;

struct CurveFitOptions {
  // Observed u-range is widened by this fraction of its width on each side.
  double extrapolationFraction = 0.10;
  int sampleCount = 512;
  // Weight palette colors by pixel count in the plane and curve fits.
  bool weightByCount = false;
  // Drop end samples that leave the RGB cube inflated by cubeMargin.
  bool trimToCube = true;
  double cubeMargin = kDefaultDistanceThreshold;
  double maxCondition = 1e12;
};

struct Provenance {
  std::string sourceHash;
  std::string quantizer;
  int paletteSize = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct CurveDistance {
  double distance = 0.0;
  std::size_t nearestSampleIndex = 0;
  RgbPoint nearestPoint{};
};

// Planar cubic color model: v = a0 + a1 u + a2 u^2 + a3 u^3 in the plane's
// (u, v) coordinates, sampled into an evenly spaced polyline over uDomain.
// Immutable once built; safe to share across threads.
class CurveModel {
 public:
  // Builds the sampled polyline from its defining parameters.
  // Throws MalformedDocument if the frame is not orthonormal, the domain is
  // empty, or sampleCount < 2.
  static CurveModel from_parameters(const PlaneFrame& plane, const std::array<double, 4>& coefficients,
                                    double uMin, double uMax, int sampleCount,
                                    const PlanarityMeasure& planarity = {}, Provenance provenance = {});

  const PlaneFrame& plane() const { return plane_; }
  const std::array<double, 4>& coefficients() const { return coefficients_; }
  double u_min() const { return uMin_; }
  double u_max() const { return uMax_; }
  const std::vector<RgbPoint>& samples() const { return samples_; }
  std::size_t sample_count() const { return samples_.size(); }
  double arc_length() const { return arcLength_; }
  const PlanarityMeasure& planarity() const { return planarity_; }
  const Provenance& provenance() const { return provenance_; }

  double evaluate(double u) const;
  RgbPoint point_at(double u) const { return plane_.lift(u, evaluate(u)); }
  double sample_u(std::size_t i) const;
  double segment_length(std::size_t i) const { return segmentLengths_[i]; }
  // Largest distance between adjacent samples (h); nearest-sample distances
  // exceed the true curve distance by at most about h/2.
  double max_sample_spacing() const;

  // Nearest sample to `query`; ties resolve to the lowest sample index.
  CurveDistance nearest(const RgbPoint& query) const;

  CurveModel with_provenance(Provenance provenance) const {
    CurveModel m = *this;
    m.provenance_ = std::move(provenance);
    return m;
  }

 private:
  CurveModel() = default;

  PlaneFrame plane_;
  std::array<double, 4> coefficients_{};
  double uMin_ = 0.0;
  double uMax_ = 0.0;
  std::vector<RgbPoint> samples_;
  std::vector<double> segmentLengths_;
  double arcLength_ = 0.0;
  PlanarityMeasure planarity_;
  Provenance provenance_;
  NearestPointIndex index_;
};

// Least-squares polynomial of the given degree (0..3) through (u, v),
// solved by normal equations on a centred and scaled monomial basis and
// returned in the raw-u monomial basis (lowest order first).
// Throws DegenerateInput with fewer than degree+1 distinct u values and
// IllConditioned when the normal-matrix condition estimate exceeds maxCondition.
std::vector<double> fit_polynomial(std::span<const double> u, std::span<const double> v, int degree,
                                   std::span<const double> weights = {}, double maxCondition = 1e12);

double polynomial_value(std::span<const double> coefficients, double u);
double polynomial_rms_residual(std::span<const double> coefficients, std::span<const double> u,
                               std::span<const double> v);

// Fits the plane to the palette colors, then the cubic to their in-plane
// projections. Throws DegenerateInput (collinear or too few colors) or
// IllConditioned.
CurveModel fit_curve(const Palette& palette, const CurveFitOptions& options = {});
CurveModel fit_curve(std::span<const RgbPoint> colors, std::span<const double> weights,
                     const CurveFitOptions& options = {});
// Cubic fit in a caller-supplied frame (no plane estimation).
CurveModel fit_curve_in_frame(std::span<const RgbPoint> colors, const PlaneFrame& frame,
                              std::span<const double> weights = {}, const CurveFitOptions& options = {});

// Algebraic residuals v_i - p(u_i) of the colors in the model's frame.
std::vector<double> fit_residuals(const CurveModel& model, std::span<const RgbPoint> colors);

CurveDistance distance_to_curve(const RgbPoint& query, const CurveModel& model);

struct OutlierMask {
  Mask mask;
  double outlierFraction = 0.0;
};

// A pixel is an outlier when its curve distance is >= dT (conformity is
// strictly below dT).
OutlierMask outlier_mask(const RasterImage& image, const CurveModel& model,
                         double dT = kDefaultDistanceThreshold);

// Versioned JSON model document. Output is byte-stable for equal models.
std::string serialize_model(const CurveModel& model);
// Rebuilds the samples from plane, coefficients and domain, and checks the
// stored sampleCount and arcLength against them.
// Throws MalformedDocument or VersionMismatch.
CurveModel deserialize_model(std::string_view document);

}  // namespace chromacurve
