#pragma once

#include <array>
#include <span>
#include <string>

#include "chromacurve/vec3.hpp"

namespace chromacurve {

// Symmetric 3x3 matrix stored densely; only symmetric inputs are meaningful.
using Mat3 = std::array<std::array<double, 3>, 3>;

struct SymmetricEigen {
  std::array<double, 3> values{};   // descending
  std::array<Vec3, 3> vectors{};    // unit, matching `values`
};

// Eigen-decomposition of a symmetric 3x3 matrix. Uses the trigonometric
// closed form when the spectrum is well separated and cyclic Jacobi
// otherwise (or when the closed form fails its residual check).
// Each eigenvector is signed so that its largest-magnitude component is
// nonnegative; ties go to the first such index.
SymmetricEigen solve_symmetric_eigen(const Mat3& m);

// Flips `v` to the canonical sign described above.
Vec3 canonical_sign(Vec3 v);

struct EigenDecomposition {
  std::array<double, 3> eigenvalues{};  // descending, >= 0, RGB units^2
  std::array<Vec3, 3> eigenvectors{};
  RgbPoint centroid{};
  Mat3 covariance{};
};

// Population (1/N) covariance of the points, decomposed. With `weights`
// given (same length as points), entries are weighted by them instead.
// Throws DegenerateInput for fewer than 2 points or identical points.
EigenDecomposition covariance_eigen(std::span<const RgbPoint> points,
                                    std::span<const double> weights = {});

// Cumulative percentages of variance on the leading one and two axes.
struct PlanarityMeasure {
  double v1 = 0.0;
  double v2 = 0.0;

  // "[97.47, 99.42]": two decimals, display only.
  std::string to_string() const;
};

PlanarityMeasure planarity_from_eigenvalues(const std::array<double, 3>& eigenvalues);
PlanarityMeasure planarity_measure(std::span<const RgbPoint> points,
                                   std::span<const double> weights = {});

struct PlaneCoords {
  double u = 0.0;
  double v = 0.0;
};

// Right-handed orthonormal frame of a best-fit plane. axisU and axisV span
// the plane; normal = axisU x axisV.
struct PlaneFrame {
  RgbPoint origin{};
  Vec3 axisU{1, 0, 0};
  Vec3 axisV{0, 1, 0};
  Vec3 normal{0, 0, 1};

  PlaneCoords project(const RgbPoint& p) const {
    const Vec3 d = p - origin;
    return {dot(d, axisU), dot(d, axisV)};
  }
  RgbPoint lift(double u, double v) const { return origin + axisU * u + axisV * v; }
  double signed_offset(const RgbPoint& p) const { return dot(p - origin, normal); }
};

// Plane through the centroid spanned by the two leading eigenvectors.
// Throws DegenerateInput for fewer than 3 points or collinear points.
PlaneFrame fit_plane(std::span<const RgbPoint> points, std::span<const double> weights = {});

// Root-mean-square orthogonal distance of the points to the plane.
double plane_rms_residual(const PlaneFrame& plane, std::span<const RgbPoint> points);

// Best-fit line through (0,0,0): a unit direction whose components are the
// albedo ratios up to scale.
struct OriginLine {
  Vec3 direction{};
  double rmsResidual = 0.0;
};

// Leading eigenvector of the uncentered second-moment matrix. The line is
// pinned to the origin, so the points are not mean-centred.
// Throws DegenerateInput if there are fewer than 2 points or all are zero.
OriginLine fit_line_through_origin(std::span<const RgbPoint> points);

}  // namespace chromacurve
