#include "chromacurve/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "chromacurve/error.hpp"

namespace chromacurve {
namespace {

double max_abs_entry(const Mat3& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double v : row) s = std::max(s, std::abs(v));
  return s;
}

Vec3 row(const Mat3& m, int i) { return {m[i][0], m[i][1], m[i][2]}; }

Vec3 mat_vec(const Mat3& m, const Vec3& v) { return {dot(row(m, 0), v), dot(row(m, 1), v), dot(row(m, 2), v)}; }

// Null vector of (m - lambda I) from the largest cross product of its rows.
Vec3 null_vector(const Mat3& m, double lambda) {
  Mat3 s = m;
  for (int i = 0; i < 3; ++i) s[i][i] -= lambda;
  const Vec3 c0 = cross(row(s, 0), row(s, 1));
  const Vec3 c1 = cross(row(s, 0), row(s, 2));
  const Vec3 c2 = cross(row(s, 1), row(s, 2));
  const double n0 = squared_norm(c0), n1 = squared_norm(c1), n2 = squared_norm(c2);
  if (n0 >= n1 && n0 >= n2) return normalized(c0);
  if (n1 >= n2) return normalized(c1);
  return normalized(c2);
}

void sort_descending(SymmetricEigen& e) {
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return e.values[a] > e.values[b]; });
  SymmetricEigen out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = e.values[order[i]];
    out.vectors[i] = e.vectors[order[i]];
  }
  e = out;
}

double residual(const Mat3& m, const SymmetricEigen& e) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    worst = std::max(worst, norm(mat_vec(m, e.vectors[i]) - e.vectors[i] * e.values[i]));
  return worst;
}

bool closed_form(const Mat3& m, SymmetricEigen& out) {
  const double scale = max_abs_entry(m);
  if (scale == 0.0) return false;
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
  const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
                    (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p <= 1e-12 * scale) return false;
  Mat3 b = m;
  for (int i = 0; i < 3; ++i) {
    b[i][i] -= q;
    for (int j = 0; j < 3; ++j) b[i][j] /= p;
  }
  const double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                     b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                     b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double l1 = q + 2.0 * p * std::cos(phi);
  const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double l2 = 3.0 * q - l1 - l3;

  // Cross-product eigenvectors lose accuracy when eigenvalues nearly coincide.
  const double gap = std::min(l1 - l2, l2 - l3);
  if (gap <= 1e-6 * std::max(std::abs(l1), std::abs(l3))) return false;

  const Vec3 v1 = null_vector(m, l1);
  Vec3 v3 = null_vector(m, l3);
  v3 = normalized(v3 - v1 * dot(v3, v1));
  const Vec3 v2 = normalized(cross(v3, v1));
  out.values = {l1, l2, l3};
  out.vectors = {v1, v2, v3};
  return residual(m, out) <= 1e-11 * scale;
}

SymmetricEigen jacobi(Mat3 a) {
  Mat3 v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const double scale = max_abs_entry(a);
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off <= 1e-300 || off <= 1e-17 * scale) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  SymmetricEigen out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = a[i][i];
    out.vectors[i] = normalized(Vec3{v[0][i], v[1][i], v[2][i]});
  }
  return out;
}

}  // namespace

Vec3 canonical_sign(Vec3 v) {
  int lead = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[lead]) * (1.0 + 1e-12)) lead = i;
  return v[lead] < 0.0 ? -v : v;
}

SymmetricEigen solve_symmetric_eigen(const Mat3& m) {
  SymmetricEigen e;
  if (!closed_form(m, e)) e = jacobi(m);
  sort_descending(e);
  for (auto& vec : e.vectors) vec = canonical_sign(vec);
  return e;
}

EigenDecomposition covariance_eigen(std::span<const RgbPoint> points, std::span<const double> weights) {
  if (points.size() < 2) throw DegenerateInput("covariance needs at least 2 points");
  if (!weights.empty() && weights.size() != points.size())
    throw MismatchedDimensions("weights must match points");
  if (std::all_of(points.begin(), points.end(), [&](const RgbPoint& p) { return p == points.front(); }))
    throw DegenerateInput("all points identical");

  double total = 0.0;
  Vec3 mean{};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    mean += points[i] * w;
    total += w;
  }
  if (!(total > 0.0)) throw DegenerateInput("weights sum to zero");
  mean *= 1.0 / total;

  Mat3 cov{};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const Vec3 d = points[i] - mean;
    for (int r = 0; r < 3; ++r)
      for (int c = r; c < 3; ++c) cov[r][c] += w * d[r] * d[c];
  }
  for (int r = 0; r < 3; ++r)
    for (int c = r; c < 3; ++c) {
      cov[r][c] /= total;
      cov[c][r] = cov[r][c];
    }
  if (max_abs_entry(cov) == 0.0) throw DegenerateInput("covariance is zero");

  const SymmetricEigen e = solve_symmetric_eigen(cov);
  EigenDecomposition out;
  for (int i = 0; i < 3; ++i) out.eigenvalues[i] = std::max(0.0, e.values[i]);
  out.eigenvectors = e.vectors;
  out.centroid = mean;
  out.covariance = cov;
  return out;
}

std::string PlanarityMeasure::to_string() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%.2f, %.2f]", v1, v2);
  return buf;
}

PlanarityMeasure planarity_from_eigenvalues(const std::array<double, 3>& ev) {
  const double sum = ev[0] + ev[1] + ev[2];
  if (!(sum > 0.0)) throw DegenerateInput("eigenvalue sum is zero");
  PlanarityMeasure pm{100.0 * ev[0] / sum, 100.0 * (ev[0] + ev[1]) / sum};
  pm.v1 = std::clamp(pm.v1, 0.0, 100.0);
  pm.v2 = std::clamp(pm.v2, pm.v1, 100.0);
  return pm;
}

PlanarityMeasure planarity_measure(std::span<const RgbPoint> points, std::span<const double> weights) {
  return planarity_from_eigenvalues(covariance_eigen(points, weights).eigenvalues);
}

PlaneFrame fit_plane(std::span<const RgbPoint> points, std::span<const double> weights) {
  if (points.size() < 3) throw DegenerateInput("plane fit needs at least 3 points");
  const EigenDecomposition e = covariance_eigen(points, weights);
  if (e.eigenvalues[1] <= 1e-12 * e.eigenvalues[0])
    throw DegenerateInput("points are collinear; model them as a line");
  PlaneFrame f;
  f.origin = e.centroid;
  f.axisU = e.eigenvectors[0];
  f.axisV = normalized(e.eigenvectors[1] - f.axisU * dot(e.eigenvectors[1], f.axisU));
  f.normal = normalized(cross(f.axisU, f.axisV));
  return f;
}

double plane_rms_residual(const PlaneFrame& plane, std::span<const RgbPoint> points) {
  if (points.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& p : points) {
    const double d = plane.signed_offset(p);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(points.size()));
}

OriginLine fit_line_through_origin(std::span<const RgbPoint> points) {
  if (points.size() < 2) throw DegenerateInput("line fit needs at least 2 points");
  Mat3 m{};
  for (const auto& p : points)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m[r][c] += p[r] * p[c];
  if (max_abs_entry(m) == 0.0) throw DegenerateInput("all points are at the origin");
  const double n = static_cast<double>(points.size());
  for (auto& row : m)
    for (double& v : row) v /= n;

  OriginLine line;
  line.direction = solve_symmetric_eigen(m).vectors[0];
  if (line.direction.r + line.direction.g + line.direction.b < 0.0) line.direction = -line.direction;

  double acc = 0.0;
  for (const auto& p : points) acc += squared_norm(p - line.direction * dot(p, line.direction));
  line.rmsResidual = std::sqrt(acc / n);
  return line;
}

}  // namespace chromacurve
