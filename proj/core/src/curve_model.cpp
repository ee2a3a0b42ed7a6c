#include "chromacurve/curve_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "chromacurve/error.hpp"

namespace chromacurve {
namespace {

using Matrix = std::vector<std::vector<double>>;

// Gauss-Jordan inverse with partial pivoting; false if singular.
bool invert(Matrix a, Matrix& inv) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) return false;
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const double d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return true;
}

double norm1(const Matrix& a) {
  double best = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) s += std::abs(a[r][c]);
    best = std::max(best, s);
  }
  return best;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

CurveModel build_model(const PlaneFrame& frame, std::span<const RgbPoint> colors, std::span<const double> weights,
                       const CurveFitOptions& options) {
  if (options.sampleCount < 2) throw ConfigError("sample count must be at least 2");
  if (options.extrapolationFraction < 0.0) throw ConfigError("extrapolation fraction must be nonnegative");
  std::vector<double> u(colors.size()), v(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    const PlaneCoords pc = frame.project(colors[i]);
    u[i] = pc.u;
    v[i] = pc.v;
  }
  const std::vector<double> c = fit_polynomial(u, v, 3, weights, options.maxCondition);
  const std::array<double, 4> coeffs{c[0], c[1], c[2], c[3]};

  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  const double pad = (*hi - *lo) * options.extrapolationFraction;
  double uLo = *lo - pad;
  double uHi = *hi + pad;
  int count = options.sampleCount;

  if (options.trimToCube) {
    // Longest run of samples inside the inflated cube; first run wins ties.
    const std::vector<double> us = linspace(uLo, uHi, count);
    const double lower = -options.cubeMargin, upper = 255.0 + options.cubeMargin;
    std::size_t bestStart = 0, bestLen = 0, runStart = 0, runLen = 0;
    for (std::size_t i = 0; i < us.size(); ++i) {
      if (inside_cube(frame.lift(us[i], polynomial_value(c, us[i])), lower, upper)) {
        if (runLen == 0) runStart = i;
        if (++runLen > bestLen) {
          bestLen = runLen;
          bestStart = runStart;
        }
      } else {
        runLen = 0;
      }
    }
    if (bestLen < 2) throw DegenerateInput("fitted curve lies outside the RGB cube");
    if (bestLen < us.size()) {
      uLo = us[bestStart];
      uHi = us[bestStart + bestLen - 1];
      count = static_cast<int>(bestLen);
    }
  }

  const PlanarityMeasure pm = planarity_measure(colors, weights);
  return CurveModel::from_parameters(frame, coeffs, uLo, uHi, count, pm);
}

nlohmann::ordered_json vec_json(const Vec3& v) { return nlohmann::ordered_json::array({v.r, v.g, v.b}); }

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw MalformedDocument(std::string("model document missing '") + key + "'");
  return obj.at(key);
}

double number(const nlohmann::json& j, const char* what) {
  if (!j.is_number()) throw MalformedDocument(std::string("model field '") + what + "' is not a number");
  return j.get<double>();
}

Vec3 vec_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw MalformedDocument(std::string("model field '") + what + "' must have 3 entries");
  return {number(j[0], what), number(j[1], what), number(j[2], what)};
}

}  // namespace

CurveModel CurveModel::from_parameters(const PlaneFrame& plane, const std::array<double, 4>& coefficients,
                                       double uMin, double uMax, int sampleCount, const PlanarityMeasure& planarity,
                                       Provenance provenance) {
  if (sampleCount < 2) throw MalformedDocument("curve needs at least 2 samples");
  if (!(uMax > uMin) || !std::isfinite(uMin) || !std::isfinite(uMax))
    throw MalformedDocument("curve parameter domain is empty");
  const double tol = 1e-6;
  if (std::abs(norm(plane.axisU) - 1) > tol || std::abs(norm(plane.axisV) - 1) > tol ||
      std::abs(norm(plane.normal) - 1) > tol || std::abs(dot(plane.axisU, plane.axisV)) > tol ||
      std::abs(dot(plane.axisU, plane.normal)) > tol || std::abs(dot(plane.axisV, plane.normal)) > tol)
    throw MalformedDocument("plane frame is not orthonormal");
  for (double a : coefficients)
    if (!std::isfinite(a)) throw MalformedDocument("curve coefficient is not finite");

  CurveModel m;
  m.plane_ = plane;
  m.coefficients_ = coefficients;
  m.uMin_ = uMin;
  m.uMax_ = uMax;
  m.planarity_ = planarity;
  m.provenance_ = std::move(provenance);
  m.samples_.reserve(static_cast<std::size_t>(sampleCount));
  for (double u : linspace(uMin, uMax, sampleCount)) m.samples_.push_back(m.point_at(u));
  m.segmentLengths_.reserve(m.samples_.size() - 1);
  for (std::size_t i = 0; i + 1 < m.samples_.size(); ++i) {
    m.segmentLengths_.push_back(distance(m.samples_[i], m.samples_[i + 1]));
    m.arcLength_ += m.segmentLengths_.back();
  }
  m.index_ = NearestPointIndex(m.samples_);
  return m;
}

double CurveModel::evaluate(double u) const { return polynomial_value(coefficients_, u); }

double CurveModel::sample_u(std::size_t i) const {
  return uMin_ + (uMax_ - uMin_) * static_cast<double>(i) / static_cast<double>(samples_.size() - 1);
}

double CurveModel::max_sample_spacing() const {
  return segmentLengths_.empty() ? 0.0 : *std::max_element(segmentLengths_.begin(), segmentLengths_.end());
}

CurveDistance CurveModel::nearest(const RgbPoint& query) const {
  const auto hit = index_.nearest(query);
  return {std::sqrt(hit.squaredDistance), hit.index, samples_[hit.index]};
}

double polynomial_value(std::span<const double> coefficients, double u) {
  double acc = 0.0;
  for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * u + coefficients[k];
  return acc;
}

double polynomial_rms_residual(std::span<const double> coefficients, std::span<const double> u,
                               std::span<const double> v) {
  if (u.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = v[i] - polynomial_value(coefficients, u[i]);
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(u.size()));
}

std::vector<double> fit_polynomial(std::span<const double> u, std::span<const double> v, int degree,
                                   std::span<const double> weights, double maxCondition) {
  if (degree < 0 || degree > 3) throw ConfigError("polynomial degree must be in [0, 3]");
  if (u.size() != v.size() || (!weights.empty() && weights.size() != u.size()))
    throw MismatchedDimensions("polynomial fit inputs differ in length");
  const std::set<double> distinct(u.begin(), u.end());
  if (static_cast<int>(distinct.size()) < degree + 1)
    throw DegenerateInput("too few distinct abscissae for the polynomial degree");

  const auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double total = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    total += w(i);
    mean += w(i) * u[i];
  }
  mean /= total;
  double scale = 0.0;
  for (double x : u) scale = std::max(scale, std::abs(x - mean));
  if (scale == 0.0) scale = 1.0;

  const std::size_t n = static_cast<std::size_t>(degree) + 1;
  Matrix normal(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  std::vector<double> powers(2 * n - 1);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = (u[i] - mean) / scale;
    powers[0] = 1.0;
    for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * t;
    for (std::size_t r = 0; r < n; ++r) {
      rhs[r] += w(i) * v[i] * powers[r];
      for (std::size_t c = 0; c < n; ++c) normal[r][c] += w(i) * powers[r + c];
    }
  }

  Matrix inv;
  if (!invert(normal, inv)) throw IllConditioned("singular normal equations");
  const double condition = norm1(normal) * norm1(inv);
  if (!(condition <= maxCondition)) throw IllConditioned("normal-equation condition estimate exceeds limit");

  std::vector<double> ct(n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) ct[r] += inv[r][c] * rhs[c];
  // One step of iterative refinement.
  std::vector<double> resid = rhs;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) resid[r] -= normal[r][c] * ct[c];
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) ct[r] += inv[r][c] * resid[c];

  // Expand sum_k ct_k ((u - mean)/scale)^k into the raw-u basis.
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double ck = ct[k] / std::pow(scale, static_cast<double>(k));
    for (std::size_t j = 0; j <= k; ++j)
      out[j] += ck * binomial(static_cast<int>(k), static_cast<int>(j)) * std::pow(-mean, static_cast<double>(k - j));
  }
  return out;
}

CurveModel fit_curve(std::span<const RgbPoint> colors, std::span<const double> weights, const CurveFitOptions& options) {
  if (colors.size() < 4) throw DegenerateInput("curve fit needs at least 4 palette colors");
  const PlaneFrame frame = fit_plane(colors, weights);
  return build_model(frame, colors, weights, options);
}

CurveModel fit_curve(const Palette& palette, const CurveFitOptions& options) {
  const std::vector<double> w = options.weightByCount ? palette.weights() : std::vector<double>{};
  Provenance prov;
  prov.quantizer = std::string(to_string(palette.method));
  prov.paletteSize = static_cast<int>(palette.colors.size());
  return fit_curve(palette.colors, w, options).with_provenance(std::move(prov));
}

CurveModel fit_curve_in_frame(std::span<const RgbPoint> colors, const PlaneFrame& frame,
                              std::span<const double> weights, const CurveFitOptions& options) {
  if (colors.size() < 4) throw DegenerateInput("curve fit needs at least 4 colors");
  return build_model(frame, colors, weights, options);
}

std::vector<double> fit_residuals(const CurveModel& model, std::span<const RgbPoint> colors) {
  std::vector<double> out;
  out.reserve(colors.size());
  for (const auto& c : colors) {
    const PlaneCoords pc = model.plane().project(c);
    out.push_back(pc.v - model.evaluate(pc.u));
  }
  return out;
}

CurveDistance distance_to_curve(const RgbPoint& query, const CurveModel& model) { return model.nearest(query); }

OutlierMask outlier_mask(const RasterImage& image, const CurveModel& model, double dT) {
  OutlierMask out{Mask(image.width(), image.height()), 0.0};
  const auto px = image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) out.mask.set(i, !(model.nearest(px[i]).distance < dT));
  out.outlierFraction = static_cast<double>(out.mask.count()) / static_cast<double>(px.size());
  return out;
}

std::string serialize_model(const CurveModel& model) {
  nlohmann::ordered_json doc;
  doc["version"] = kModelDocumentVersion;
  const PlaneFrame& p = model.plane();
  doc["plane"] = {{"origin", vec_json(p.origin)},
                  {"axisU", vec_json(p.axisU)},
                  {"axisV", vec_json(p.axisV)},
                  {"normal", vec_json(p.normal)}};
  doc["coefficients"] = model.coefficients();
  doc["uDomain"] = {model.u_min(), model.u_max()};
  doc["sampleCount"] = model.sample_count();
  doc["arcLength"] = model.arc_length();
  doc["planarity"] = {model.planarity().v1, model.planarity().v2};
  doc["provenance"] = {{"sourceHash", model.provenance().sourceHash},
                       {"quantizer", model.provenance().quantizer},
                       {"paletteSize", model.provenance().paletteSize}};
  return doc.dump(2) + "\n";
}

CurveModel deserialize_model(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedDocument(std::string("model document is not valid JSON: ") + e.what());
  }
  const auto& version = require(doc, "version");
  if (!version.is_number_integer()) throw MalformedDocument("model version must be an integer");
  if (version.get<int>() != kModelDocumentVersion)
    throw VersionMismatch("model document version " + version.dump() + " is not supported (expected " +
                          std::to_string(kModelDocumentVersion) + ")");

  const auto& plane = require(doc, "plane");
  PlaneFrame frame;
  frame.origin = vec_from(require(plane, "origin"), "plane.origin");
  frame.axisU = vec_from(require(plane, "axisU"), "plane.axisU");
  frame.axisV = vec_from(require(plane, "axisV"), "plane.axisV");
  frame.normal = vec_from(require(plane, "normal"), "plane.normal");

  const auto& cj = require(doc, "coefficients");
  if (!cj.is_array() || cj.size() != 4) throw MalformedDocument("model needs 4 coefficients");
  std::array<double, 4> coeffs{};
  for (std::size_t k = 0; k < 4; ++k) coeffs[k] = number(cj[k], "coefficients");

  const auto& dom = require(doc, "uDomain");
  if (!dom.is_array() || dom.size() != 2) throw MalformedDocument("uDomain must have 2 entries");
  const auto& sc = require(doc, "sampleCount");
  if (!sc.is_number_integer()) throw MalformedDocument("sampleCount must be an integer");
  const double storedArc = number(require(doc, "arcLength"), "arcLength");

  PlanarityMeasure pm;
  if (doc.contains("planarity")) {
    const auto& pj = doc.at("planarity");
    if (!pj.is_array() || pj.size() != 2) throw MalformedDocument("planarity must have 2 entries");
    pm = {number(pj[0], "planarity"), number(pj[1], "planarity")};
  }
  Provenance prov;
  if (doc.contains("provenance")) {
    const auto& pj = doc.at("provenance");
    try {
      prov.sourceHash = pj.value("sourceHash", std::string{});
      prov.quantizer = pj.value("quantizer", std::string{});
      prov.paletteSize = pj.value("paletteSize", 0);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedDocument(std::string("bad provenance: ") + e.what());
    }
  }

  CurveModel model = CurveModel::from_parameters(frame, coeffs, number(dom[0], "uDomain"), number(dom[1], "uDomain"),
                                                 sc.get<int>(), pm, std::move(prov));
  if (std::abs(model.arc_length() - storedArc) > 1e-6)
    throw MalformedDocument("stored arcLength disagrees with the curve it describes");
  return model;
}

}  // namespace chromacurve
