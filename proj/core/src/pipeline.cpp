#include "chromacurve/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "chromacurve/curve_model.hpp"
#include "chromacurve/error.hpp"
#include "chromacurve/image_io.hpp"
#include "chromacurve/synthetic.hpp"

namespace chromacurve {
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Ordered key/value report rendered as "key: value" lines or a two-row CSV.
class KeyValueReport {
 public:
  KeyValueReport& add(std::string key, std::string value) {
    rows_.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  KeyValueReport& add(std::string key, double value) { return add(std::move(key), num(value)); }
  KeyValueReport& add_int(std::string key, long long value) { return add(std::move(key), std::to_string(value)); }

  std::string render(ReportFormat format) const {
    std::string out;
    if (format == ReportFormat::Text) {
      for (const auto& [k, v] : rows_) out += k + ": " + v + "\n";
      return out;
    }
    std::string header, values;
    for (const auto& [k, v] : rows_) {
      header += (header.empty() ? "" : ",") + k;
      values += (values.empty() ? "" : ",") + v;
    }
    return header + "\n" + values + "\n";
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::string_view coverage_name(CoverageRule r) { return r == CoverageRule::BothEndpoints ? "both" : "either"; }

const char* report_ext(ReportFormat f) { return f == ReportFormat::Text ? ".txt" : ".csv"; }

struct Context {
  const RunConfig& config;
  std::ostream& log;
  std::mutex& logMutex;

  void note(const std::string& line) const {
    std::lock_guard lock(logMutex);
    log << line << '\n';
  }
  fs::path out(const fs::path& input, const std::string& suffix) const {
    return config.outDir / (input.stem().string() + suffix);
  }
  fs::path report_path(const fs::path& input, const std::string& name) const {
    return out(input, "." + name + report_ext(config.params.reportFormat));
  }
};

RasterImage load(const Context& ctx, const fs::path& input) {
  DecodedImage d = decode_image_file(input);
  for (const auto& w : d.warnings) ctx.note("warning: " + input.string() + ": " + w);
  if (d.image.size() < 250000)
    ctx.note("warning: " + input.string() + ": image is below 0.25 MP; color statistics may be unreliable");
  return std::move(d.image);
}

CurveModel load_model(const RunConfig& config) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file(*config.modelPath);
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  return deserialize_model(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

QuantizeOptions quantize_options(const RunParameters& p) {
  QuantizeOptions q;
  q.paletteSize = p.paletteSize;
  q.seed = p.seed;
  return q;
}

CurveFitOptions fit_options(const RunParameters& p) {
  CurveFitOptions o;
  o.extrapolationFraction = p.extrapolation;
  o.weightByCount = p.weightByCount;
  o.trimToCube = p.trimToCube;
  o.cubeMargin = p.dT;
  return o;
}

void do_quantize(const Context& ctx, const fs::path& input) {
  const RunParameters& p = ctx.config.params;
  const RasterImage image = load(ctx, input);
  const Palette palette = quantize(image, p.method, quantize_options(p));
  const ErrorHistogram hist = error_histogram(image, palette);
  KeyValueReport r;
  r.add("method", std::string(to_string(palette.method)))
      .add_int("palette_colors", static_cast<long long>(palette.colors.size()))
      .add("mean_error", hist.meanError)
      .add("max_error", hist.maxError)
      .add("fraction_below_10", hist.fraction_below(10.0));
  if (palette.colors.size() >= 2) {
    try {
      const PlanarityMeasure pm = planarity_measure(palette.colors, p.weightByCount ? palette.weights() : std::vector<double>{});
      r.add("pm_v1", pm.v1).add("pm_v2", pm.v2);
    } catch (const DegenerateInput&) {
    }
  }
  write_file_atomic(ctx.out(input, ".palette.json"), palette_to_json(palette));
  write_file_atomic(ctx.out(input, ".histogram.csv"), histogram_to_csv(hist));
  write_file_atomic(ctx.out(input, ".quantized.png"), encode_png(palette.reconstruct()));
  write_file_atomic(ctx.report_path(input, "quantize"), r.render(p.reportFormat));
}

void do_fit(const Context& ctx, const fs::path& input) {
  const RunParameters& p = ctx.config.params;
  const RasterImage image = load(ctx, input);
  const Palette palette = quantize(image, p.method, quantize_options(p));
  CurveModel model = fit_curve(palette, fit_options(p));
  Provenance prov = model.provenance();
  prov.sourceHash = content_hash(image);
  model = model.with_provenance(prov);
  const OutlierMask outliers = outlier_mask(image, model, p.dT);

  KeyValueReport r;
  r.add("source_hash", prov.sourceHash)
      .add("quantizer", prov.quantizer)
      .add_int("palette_colors", prov.paletteSize)
      .add("pm_v1", model.planarity().v1)
      .add("pm_v2", model.planarity().v2);
  for (int k = 0; k < 4; ++k) r.add("a" + std::to_string(k), model.coefficients()[static_cast<std::size_t>(k)]);
  r.add("u_min", model.u_min())
      .add("u_max", model.u_max())
      .add_int("samples", static_cast<long long>(model.sample_count()))
      .add("arc_length", model.arc_length())
      .add("dt", p.dT)
      .add("outlier_fraction", outliers.outlierFraction);

  write_file_atomic(ctx.out(input, ".model.json"), serialize_model(model));
  write_file_atomic(ctx.out(input, ".outliers.png"), encode_png(render_overlay(image, outliers.mask, kRed)));
  write_file_atomic(ctx.report_path(input, "fit"), r.render(p.reportFormat));
}

void do_classify(const Context& ctx, const fs::path& input) {
  const RunParameters& p = ctx.config.params;
  const RasterImage image = load(ctx, input);
  const Palette palette = quantize(image, p.method, quantize_options(p));
  const VariationLabel label = classify_variation(palette.colors, p.thresholds);
  write_file_atomic(ctx.report_path(input, "classify"), classification_report(label, p.thresholds, p.reportFormat));
}

void do_detect(const Context& ctx, const fs::path& input, const CurveModel& model) {
  const RunParameters& p = ctx.config.params;
  const RasterImage image = load(ctx, input);
  DetectionParams dp;
  dp.dT = p.dT;
  dp.lS = p.lS;
  dp.lT = p.lT;
  dp.minRegionPixels = p.minRegionPixels;
  dp.coverage = p.coverage;
  const DetectionResult result = detect(image, model, dp);
  Mask outliers(image.width(), image.height());
  for (std::size_t i = 0; i < outliers.size(); ++i) outliers.set(i, !result.conformityMask[i]);
  write_file_atomic(ctx.out(input, ".mask.png"), encode_png(result.accepted_mask()));
  write_file_atomic(ctx.out(input, ".overlay.png"), encode_png(render_overlay(image, outliers, kRed)));
  write_file_atomic(ctx.report_path(input, "detect"), detection_report(result, p.reportFormat));
}

void do_recognize(const Context& ctx, const fs::path& input, const CurveModel& model) {
  const RunParameters& p = ctx.config.params;
  const RasterImage image = load(ctx, input);
  RecognitionParams rp;
  rp.dT = p.dT;
  rp.kappa = p.kappa;
  rp.lSFloor = p.lS;
  rp.coverage = p.coverage;
  const RecognitionScore score = recognize(image, model, rp);
  write_file_atomic(ctx.report_path(input, "recognize"), recognition_report(score, model.arc_length(), p.reportFormat));
}

void do_compare(const Context& ctx, const fs::path& input) {
  const RunParameters& p = ctx.config.params;
  const RasterImage image = load(ctx, input);
  KeyValueReport r;
  std::vector<PlanarityMeasure> pms;
  for (QuantizerMethod m : kAllQuantizers) {
    const Palette palette = quantize(image, m, quantize_options(p));
    const PlanarityMeasure pm = planarity_measure(palette.colors, p.weightByCount ? palette.weights() : std::vector<double>{});
    const std::string name(to_string(m));
    r.add(name + ".v1", pm.v1).add(name + ".v2", pm.v2);
    pms.push_back(pm);
  }
  double maxDv1 = 0.0, maxDv2 = 0.0;
  for (std::size_t i = 0; i < pms.size(); ++i)
    for (std::size_t j = i + 1; j < pms.size(); ++j) {
      maxDv1 = std::max(maxDv1, std::abs(pms[i].v1 - pms[j].v1));
      maxDv2 = std::max(maxDv2, std::abs(pms[i].v2 - pms[j].v2));
    }
  r.add("max_delta_v1", maxDv1).add("max_delta_v2", maxDv2);
  write_file_atomic(ctx.report_path(input, "compare"), r.render(p.reportFormat));
}

void do_render(const Context& ctx) {
  const RunParameters& p = ctx.config.params;
  const std::string stem = "synthetic-" + std::string(to_string(p.kind)) + "-" + std::to_string(p.seed);
  const fs::path base = ctx.config.outDir / stem;
  switch (p.kind) {
    case SyntheticKind::Lambertian: {
      const auto scene = synthetic::random_lambertian_scene(p.width, p.height, p.seed);
      write_file_atomic(fs::path(base.string() + ".png"), encode_png(synthesize_lambertian(scene)));
      break;
    }
    case SyntheticKind::Material: {
      const auto material = synthetic::random_cubic_material(p.seed);
      write_file_atomic(fs::path(base.string() + ".png"),
                        encode_png(synthetic::render_material(material, p.width, p.height, p.seed, 2.0)));
      break;
    }
    case SyntheticKind::TwoMaterial: {
      const auto material = synthetic::random_cubic_material(p.seed);
      const auto scene = synthetic::two_material_scene(material, p.width, p.height, p.seed + 1, 2.0);
      write_file_atomic(fs::path(base.string() + ".png"), encode_png(scene.image));
      write_file_atomic(fs::path(base.string() + ".truth.png"), encode_png(scene.truth));
      break;
    }
  }
}

template <typename T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Quantize: return "quantize";
    case Command::Fit: return "fit";
    case Command::Classify: return "classify";
    case Command::Detect: return "detect";
    case Command::Recognize: return "recognize";
    case Command::CompareQuantizers: return "compare-quantizers";
    case Command::RenderSynthetic: return "render-synthetic";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::Quantize, Command::Fit, Command::Classify, Command::Detect, Command::Recognize,
                    Command::CompareQuantizers, Command::RenderSynthetic})
    if (to_string(c) == name) return c;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::Lambertian: return "lambertian";
    case SyntheticKind::Material: return "material";
    case SyntheticKind::TwoMaterial: return "two-material";
  }
  return "unknown";
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  for (SyntheticKind k : {SyntheticKind::Lambertian, SyntheticKind::Material, SyntheticKind::TwoMaterial})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown synthetic kind '" + std::string(name) + "'");
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const UnsupportedMethod*>(&error)) return kExitConfig;
  if (dynamic_cast<const DecodeError*>(&error) || dynamic_cast<const MalformedDocument*>(&error) ||
      dynamic_cast<const VersionMismatch*>(&error))
    return kExitDecode;
  if (dynamic_cast<const DegenerateInput*>(&error) || dynamic_cast<const IllConditioned*>(&error)) return kExitFit;
  return kExitInternal;
}

RunConfig apply_config_document(std::string_view json, RunConfig base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunParameters& p = base.params;
  for (const auto& [key, v] : doc.items()) {
    if (key == "method") p.method = parse_quantizer_method(get_as<std::string>(v, key));
    else if (key == "palette-size") p.paletteSize = get_as<int>(v, key);
    else if (key == "dt") p.dT = get_as<double>(v, key);
    else if (key == "ls") p.lS = get_as<double>(v, key);
    else if (key == "lt") p.lT = get_as<double>(v, key);
    else if (key == "kappa") p.kappa = get_as<double>(v, key);
    else if (key == "extrapolation") p.extrapolation = get_as<double>(v, key);
    else if (key == "seed") p.seed = get_as<std::uint64_t>(v, key);
    else if (key == "shading-threshold") p.thresholds.shadingMinV1 = get_as<double>(v, key);
    else if (key == "reflectance-threshold") p.thresholds.reflectanceMaxV1 = get_as<double>(v, key);
    else if (key == "min-region-pixels") p.minRegionPixels = get_as<int>(v, key);
    else if (key == "coverage") {
      const auto s = get_as<std::string>(v, key);
      if (s == "both") p.coverage = CoverageRule::BothEndpoints;
      else if (s == "either") p.coverage = CoverageRule::EitherEndpoint;
      else throw ConfigError("coverage must be 'both' or 'either'");
    } else if (key == "weight-by-count") p.weightByCount = get_as<bool>(v, key);
    else if (key == "trim-to-cube") p.trimToCube = get_as<bool>(v, key);
    else if (key == "report-format") {
      const auto s = get_as<std::string>(v, key);
      if (s == "text") p.reportFormat = ReportFormat::Text;
      else if (s == "csv") p.reportFormat = ReportFormat::Csv;
      else throw ConfigError("report-format must be 'text' or 'csv'");
    } else if (key == "jobs") p.jobs = get_as<int>(v, key);
    else if (key == "kind") p.kind = parse_synthetic_kind(get_as<std::string>(v, key));
    else if (key == "width") p.width = get_as<int>(v, key);
    else if (key == "height") p.height = get_as<int>(v, key);
    else if (key == "out-dir") base.outDir = get_as<std::string>(v, key);
    else if (key == "model") base.modelPath = fs::path(get_as<std::string>(v, key));
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return base;
}

void validate(const RunConfig& c) {
  const RunParameters& p = c.params;
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(p.paletteSize >= 1 && p.paletteSize <= 65536, "palette-size must be in [1, 65536]");
  require(std::isfinite(p.dT) && p.dT > 0.0, "dt must be positive");
  require(std::isfinite(p.lS) && p.lS >= 0.0, "ls must be nonnegative");
  require(p.lT >= 0.0 && !std::isnan(p.lT), "lt must be nonnegative");
  require(std::isfinite(p.kappa) && p.kappa >= 0.0, "kappa must be nonnegative");
  require(p.extrapolation >= 0.0 && p.extrapolation <= 1.0, "extrapolation must be in [0, 1]");
  require(p.thresholds.shadingMinV1 >= 0.0 && p.thresholds.shadingMinV1 <= 100.0, "shading-threshold must be in [0, 100]");
  require(p.thresholds.reflectanceMaxV1 >= 0.0 && p.thresholds.reflectanceMaxV1 <= p.thresholds.shadingMinV1,
          "reflectance-threshold must be in [0, shading-threshold]");
  require(p.minRegionPixels >= 1, "min-region-pixels must be at least 1");
  require(p.jobs >= 1 && p.jobs <= 256, "jobs must be in [1, 256]");
  require(p.width >= 1 && p.width <= 16384 && p.height >= 1 && p.height <= 16384, "width/height must be in [1, 16384]");

  if (c.command == Command::RenderSynthetic) return;
  require(!c.inputs.empty(), "at least one input image is required");
  if (c.command == Command::Detect || c.command == Command::Recognize)
    require(c.modelPath.has_value(), "--model is required for detect and recognize");
  std::set<std::string> stems;
  for (const auto& in : c.inputs)
    if (!stems.insert(in.stem().string()).second)
      throw ConfigError("two inputs share the file stem '" + in.stem().string() + "'; outputs would collide");
}

int run(const RunConfig& config, std::ostream& log) {
  std::mutex logMutex;
  const Context ctx{config, log, logMutex};
  auto report_failure = [&](const std::string& where, const std::exception& e) {
    const int code = exit_code_for(e);
    ctx.note("error: " + where + ": " + e.what());
    return code;
  };

  std::optional<CurveModel> model;
  try {
    validate(config);
    fs::create_directories(config.outDir);
    if (config.command == Command::RenderSynthetic) {
      do_render(ctx);
      return kExitOk;
    }
    if (config.command == Command::Detect || config.command == Command::Recognize) model = load_model(config);
  } catch (const std::exception& e) {
    return report_failure(std::string(to_string(config.command)), e);
  }

  std::vector<int> codes(config.inputs.size(), kExitOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.inputs.size(); i = next++) {
      const fs::path& input = config.inputs[i];
      try {
        switch (config.command) {
          case Command::Quantize: do_quantize(ctx, input); break;
          case Command::Fit: do_fit(ctx, input); break;
          case Command::Classify: do_classify(ctx, input); break;
          case Command::Detect: do_detect(ctx, input, *model); break;
          case Command::Recognize: do_recognize(ctx, input, *model); break;
          case Command::CompareQuantizers: do_compare(ctx, input); break;
          case Command::RenderSynthetic: break;
        }
      } catch (const std::exception& e) {
        codes[i] = report_failure(input.string(), e);
      }
    }
  };
  const int workers = std::min<int>(config.params.jobs, static_cast<int>(config.inputs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (int code : codes)
    if (code != kExitOk) return code;
  return kExitOk;
}

RasterImage render_overlay(const RasterImage& image, const Mask& mask, const RgbPoint& tint) {
  if (!mask.same_shape(image)) throw MismatchedDimensions("overlay mask does not match the image");
  RasterImage out = image;
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i)
    if (mask[i]) px[i] = tint;
  return out;
}

std::string detection_report(const DetectionResult& result, ReportFormat format) {
  const auto& rs = result.regions;
  if (format == ReportFormat::Csv) {
    std::string out = "region,pixels,coverage_length,accepted\n";
    for (std::size_t i = 0; i < rs.size(); ++i)
      out += std::to_string(i) + "," + std::to_string(rs[i].pixels.size()) + "," + num(rs[i].coverageLength) + "," +
             (rs[i].accepted ? "true" : "false") + "\n";
    return out;
  }
  KeyValueReport r;
  r.add("dt", result.params.dT)
      .add("ls", result.params.lS)
      .add("lt", result.params.lT)
      .add("coverage_rule", std::string(coverage_name(result.params.coverage)))
      .add_int("conforming_pixels", static_cast<long long>(result.conformityMask.count()))
      .add_int("regions", static_cast<long long>(rs.size()))
      .add_int("accepted_regions", static_cast<long long>(result.accepted_count()));
  for (std::size_t i = 0; i < rs.size(); ++i)
    r.add("region." + std::to_string(i),
          "pixels=" + std::to_string(rs[i].pixels.size()) + " coverage_length=" + num(rs[i].coverageLength) +
              " accepted=" + (rs[i].accepted ? "true" : "false"));
  return r.render(format);
}

std::string classification_report(const VariationLabel& label, const ShadingThresholds& thresholds,
                                   ReportFormat format) {
  KeyValueReport r;
  r.add("label", std::string(to_string(label.label)))
      .add("v1", label.pm.v1)
      .add("v2", label.pm.v2)
      .add("line_residual", label.lineResidual)
      .add("shading_threshold", thresholds.shadingMinV1)
      .add("reflectance_threshold", thresholds.reflectanceMaxV1);
  return r.render(format);
}

std::string recognition_report(const RecognitionScore& score, double arcLength, ReportFormat format) {
  KeyValueReport r;
  r.add("score", score.score)
      .add_int("adaptive_ls", score.adaptiveLs)
      .add_int("conforming_pixels", static_cast<long long>(score.conformingPixels))
      .add("arc_length", arcLength);
  return r.render(format);
}

}  // namespace chromacurve
