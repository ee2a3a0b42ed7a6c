// chromacurve command-line driver.
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chromacurve/chromacurve.hpp"

namespace cc = chromacurve;

namespace {

// Flag values as given on the command line; unset means "not passed".
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> method;
  std::optional<int> paletteSize;
  std::optional<double> dT, lS, lT, kappa, extrapolation;
  std::optional<double> shadingThreshold, reflectanceThreshold;
  std::optional<std::uint64_t> seed;
  std::optional<int> minRegionPixels;
  std::optional<std::string> coverage;
  std::optional<bool> weightByCount, trimToCube;
  std::optional<std::string> reportFormat;
  std::optional<int> jobs;
  std::optional<std::string> kind;
  std::optional<int> width, height;
  std::optional<std::string> outDir, model;
  std::vector<std::string> inputs;
};

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "JSON config file (keys mirror the long flag names)");
  sub.add_option("--out-dir", f.outDir, "Output directory (default: $" + std::string(cc::kOutDirEnv) + " or .)");
  sub.add_option("--report-format", f.reportFormat, "Report format")->check(CLI::IsMember({"text", "csv"}));
  sub.add_option("--seed", f.seed, "Random seed");
  sub.add_option("--jobs", f.jobs, "Images processed in parallel");
}

void add_quantizer(CLI::App& sub, Flags& f) {
  sub.add_option("--method", f.method, "minimum-variance | median-cut | octree | k-means");
  sub.add_option("--palette-size", f.paletteSize, "Palette size (default 256)");
}

void add_fit(CLI::App& sub, Flags& f) {
  sub.add_option("--extrapolation", f.extrapolation, "Curve domain extension per side (default 0.1)");
  sub.add_flag("--weight-by-count,!--no-weight-by-count", f.weightByCount, "Weight palette colors by pixel count");
  sub.add_flag("--trim-to-cube,!--no-trim-to-cube", f.trimToCube, "Trim curve ends outside the inflated RGB cube");
}

void add_matching(CLI::App& sub, Flags& f) {
  sub.add_option("--model", f.model, "Model document written by 'fit'");
  sub.add_option("--ls", f.lS, "Vote threshold per curve sample (default 10)");
  sub.add_option("--coverage", f.coverage, "Covered segments need both or either endpoint kept")
      ->check(CLI::IsMember({"both", "either"}));
}

void add_inputs(CLI::App& sub, Flags& f) {
  sub.add_option("inputs", f.inputs, "Input images (PNG or JPEG)")->required();
}

template <typename T, typename U>
void set_if(const std::optional<T>& v, U& target) {
  if (v) target = static_cast<U>(*v);
}

cc::RunConfig build_config(cc::Command command, const Flags& f) {
  cc::RunConfig c;
  c.command = command;
  if (const char* env = std::getenv(cc::kOutDirEnv); env && *env) c.outDir = env;
  if (f.config) {
    const auto bytes = cc::read_file(*f.config);
    c = cc::apply_config_document(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), c);
  }
  cc::RunParameters& p = c.params;
  if (f.method) p.method = cc::parse_quantizer_method(*f.method);
  set_if(f.paletteSize, p.paletteSize);
  set_if(f.dT, p.dT);
  set_if(f.lS, p.lS);
  set_if(f.lT, p.lT);
  set_if(f.kappa, p.kappa);
  set_if(f.extrapolation, p.extrapolation);
  set_if(f.shadingThreshold, p.thresholds.shadingMinV1);
  set_if(f.reflectanceThreshold, p.thresholds.reflectanceMaxV1);
  set_if(f.seed, p.seed);
  set_if(f.minRegionPixels, p.minRegionPixels);
  if (f.coverage) p.coverage = *f.coverage == "either" ? cc::CoverageRule::EitherEndpoint : cc::CoverageRule::BothEndpoints;
  set_if(f.weightByCount, p.weightByCount);
  set_if(f.trimToCube, p.trimToCube);
  if (f.reportFormat) p.reportFormat = *f.reportFormat == "csv" ? cc::ReportFormat::Csv : cc::ReportFormat::Text;
  set_if(f.jobs, p.jobs);
  if (f.kind) p.kind = cc::parse_synthetic_kind(*f.kind);
  set_if(f.width, p.width);
  set_if(f.height, p.height);
  if (f.outDir) c.outDir = *f.outDir;
  if (f.model) c.modelPath = *f.model;
  for (const auto& in : f.inputs) c.inputs.emplace_back(in);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar cubic color models: quantize, fit, classify, detect and recognize materials"};
  app.require_subcommand(1);
  Flags f;
  std::map<CLI::App*, cc::Command> commands;

  auto* quantize = app.add_subcommand("quantize", "Quantize images and report reconstruction error");
  add_common(*quantize, f);
  add_quantizer(*quantize, f);
  add_inputs(*quantize, f);
  commands[quantize] = cc::Command::Quantize;

  auto* fit = app.add_subcommand("fit", "Fit a color model to exemplar images");
  add_common(*fit, f);
  add_quantizer(*fit, f);
  add_fit(*fit, f);
  fit->add_option("--dt", f.dT, "Outlier distance threshold (default 25)");
  add_inputs(*fit, f);
  commands[fit] = cc::Command::Fit;

  auto* classify = app.add_subcommand("classify", "Label color variation as shading, reflectance or ambiguous");
  add_common(*classify, f);
  add_quantizer(*classify, f);
  classify->add_option("--shading-threshold", f.shadingThreshold, "Minimum v1 for shading (default 96)");
  classify->add_option("--reflectance-threshold", f.reflectanceThreshold, "v1 below this is reflectance (default 89)");
  add_inputs(*classify, f);
  commands[classify] = cc::Command::Classify;

  auto* detect = app.add_subcommand("detect", "Detect regions matching a model");
  add_common(*detect, f);
  add_matching(*detect, f);
  detect->add_option("--dt", f.dT, "Conformity distance threshold (default 25)");
  detect->add_option("--lt", f.lT, "Coverage length needed to accept a region (default 150)");
  detect->add_option("--min-region-pixels", f.minRegionPixels, "Smallest region kept (default 50)");
  add_inputs(*detect, f);
  commands[detect] = cc::Command::Detect;

  auto* recognize = app.add_subcommand("recognize", "Score how well whole images match a model");
  add_common(*recognize, f);
  add_matching(*recognize, f);
  recognize->add_option("--dt", f.dT, "Conformity distance threshold (default 25)");
  recognize->add_option("--kappa", f.kappa, "Adaptive vote threshold factor (default 0.02)");
  add_inputs(*recognize, f);
  commands[recognize] = cc::Command::Recognize;

  auto* compare = app.add_subcommand("compare-quantizers", "Planarity measure under all four quantizers");
  add_common(*compare, f);
  compare->add_option("--palette-size", f.paletteSize, "Palette size (default 256)");
  add_inputs(*compare, f);
  commands[compare] = cc::Command::CompareQuantizers;

  auto* render = app.add_subcommand("render-synthetic", "Write a seeded synthetic test image");
  add_common(*render, f);
  render->add_option("--kind", f.kind, "Scene kind")->check(CLI::IsMember({"lambertian", "material", "two-material"}));
  render->add_option("--width", f.width, "Width in pixels (default 256)");
  render->add_option("--height", f.height, "Height in pixels (default 256)");
  commands[render] = cc::Command::RenderSynthetic;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cc::kExitConfig;
  }

  cc::Command command{};
  for (const auto& [sub, cmd] : commands)
    if (sub->parsed()) command = cmd;

  cc::RunConfig config;
  try {
    config = build_config(command, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    const int code = cc::exit_code_for(e);
    // A missing or unreadable config file is a configuration problem.
    return code == cc::kExitDecode || code == cc::kExitInternal ? cc::kExitConfig : code;
  }
  return cc::run(config, std::cerr);
}
