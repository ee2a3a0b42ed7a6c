#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chromacurve/matcher.hpp"
#include "chromacurve/quantize.hpp"
#include "chromacurve/raster.hpp"
#include "chromacurve/shading.hpp"

namespace chromacurve {

enum class Command { Quantize, Fit, Classify, Detect, Recognize, CompareQuantizers, RenderSynthetic };
enum class ReportFormat { Text, Csv };
enum class SyntheticKind { Lambertian, Material, TwoMaterial };

std::string_view to_string(Command command);
Command parse_command(std::string_view name);  // throws ConfigError
std::string_view to_string(SyntheticKind kind);
SyntheticKind parse_synthetic_kind(std::string_view name);  // throws ConfigError

// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDecode = 3, kExitFit = 4, kExitInternal = 5 };

// Maps an in-flight exception to its exit code.
int exit_code_for(const std::exception& error);

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "CHROMACURVE_OUT_DIR";

struct RunParameters {
  QuantizerMethod method = QuantizerMethod::MinimumVariance;
  int paletteSize = 256;
  double dT = 25.0;
  double lS = 10.0;
  double lT = 150.0;
  double kappa = 0.02;
  double extrapolation = 0.10;
  ShadingThresholds thresholds;
  std::uint64_t seed = 0;
  int minRegionPixels = 50;
  CoverageRule coverage = CoverageRule::BothEndpoints;
  bool weightByCount = false;
  bool trimToCube = true;
  ReportFormat reportFormat = ReportFormat::Text;
  int jobs = 1;
  // render-synthetic only.
  SyntheticKind kind = SyntheticKind::Material;
  int width = 256;
  int height = 256;
};

struct RunConfig {
  Command command = Command::Fit;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path outDir = ".";
  std::optional<std::filesystem::path> modelPath;
  RunParameters params;
};

// Applies a JSON config document on top of `base`. Keys mirror the CLI flag
// names ("palette-size", "dt", ...). Unknown keys and out-of-range values
// throw ConfigError.
RunConfig apply_config_document(std::string_view json, RunConfig base);

// Throws ConfigError when a parameter is outside its documented range or a
// command is missing required inputs.
void validate(const RunConfig& config);

// Runs one command over all inputs, writing artifacts into config.outDir.
// Diagnostics go to `log`. Returns an ExitCode; never throws.
int run(const RunConfig& config, std::ostream& log);

// Replaces masked pixels with `tint`. Throws MismatchedDimensions.
RasterImage render_overlay(const RasterImage& image, const Mask& mask, const RgbPoint& tint);

inline constexpr RgbPoint kRed{255, 0, 0};
inline constexpr RgbPoint kGreen{0, 255, 0};

// Structured reports, byte-stable for identical inputs.
std::string detection_report(const DetectionResult& result, ReportFormat format);
std::string classification_report(const VariationLabel& label, const ShadingThresholds& thresholds,
                                   ReportFormat format);
std::string recognition_report(const RecognitionScore& score, double arcLength, ReportFormat format);

}  // namespace chromacurve
