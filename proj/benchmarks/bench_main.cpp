#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "chromacurve/chromacurve.hpp"

using namespace chromacurve;

namespace {

const RasterImage& material_image(int size) {
  static std::map<int, RasterImage> cache;
  auto it = cache.find(size);
  if (it == cache.end())
    it = cache.emplace(size, synthetic::render_material(synthetic::random_cubic_material(1), size, size, 1, 3.0)).first;
  return it->second;
}

const CurveModel& material_model() {
  static const CurveModel m = fit_curve(quantize(material_image(256), QuantizerMethod::MinimumVariance));
  return m;
}

void BM_Quantize(benchmark::State& state) {
  const auto method = kAllQuantizers[state.range(0)];
  const RasterImage& img = material_image(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(quantize(img, method));
  state.SetLabel(std::string(to_string(method)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(img.size()));
}
BENCHMARK(BM_Quantize)->ArgsProduct({{0, 1, 2, 3}, {256, 512}})->Unit(benchmark::kMillisecond);

void BM_FitCurve(benchmark::State& state) {
  const Palette pal = quantize(material_image(256), QuantizerMethod::MinimumVariance);
  for (auto _ : state) benchmark::DoNotOptimize(fit_curve(pal));
}
BENCHMARK(BM_FitCurve)->Unit(benchmark::kMicrosecond);

void BM_DistanceToCurve(benchmark::State& state) {
  const CurveModel& m = material_model();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(0, 255);
  std::vector<RgbPoint> queries(4096);
  for (auto& q : queries) q = {c(rng), c(rng), c(rng)};
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(distance_to_curve(queries[i++ & 4095], m));
}
BENCHMARK(BM_DistanceToCurve);

void BM_Detect(benchmark::State& state) {
  const auto scene = synthetic::two_material_scene(synthetic::random_cubic_material(1), static_cast<int>(state.range(0)),
                                                   static_cast<int>(state.range(0)), 2, 3.0);
  const CurveModel& m = material_model();
  for (auto _ : state) benchmark::DoNotOptimize(detect(scene.image, m));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(scene.image.size()));
}
BENCHMARK(BM_Detect)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Recognize(benchmark::State& state) {
  const CurveModel& m = material_model();
  const RasterImage& img = material_image(512);
  for (auto _ : state) benchmark::DoNotOptimize(recognize(img, m));
}
BENCHMARK(BM_Recognize)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
