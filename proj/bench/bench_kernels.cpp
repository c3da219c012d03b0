// Serial vs OpenMP evaluation kernels over a synthetic test set.

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "casp/kernels.hpp"
#include "casp/model.hpp"
#include "casp/stream.hpp"

namespace {

struct Fixture {
  casp::ModelParams params;
  std::vector<casp::Sample> samples;
};

const Fixture& fixture(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  casp::StreamConfig cfg;
  cfg.tasks = 1;
  cfg.classes_per_task = 10;
  cfg.train_per_class = n / 10;
  cfg.test_per_class = 1;
  cfg.feature_dim = 64;
  Fixture f{casp::ModelParams::glorot(64, 128, 10, 1), casp::make_gaussian_stream(cfg)[0].train};
  return cache.emplace(n, std::move(f)).first->second;
}

void BM_ConfidencesSerial(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.samples.size());
  for (auto _ : state) {
    casp::kernels::serial::target_confidences(f.params, f.samples, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.samples.size()));
}

void BM_ConfidencesOmp(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.samples.size());
  for (auto _ : state) {
    casp::kernels::omp::target_confidences(f.params, f.samples, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.samples.size()));
}

void BM_CountCorrectSerial(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(casp::kernels::serial::count_correct(f.params, f.samples));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.samples.size()));
}

void BM_CountCorrectOmp(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(casp::kernels::omp::count_correct(f.params, f.samples));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.samples.size()));
}

}  // namespace

BENCHMARK(BM_ConfidencesSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_ConfidencesOmp)->Arg(1000)->Arg(10000);
BENCHMARK(BM_CountCorrectSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_CountCorrectOmp)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
