#include <benchmark/benchmark.h>

#include "swapsim/config.hpp"
#include "swapsim/engine.hpp"
#include "swapsim/fit.hpp"
#include "swapsim/metrics.hpp"
#include "swapsim/tomography.hpp"

#include <cmath>
#include <numbers>

namespace {

using namespace swapsim;

SwapSetting first_tomography_setting() { return tomography_swap_settings().front(); }

static void BM_PulseModel(benchmark::State& state) {
  auto cfg = paper_config();
  cfg.truncation = static_cast<int>(state.range(0));
  const auto setting = first_tomography_setting();
  for (auto _ : state) {
    PulseModel model(cfg, setting);
    benchmark::DoNotOptimize(model.kept_probability());
  }
  state.SetLabel("truncation " + std::to_string(cfg.truncation));
}
BENCHMARK(BM_PulseModel)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_SampleRecord(benchmark::State& state) {
  const auto cfg = paper_config();
  const PulseModel model(cfg, first_tomography_setting());
  RunOptions opts;
  std::uint64_t index = 0;
  for (auto _ : state) {
    auto rec = sample_record(model, first_tomography_setting(), false, 1000000000000ull, 1, index++, opts);
    benchmark::DoNotOptimize(rec.counts);
  }
}
BENCHMARK(BM_SampleRecord)->Unit(benchmark::kMicrosecond);

static void BM_RunSwapTomography(benchmark::State& state) {
  const auto cfg = paper_config();
  const auto settings = tomography_swap_settings();
  RunOptions opts;
  opts.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    auto records = run_swap(cfg, settings, cfg.pulses, 1, opts);
    benchmark::DoNotOptimize(records.data());
  }
  state.SetLabel(std::to_string(settings.size()) + " settings");
}
BENCHMARK(BM_RunSwapTomography)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

std::vector<TomographySetting> paper_dataset() {
  const auto cfg = paper_config();
  return tomography_dataset(run_swap(cfg, tomography_swap_settings(), cfg.pulses, 1));
}

static void BM_MleReconstruct(benchmark::State& state) {
  const auto data = paper_dataset();
  for (auto _ : state) {
    auto fit = mle_reconstruct(data);
    benchmark::DoNotOptimize(fit.log_likelihood);
  }
}
BENCHMARK(BM_MleReconstruct)->Unit(benchmark::kMillisecond);

static void BM_NearestWerner(benchmark::State& state) {
  const auto rho = mle_reconstruct(paper_dataset()).rho;
  for (auto _ : state) {
    auto fit = nearest_werner(rho);
    benchmark::DoNotOptimize(fit.v);
  }
}
BENCHMARK(BM_NearestWerner)->Unit(benchmark::kMillisecond);

static void BM_Concurrence(benchmark::State& state) {
  const auto rho = werner_state(0.6, bell_state(BellKind::PsiPlus));
  for (auto _ : state) benchmark::DoNotOptimize(concurrence(rho));
}
BENCHMARK(BM_Concurrence);

static void BM_FitVisibility(benchmark::State& state) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 12; ++i) {
    const double d = 2.0 * std::numbers::pi * i / 12;
    pts.emplace_back(d, std::round(1000.0 * (1.0 + 0.5 * std::cos(d + 0.3))));
  }
  for (auto _ : state) {
    auto fit = fit_visibility(pts);
    benchmark::DoNotOptimize(fit.visibility);
  }
}
BENCHMARK(BM_FitVisibility)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
