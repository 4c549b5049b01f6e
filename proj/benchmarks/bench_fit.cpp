#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "ladder/laws.hpp"
#include "ladder/synth.hpp"

using namespace ladder;

namespace {

std::vector<Step1Point> grid_points() {
  PowerLawParams truth{38.07, 100.09, 0.23, 0.24, 0.45};
  std::vector<Step1Point> pts;
  for (const auto& e : ladder::testing::grid_ladder().entries) {
    double n = static_cast<double>(e.n_params);
    double d = 20.0 * e.chinchilla_multiplier * n;
    pts.push_back({n, d, eval_power_law(truth, n, d)});
  }
  return pts;
}

std::vector<std::pair<double, double>> sigmoid_pairs(int count) {
  SigmoidParams truth{-0.73, 0.99, 12.74, 0.77};
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < count; ++i) {
    double l = 0.55 + (1.8 - 0.55) * (i + 0.5) / count;
    double acc = eval_sigmoid(truth, l) + 0.005 * synth_normal(1, 0, i, 0);
    pairs.emplace_back(l, std::clamp(acc, 0.0, 1.0));
  }
  return pairs;
}

} // namespace

static void BM_FitStep1(benchmark::State& state) {
  auto pts = grid_points();
  FitConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit_step1_points(pts, cfg));
}
BENCHMARK(BM_FitStep1)->Unit(benchmark::kMillisecond);

static void BM_FitStep2(benchmark::State& state) {
  auto pairs = sigmoid_pairs(1400);
  FitConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit_step2_pairs(pairs, cfg));
}
BENCHMARK(BM_FitStep2)->Unit(benchmark::kMillisecond);

static void BM_EvalPowerLaw(benchmark::State& state) {
  PowerLawParams p{38.07, 100.09, 0.23, 0.24, 0.45};
  double n = 1e9, d = 2e10, acc = 0.0;
  for (auto _ : state) {
    acc += eval_power_law(p, n, d);
    n *= 1.0000001;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_EvalPowerLaw);

static void BM_EvalSigmoid(benchmark::State& state) {
  SigmoidParams p{-0.73, 0.99, 12.74, 0.77};
  double l = 0.55, acc = 0.0;
  for (auto _ : state) {
    acc += eval_sigmoid(p, l);
    l = l < 1.8 ? l + 1e-7 : 0.55;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_EvalSigmoid);
