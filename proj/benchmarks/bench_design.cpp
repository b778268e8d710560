#include <benchmark/benchmark.h>

#include "hevt/design.hpp"

using hevt::TypeDistribution;

namespace {

void BM_SolveTiltAtomic(benchmark::State& state) {
  const hevt::TiltProblem p{TypeDistribution::atomic({{0.5, 0.4}, {1.0, 0.4}, {2.0, 0.2}}),
                            hevt::cdf_score(0.0, 0.0), 1.0, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(hevt::solve_tilt(p));
}
BENCHMARK(BM_SolveTiltAtomic)->Unit(benchmark::kMicrosecond);

void BM_SolveTiltGamma(benchmark::State& state) {
  const hevt::TiltProblem p{TypeDistribution::gamma_mean_one(2.0), hevt::cdf_score(0.25, 1.0), 0.5,
                            std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(hevt::solve_tilt(p));
}
BENCHMARK(BM_SolveTiltGamma)->Unit(benchmark::kMillisecond);

void BM_ExpectedUtilityScore(benchmark::State& state) {
  const auto nodes = static_cast<int>(state.range(0));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hevt::expected_utility_score(0.25, [](double z) { return z; }, x, nodes));
    x = x > 10.0 ? 0.1 : x * 1.01;
  }
}
BENCHMARK(BM_ExpectedUtilityScore)->Arg(64)->Arg(256);

}  // namespace
