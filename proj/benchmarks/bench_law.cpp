#include <benchmark/benchmark.h>

#include "hevt/hevlaw.hpp"
#include "hevt/horizon.hpp"
#include "hevt/typedist.hpp"

using hevt::HevLaw;
using hevt::TypeDistribution;

namespace {

TypeDistribution mixing(int which) {
  switch (which) {
    case 0: return TypeDistribution::two_point(0.5, 3.0, 0.8);
    case 1: return TypeDistribution::gamma_mean_one(2.0);
    default: return TypeDistribution::gamma_mean_one(2.0).to_grid();
  }
}

void BM_HevCdf(benchmark::State& state) {
  const HevLaw law(0.25, mixing(static_cast<int>(state.range(0))));
  double x = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hev_cdf(law, x));
    x = x > 4.0 ? -1.0 : x + 0.01;
  }
}
BENCHMARK(BM_HevCdf)->DenseRange(0, 2)->ArgName("atomic|gamma|grid");

void BM_HevQuantile(benchmark::State& state) {
  const HevLaw law(0.25, mixing(static_cast<int>(state.range(0))));
  double u = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hev_quantile(law, u));
    u = u > 0.98 ? 0.01 : u + 0.001;
  }
}
BENCHMARK(BM_HevQuantile)->DenseRange(0, 2)->ArgName("atomic|gamma|grid");

void BM_Sample(benchmark::State& state) {
  const HevLaw law(0.0, mixing(0));
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hevt::sample(law, 7, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sample)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_SimulateMax(benchmark::State& state) {
  const hevt::HorizonLaw law(mixing(0), hevt::OfferModel::pareto_tail(0.5), 1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(hevt::simulate_max(law, 11, 100000));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_SimulateMax)->Unit(benchmark::kMillisecond);

}  // namespace
