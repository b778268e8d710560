#include <benchmark/benchmark.h>

#include "hevt/rng.hpp"
#include "hevt/transport.hpp"

using hevt::TypeDistribution;

namespace {

TypeDistribution random_law(std::uint64_t seed, std::size_t atoms) {
  hevt::Rng rng(seed);
  const auto w = rng.flat_dirichlet(atoms);
  std::vector<hevt::Atom> a;
  for (std::size_t i = 0; i < atoms; ++i) a.push_back({rng.log_uniform(0.1, 10.0), w[i]});
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < atoms; ++i) total += a[i].weight;
  a.back().weight = 1.0 - total;
  return TypeDistribution::atomic(std::move(a)).renormalized();
}

void BM_WassersteinAtoms(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_law(1, n);
  const auto b = random_law(2, n);
  for (auto _ : state) benchmark::DoNotOptimize(hevt::wasserstein_p(a, b, 2.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WassersteinAtoms)->RangeMultiplier(8)->Range(4, 1 << 15)->Complexity();

void BM_WassersteinGrid(benchmark::State& state) {
  const auto g = TypeDistribution::gamma_mean_one(2.0);
  const auto l = TypeDistribution::lognormal_mean_one(0.7);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hevt::wasserstein_p(g, l, 1.0, n));
}
BENCHMARK(BM_WassersteinGrid)->Arg(1024)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_CertifyStability(benchmark::State& state) {
  const auto a = random_law(3, 3);
  const auto b = random_law(4, 3);
  const auto cells = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hevt::certify_stability(0.2, 2.0, a, b, cells));
}
BENCHMARK(BM_CertifyStability)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_AdaptedGeodesic(benchmark::State& state) {
  const auto a = TypeDistribution::gamma_mean_one(2.0);
  const auto b = TypeDistribution::two_point(0.5, 3.0, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(hevt::adapted_geodesic(0.0, 1.0, a, b, 0.5));
}
BENCHMARK(BM_AdaptedGeodesic)->Unit(benchmark::kMicrosecond);

}  // namespace
