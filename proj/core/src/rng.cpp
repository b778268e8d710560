#include "hevt/rng.hpp"

#include <cmath>

#include "hevt/errors.hpp"

namespace hevt {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

double Rng::uniform() {
  // (k + 0.5) / 2^53 is never 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::log_uniform(double lo, double hi) {
  const double a = std::log(lo);
  const double b = std::log(hi);
  return std::exp(a + (b - a) * uniform());
}

std::vector<double> Rng::flat_dirichlet(std::size_t dim) {
  std::vector<double> w(dim);
  double total = 0.0;
  for (auto& v : w) {
    v = exponential();
    total += v;
  }
  for (auto& v : w) v /= total;
  return w;
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw DomainError("poisson mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0;
  return mean <= 30.0 ? poisson_inversion(mean) : poisson_ptrs(mean);
}

std::uint64_t Rng::poisson_inversion(double mean) {
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p == 0.0 && cdf < u) break;  // floating exhaustion of the tail
  }
  return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables".
std::uint64_t Rng::poisson_ptrs(double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace hevt
