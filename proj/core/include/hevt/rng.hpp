#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hevt {

// Derives an independent 64-bit seed for stream `stream` of a run seeded
// with `seed` (splitmix64 finalizer). Chunked generation uses
// derive_seed(seed, chunk_index) so serial and parallel runs agree.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable random source.
///
/// The standard library's distribution objects are implementation-defined,
/// so every variate here is produced from raw mt19937_64 output with a fixed
/// algorithm; the same seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  // Unit-rate exponential, -log U.
  double exponential();
  // Poisson(mean): inversion for mean <= 30, PTRS transformed rejection above.
  std::uint64_t poisson(double mean);
  // Uniform on [log lo, log hi], exponentiated.
  double log_uniform(double lo, double hi);
  // Symmetric Dirichlet(1,...,1) of the given dimension.
  std::vector<double> flat_dirichlet(std::size_t dim);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t poisson_inversion(double mean);
  std::uint64_t poisson_ptrs(double mean);

  std::mt19937_64 engine_;
};

}  // namespace hevt
