#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "hevt/gevcore.hpp"
#include "hevt/typedist.hpp"

namespace hevt {

inline constexpr int kDefaultQuadNodes = 128;
// Samples per seeded chunk; chunk c uses derive_seed(seed, c).
inline constexpr std::size_t kSampleChunk = 65536;

/// Heterogeneous extreme-value law H_{gamma,F} = P_0 o v_gamma.
class HevLaw {
 public:
  HevLaw(TailIndex gamma, TypeDistribution mixing)
      : gamma_(gamma), mixing_(std::move(mixing)) {}

  TailIndex gamma() const { return gamma_; }
  const TypeDistribution& mixing() const { return mixing_; }

 private:
  TailIndex gamma_;
  TypeDistribution mixing_;
};

// z with P_0(z) = u, 0 < u < 1.
double laplace_inverse(const TypeDistribution& f, double u);
// z with 1 - P_0(z) = s, 0 < s < 1; accurate for small s.
double laplace_inverse_complement(const TypeDistribution& f, double s);

double hev_cdf(const HevLaw& law, double x);

// Q_{gamma,F}(u) = w_gamma(P_0^{-1}(u)).
double hev_quantile(const HevLaw& law, double u);
// Q_{gamma,F}(1 - s), keeping relative precision in s near the upper end.
double hev_quantile_upper(const HevLaw& law, double s);

// n draws of Z = w_gamma(E/X) with X ~ F by inversion and E = -log U.
// Deterministic in (seed, n); chunks may run in parallel.
std::vector<double> sample(const HevLaw& law, std::uint64_t seed, std::size_t n);

// E[psi(Z)] = int E[psi(w_gamma(E/x))] F(dx), inner integral by Gauss-Laguerre
// (with adaptive fallback). Throws DivergenceError on blow-up.
double kernel_expectation(const HevLaw& law, const std::function<double(double)>& psi,
                          int quad_nodes = kDefaultQuadNodes);

// The inner integral E[psi(w_gamma(E/x))] for one type x > 0.
double kernel_at(TailIndex gamma, const std::function<double(double)>& psi, double x,
                 int quad_nodes = kDefaultQuadNodes);

// d/d eps H_{gamma,F+eps nu}(x) at 0 = sum_i nu_i exp(-v_gamma(x) u_i).
double gateaux_derivative(const HevLaw& law, const SignedPerturbation& nu, double x);

// H evaluated at a signed combination F + eps nu (atomic F only); used for
// finite-difference checks of the derivative.
double hev_cdf_perturbed(const HevLaw& law, const SignedPerturbation& nu, double eps,
                         double x);

}  // namespace hevt
