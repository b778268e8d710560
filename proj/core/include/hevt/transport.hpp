#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hevt/extended_real.hpp"
#include "hevt/gevcore.hpp"
#include "hevt/hevlaw.hpp"
#include "hevt/typedist.hpp"

namespace hevt {

enum class MetricMethod { kExactAtomic, kQuantileGrid };

const char* method_name(MetricMethod m);

struct MetricReport {
  double p = 1.0;
  ExtendedReal value;
  MetricMethod method = MetricMethod::kExactAtomic;
  std::size_t grid_size = 0;  // 0 for exact atomic computations
};

// W_p^p between two atomic laws on the real line (locations of any sign),
// accumulated exactly over merged quantile breakpoints. Atoms need not be
// sorted.
double wasserstein_pp_atoms(std::span<const Atom> a, std::span<const Atom> b, double p);

// W_p between type distributions: exact for two atomic inputs, midpoint
// quantile grid of size `grid` otherwise. Infinite when a p-th moment is.
MetricReport wasserstein_p(const TypeDistribution& mu, const TypeDistribution& nu, double p,
                           std::size_t grid = kDefaultGridSize);

// d_{gamma,p}(F1, F2) = W_p of the pushforwards under s_gamma.
MetricReport adapted_distance(TailIndex gamma, double p, const TypeDistribution& f1,
                              const TypeDistribution& f2, std::size_t grid = kDefaultGridSize);

// C_{gamma,p}: Gamma(1 - p gamma)^{1/p}/gamma for gamma > 0 (needs p gamma < 1),
// Gamma(1 + p|gamma|)^{1/p}/|gamma| for gamma < 0, 1 for gamma = 0.
double stability_constant(TailIndex gamma, double p);

struct InducedDistance {
  double value = 0.0;       // W_p(H_{gamma,F1}, H_{gamma,F2})
  double truncation = 0.0;  // estimated mass beyond the innermost end panels
  std::size_t cells = 0;
};

// W_p between induced laws from their quantile functions on (0,1).
// Requires p gamma < 1 when gamma > 0.
InducedDistance induced_wasserstein(TailIndex gamma, double p, const TypeDistribution& f1,
                                    const TypeDistribution& f2,
                                    std::size_t cells = kDefaultGridSize);

struct StabilityCertificate {
  double gamma = 0.0;
  double p = 1.0;
  double lhs = 0.0;
  ExtendedReal metric;
  double constant = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  double truncation = 0.0;
  bool passed = false;
  // Infinite adapted metric: the inequality holds trivially.
  bool vacuous = false;
};

inline constexpr double kCertificateTolerance = 1e-6;

// Checks W_p(H_{gamma,F1}, H_{gamma,F2}) <= C_{gamma,p} d_{gamma,p}(F1, F2).
StabilityCertificate certify_stability(TailIndex gamma, double p, const TypeDistribution& f1,
                                       const TypeDistribution& f2,
                                       std::size_t grid = kDefaultGridSize);

// Quantile-linear interpolation (1 - t) Q_0 + t Q_1.
TypeDistribution raw_geodesic(const TypeDistribution& f0, const TypeDistribution& f1, double t,
                              std::size_t grid = kDefaultGridSize);

// Interpolation of the s_gamma pushforwards, pulled back by s_gamma^{-1}.
TypeDistribution adapted_geodesic(TailIndex gamma, double p, const TypeDistribution& f0,
                                  const TypeDistribution& f1, double t,
                                  std::size_t grid = kDefaultGridSize);

struct RenormalizationBridge {
  double mean = 1.0;
  double distance = 0.0;         // closed form
  double direct = 0.0;           // adapted_distance(F, F / mean)
  bool agrees = false;           // |distance - direct| <= 1e-9 (relative above 1)
  std::optional<double> induced_bound;  // C_{gamma,p} * distance when defined
};

RenormalizationBridge renormalization_bridge(TailIndex gamma, double p,
                                             const TypeDistribution& f,
                                             std::size_t grid = kDefaultGridSize);

struct PointwiseBound {
  double gap = 0.0;
  double bound = 0.0;
  bool passed = false;
};

// |H_{gamma,F1}(x) - H_{gamma,F2}(x)| <= v_gamma(x) W_1(F1, F2).
PointwiseBound pointwise_cdf_bound(TailIndex gamma, const TypeDistribution& f1,
                                   const TypeDistribution& f2, double x);

struct MetricBridge {
  double adapted = 0.0;
  double raw = 0.0;
  double bound = 0.0;
  double exponent = 1.0;
  bool passed = false;
};

// d_{gamma,p} <= W_p^gamma (0 < gamma <= 1), |gamma| a^{gamma-1} W_p (gamma < 0),
// a^{-1} W_p (gamma = 0), with a the common support floor.
MetricBridge metric_bridge(TailIndex gamma, double p, const TypeDistribution& f1,
                           const TypeDistribution& f2, std::optional<double> support_floor,
                           std::size_t grid = kDefaultGridSize);

struct FunctionalGap {
  double gap = 0.0;
  double bound = 0.0;
  double induced_w1 = 0.0;
  bool passed = false;
};

// |E psi(Z1) - E psi(Z2)| <= L W_1(H_{gamma,F1}, H_{gamma,F2}).
FunctionalGap lipschitz_functional_gap(TailIndex gamma, const TypeDistribution& f1,
                                       const TypeDistribution& f2,
                                       const std::function<double(double)>& psi,
                                       double lipschitz_constant,
                                       std::size_t grid = kDefaultGridSize);

}  // namespace hevt
