#pragma once

#include "hevt/extended_real.hpp"

namespace hevt {

enum class Regime { kFrechet, kGumbel, kWeibull };

const char* regime_name(Regime r);

/// Extreme-value tail index gamma.
///
/// The regime is decided by the exact sign of gamma; there is no epsilon
/// band around zero.
class TailIndex {
 public:
  TailIndex(double gamma);  // NOLINT(implicit): throws DomainError if not finite

  double value() const { return gamma_; }
  operator double() const { return gamma_; }  // NOLINT(implicit)
  Regime regime() const;

  // Support of H_gamma: (-1/gamma, inf) for gamma > 0, (-inf, -1/gamma) for
  // gamma < 0, the real line for gamma = 0. Infinite ends are +-inf.
  double lower_endpoint() const;
  double upper_endpoint() const;
  // Strictly inside the support, where v_gamma is finite and positive.
  bool in_interior(double x) const;

 private:
  double gamma_;
};

// H_gamma(x) = exp(-v_gamma(x)) with the boundary conventions 0 below the
// Frechet lower endpoint and 1 above the Weibull upper endpoint.
double gev_cdf(TailIndex gamma, double x);

// v_gamma(x) = (1 + gamma x)^{-1/gamma}, e^{-x} for gamma = 0. Infinite below
// the Frechet lower endpoint, 0 above the Weibull upper endpoint.
ExtendedReal tail_transform(TailIndex gamma, double x);

// w_gamma(t) = (t^{-gamma} - 1)/gamma, -log t for gamma = 0; t > 0.
double inverse_tail_transform(TailIndex gamma, double t);

// s_gamma(x) = x^gamma, log x for gamma = 0; x > 0.
double adapted_transform(TailIndex gamma, double x);
double inverse_adapted_transform(TailIndex gamma, double y);

// Standard Frechet cdf exp(-z^{-1/gamma}) for gamma > 0; 0 for z <= 0.
// H_gamma(x) equals it at z = 1 + gamma x.
double frechet_cdf(double gamma, double z);

}  // namespace hevt
