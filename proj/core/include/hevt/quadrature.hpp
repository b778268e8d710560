#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hevt::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Laguerre rule for weight e^{-x} on (0, inf), computed once
// per n and cached. Weights that underflow are stored as 0.
const Rule& gauss_laguerre(int n);

struct ExpectationResult {
  double value = 0.0;
  // |Q_n - Q_2n| when the Laguerre rule converged, otherwise the adaptive
  // Gauss-Kronrod error estimate.
  double error_estimate = 0.0;
  // True when the Laguerre rule failed the doubled-node check and the value
  // came from global adaptive Gauss-Kronrod.
  bool refined = false;
};

// Node values with magnitude above this are treated as a divergent integrand.
inline constexpr double kBlowUpThreshold = 1e12;

/// E[f(E)] for E ~ Exp(1).
///
/// Uses an n-point Gauss-Laguerre rule and checks it against the 2n-point
/// rule. If the two disagree (kinks, jumps or endpoint singularities in f)
/// the integral is recomputed adaptively, over e in (0,1) and over
/// s = e^{-e} in (0, 1/e). Throws
/// DivergenceError on a non-finite or blown-up node value, or when the
/// adaptive pass cannot reach its tolerance.
ExpectationResult exponential_expectation(const std::function<double(double)>& f,
                                          int nodes);

struct UnitIntegral {
  double value = 0.0;
  // Analytic estimate of the mass beyond the innermost dyadic panels.
  double truncation = 0.0;
};

/// int_0^1 g(u) du for integrands that may blow up at both ends.
///
/// `lower(u)` evaluates g at u <= 1/2 and `upper(s)` evaluates g at 1 - s
/// for s < 1/2, so callers can keep full relative precision near u = 1.
/// [1/8, 7/8] is covered by cells/10 equal 10-point Gauss-Legendre panels;
/// each end by dyadic panels down to 2^-200, none wider than the middle ones.
/// `upper_exponent` is the power alpha < 1 with g(1-s) ~ s^{-alpha} as s->0
/// (0 when bounded); it only feeds the tail correction.
UnitIntegral integrate_unit_interval(const std::function<double(double)>& lower,
                                     const std::function<double(double)>& upper,
                                     std::size_t cells, double upper_exponent = 0.0);

}  // namespace hevt::quadrature
