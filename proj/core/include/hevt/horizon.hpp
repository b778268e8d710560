#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hevt/typedist.hpp"

namespace hevt {

/// Parent offer law G with continuous normalizations a(theta), b(theta).
///
///  - Pareto tail: 1 - G(t) = t^{-1/gamma} for t >= 1; a = gamma theta^gamma,
///    b = theta^gamma.
///  - Exponential: 1 - G(t) = e^{-t} for t >= 0; a = 1, b = log theta.
///  - Hall class: 1 - G(t) = t^{-1/gamma}(1 + D t^{-beta/gamma}) for t >= t_min,
///    with the Pareto normalizations, A(theta) = D theta^{-beta} and
///    h(x) = (1 + gamma x)^{-(1+beta)/gamma}.
class OfferModel {
 public:
  enum class Family { kParetoTail, kExponential, kHallClass };

  static OfferModel pareto_tail(double gamma);
  static OfferModel exponential();
  // Rejects D < -1/(1+beta), where 1 - G would increase near t = 1.
  static OfferModel hall_class(double gamma, double d, double beta);

  Family family() const { return family_; }
  double gamma() const { return gamma_; }
  double d() const { return d_; }
  double beta() const { return beta_; }
  // Left end of the offer support.
  double t_min() const { return t_min_; }

  // 1 - G(t); equal to 1 below t_min.
  double tail(double t) const;
  // Smallest t with 1 - G(t) <= s, 0 < s <= 1.
  double inverse_tail(double s) const;

  double a(double theta) const;
  double b(double theta) const;
  // Second-order rate A(theta) and shape h(x); identically 0 for the exact
  // Pareto and exponential families.
  double second_order_rate(double theta) const;
  double second_order_shape(double x) const;

  std::string describe() const;

 private:
  OfferModel() = default;

  Family family_ = Family::kExponential;
  double gamma_ = 0.0;
  double d_ = 0.0;
  double beta_ = 0.0;
  double t_min_ = 0.0;
};

struct HorizonLaw {
  TypeDistribution mixing;
  OfferModel offers;
  double theta;

  HorizonLaw(TypeDistribution f, OfferModel g, double theta);
};

// Pr(M_theta <= x) = P_0(theta (1 - G(x))); P_0(theta) below the support.
double finite_cdf(const HorizonLaw& law, double x);
// Pr(Z_theta <= x) with Z_theta = (M_theta - b(theta)) / a(theta).
double normalized_cdf(const HorizonLaw& law, double x);

// One replicate per entry; std::nullopt is the empty maximum (no offers).
using MaxOutcome = std::optional<double>;

// Draws X, N ~ Poisson(theta X) and the maximum of N offers. The maximum of
// N draws is generated as G^{-1}(U^{1/N}), which has the same law as the
// largest of N inverse-cdf draws.
std::vector<MaxOutcome> simulate_max(const HorizonLaw& law, std::uint64_t seed, std::size_t n);

struct HorizonBound {
  double gap = 0.0;
  double bound = 0.0;
  bool passed = false;
};

// |Pr_{F1}(M <= x) - Pr_{F2}(M <= x)| <= theta (1 - G(x)) W_1(F1, F2).
HorizonBound pointwise_stability(double theta, const OfferModel& offers, double x,
                                 const TypeDistribution& f1, const TypeDistribution& f2);

struct DiagnosticRow {
  double theta = 0.0;
  double rate = 0.0;                // A(theta)
  double sup_ratio = 0.0;           // sup |r| / |A|; 0 when A = 0
  double leading_term_error = 0.0;  // sup |r|
  double sup_gap_to_limit = 0.0;    // sup |Pr(Z_theta <= x) - H(x)|
};

// Remainder r = Pr(Z_theta <= x) - H(x) + A(theta) h(x) E[X e^{-v(x) X}]
// over x_grid for every theta. Throws DomainError when a grid point leaves
// the region where the normalized offer lies in the support.
std::vector<DiagnosticRow> second_order_diagnostic(const TypeDistribution& mixing,
                                                   const OfferModel& offers,
                                                   const std::vector<double>& x_grid,
                                                   const std::vector<double>& theta_grid);

}  // namespace hevt
