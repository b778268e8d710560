#include "hevt/gevcore.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hevt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (1 + g x)^{-1/g} for 1 + g x > 0, g != 0.
double power_tail(double g, double x) {
  const double gx = g * x;
  if (std::fabs(g) < 1e-8 && std::fabs(gx) <= 1e-3) {
    return std::exp(-x + 0.5 * gx * x);
  }
  return std::exp(-std::log1p(gx) / g);
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::kFrechet: return "frechet";
    case Regime::kGumbel: return "gumbel";
    case Regime::kWeibull: return "weibull";
  }
  return "unknown";
}

TailIndex::TailIndex(double gamma) : gamma_(gamma) {
  if (!std::isfinite(gamma)) throw DomainError("tail index must be finite");
}

Regime TailIndex::regime() const {
  if (gamma_ > 0.0) return Regime::kFrechet;
  if (gamma_ < 0.0) return Regime::kWeibull;
  return Regime::kGumbel;
}

double TailIndex::lower_endpoint() const { return gamma_ > 0.0 ? -1.0 / gamma_ : -kInf; }

double TailIndex::upper_endpoint() const { return gamma_ < 0.0 ? -1.0 / gamma_ : kInf; }

bool TailIndex::in_interior(double x) const {
  return x > lower_endpoint() && x < upper_endpoint();
}

ExtendedReal tail_transform(TailIndex gamma, double x) {
  const double g = gamma.value();
  if (g == 0.0) {
    const double v = std::exp(-x);
    return std::isinf(v) ? ExtendedReal::infinite() : ExtendedReal(v);
  }
  if (1.0 + g * x <= 0.0) {
    return g > 0.0 ? ExtendedReal::infinite() : ExtendedReal(0.0);
  }
  const double v = power_tail(g, x);
  return std::isinf(v) ? ExtendedReal::infinite() : ExtendedReal(v);
}

double gev_cdf(TailIndex gamma, double x) {
  const ExtendedReal v = tail_transform(gamma, x);
  return v.is_infinite() ? 0.0 : std::exp(-v.value());
}

double inverse_tail_transform(TailIndex gamma, double t) {
  if (!(t > 0.0)) throw DomainError("inverse tail transform needs t > 0");
  const double g = gamma.value();
  if (g == 0.0) return -std::log(t);
  return std::expm1(-g * std::log(t)) / g;
}

double adapted_transform(TailIndex gamma, double x) {
  if (!(x > 0.0)) throw DomainError("adapted transform needs x > 0");
  const double g = gamma.value();
  return g == 0.0 ? std::log(x) : std::pow(x, g);
}

double inverse_adapted_transform(TailIndex gamma, double y) {
  const double g = gamma.value();
  if (g == 0.0) return std::exp(y);
  if (!(y > 0.0)) throw DomainError("inverse adapted transform needs y > 0 for gamma != 0");
  return std::pow(y, 1.0 / g);
}

double frechet_cdf(double gamma, double z) {
  if (!(gamma > 0.0)) throw DomainError("Frechet cdf needs gamma > 0");
  if (z <= 0.0) return 0.0;
  return std::exp(-std::pow(z, -1.0 / gamma));
}

}  // namespace hevt
