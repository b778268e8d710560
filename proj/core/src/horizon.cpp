#include "hevt/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hevt/errors.hpp"
#include "hevt/gevcore.hpp"
#include "hevt/rng.hpp"
#include "hevt/transport.hpp"
#include "hevt/parallel.hpp"

namespace hevt {
namespace {

void require_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("theta must be finite and positive");
}

// Root in y of y + D y^{1+beta} = s on (0, y_max], where the left side is
// increasing. Newton steps inside a bisection bracket.
double hall_solve(double d, double beta, double s, double y_max) {
  auto f = [&](double y) { return y + d * std::pow(y, 1.0 + beta) - s; };
  double lo = 0.0;
  double hi = y_max;
  double y = std::clamp(s, 0.5 * s, y_max);
  for (int iter = 0; iter < 300; ++iter) {
    const double fy = f(y);
    if (fy == 0.0) return y;
    if (fy < 0.0) lo = y; else hi = y;
    const double slope = 1.0 + d * (1.0 + beta) * std::pow(y, beta);
    double next = slope > 0.0 ? y - fy / slope : -1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - y) <= 1e-16 * next || hi - lo <= 1e-16 * hi) return next;
    y = next;
  }
  return y;
}

}  // namespace

OfferModel OfferModel::pareto_tail(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("Pareto tail needs gamma > 0");
  OfferModel m;
  m.family_ = Family::kParetoTail;
  m.gamma_ = gamma;
  m.t_min_ = 1.0;
  return m;
}

OfferModel OfferModel::exponential() {
  OfferModel m;
  m.family_ = Family::kExponential;
  m.t_min_ = 0.0;
  return m;
}

OfferModel OfferModel::hall_class(double gamma, double d, double beta) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("Hall class needs gamma > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("Hall class needs beta > 0");
  if (!std::isfinite(d)) throw DomainError("Hall class needs a finite D");
  if (d < -1.0 / (1.0 + beta)) {
    std::ostringstream os;
    os << "Hall class with D=" << d << ", beta=" << beta
       << " has an increasing tail near t=1 (need D >= -1/(1+beta))";
    throw DomainError(os.str());
  }
  OfferModel m;
  m.family_ = Family::kHallClass;
  m.gamma_ = gamma;
  m.d_ = d;
  m.beta_ = beta;
  m.t_min_ = 1.0;
  if (d > 0.0) {
    const double y = hall_solve(d, beta, 1.0, 1.0);
    m.t_min_ = std::pow(y, -gamma);
  }
  return m;
}

double OfferModel::tail(double t) const {
  if (t < t_min_) return 1.0;
  switch (family_) {
    case Family::kExponential: return std::exp(-t);
    case Family::kParetoTail: return std::pow(t, -1.0 / gamma_);
    case Family::kHallClass: {
      const double y = std::pow(t, -1.0 / gamma_);
      return std::min(1.0, y * (1.0 + d_ * std::pow(y, beta_)));
    }
  }
  return 1.0;
}

double OfferModel::inverse_tail(double s) const {
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("inverse tail needs s in (0,1]");
  switch (family_) {
    case Family::kExponential: return -std::log(s);
    case Family::kParetoTail: return std::pow(s, -gamma_);
    case Family::kHallClass: {
      const double y_max = std::pow(t_min_, -1.0 / gamma_);
      const double s_max = y_max * (1.0 + d_ * std::pow(y_max, beta_));
      if (s >= s_max) return t_min_;
      return std::pow(hall_solve(d_, beta_, s, y_max), -gamma_);
    }
  }
  return 0.0;
}

double OfferModel::a(double theta) const {
  require_theta(theta);
  return family_ == Family::kExponential ? 1.0 : gamma_ * std::pow(theta, gamma_);
}

double OfferModel::b(double theta) const {
  require_theta(theta);
  return family_ == Family::kExponential ? std::log(theta) : std::pow(theta, gamma_);
}

double OfferModel::second_order_rate(double theta) const {
  require_theta(theta);
  return family_ == Family::kHallClass ? d_ * std::pow(theta, -beta_) : 0.0;
}

double OfferModel::second_order_shape(double x) const {
  if (family_ != Family::kHallClass) return 0.0;
  const double base = 1.0 + gamma_ * x;
  if (base <= 0.0) throw DomainError("h(x) needs 1 + gamma x > 0");
  return std::exp(-(1.0 + beta_) / gamma_ * std::log(base));
}

std::string OfferModel::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::kParetoTail: os << "pareto(gamma=" << gamma_ << ")"; break;
    case Family::kExponential: os << "exponential"; break;
    case Family::kHallClass:
      os << "hall(gamma=" << gamma_ << ", D=" << d_ << ", beta=" << beta_ << ")";
      break;
  }
  return os.str();
}

HorizonLaw::HorizonLaw(TypeDistribution f, OfferModel g, double theta_in)
    : mixing(std::move(f)), offers(g), theta(theta_in) {
  require_theta(theta);
}

double finite_cdf(const HorizonLaw& law, double x) {
  return laplace_transform(law.mixing, law.theta * law.offers.tail(x));
}

double normalized_cdf(const HorizonLaw& law, double x) {
  return finite_cdf(law, law.offers.b(law.theta) + law.offers.a(law.theta) * x);
}

std::vector<MaxOutcome> simulate_max(const HorizonLaw& law, std::uint64_t seed, std::size_t n) {
  if (n == 0) throw DomainError("replicate count must be at least 1");
  std::vector<MaxOutcome> out(n);
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  detail::parallel_for(chunks, [&](std::size_t c) {
    Rng rng(derive_seed(seed, c));
    const std::size_t end = std::min(n, (c + 1) * kSampleChunk);
    for (std::size_t i = c * kSampleChunk; i < end; ++i) {
      const double x = quantile(law.mixing, rng.uniform());
      const std::uint64_t count = rng.poisson(law.theta * x);
      if (count == 0) continue;
      const double s = -std::expm1(std::log(rng.uniform()) / static_cast<double>(count));
      out[i] = law.offers.inverse_tail(std::max(s, 1e-300));
    }
  });
  return out;
}

HorizonBound pointwise_stability(double theta, const OfferModel& offers, double x,
                                 const TypeDistribution& f1, const TypeDistribution& f2) {
  require_theta(theta);
  const double z = theta * offers.tail(x);
  HorizonBound r;
  r.gap = std::fabs(laplace_transform(f1, z) - laplace_transform(f2, z));
  r.bound = z * wasserstein_p(f1, f2, 1.0).value.value_or_inf();
  r.passed = r.gap <= r.bound + 1e-12;
  return r;
}

std::vector<DiagnosticRow> second_order_diagnostic(const TypeDistribution& mixing,
                                                   const OfferModel& offers,
                                                   const std::vector<double>& x_grid,
                                                   const std::vector<double>& theta_grid) {
  if (x_grid.empty() || theta_grid.empty()) throw DomainError("diagnostic grids must be nonempty");
  for (std::size_t k = 1; k < theta_grid.size(); ++k) {
    if (!(theta_grid[k] > theta_grid[k - 1])) throw DomainError("theta grid must be increasing");
  }
  const TailIndex gamma(offers.gamma());
  std::vector<DiagnosticRow> rows;
  for (double theta : theta_grid) {
    const HorizonLaw law(mixing, offers, theta);
    DiagnosticRow row;
    row.theta = theta;
    row.rate = offers.second_order_rate(theta);
    const double a = offers.a(theta);
    const double b = offers.b(theta);
    for (double x : x_grid) {
      if (!gamma.in_interior(x) || b + a * x < offers.t_min()) {
        std::ostringstream os;
        os << "x=" << x << " at theta=" << theta << " maps outside the offer support of "
           << offers.describe();
        throw DomainError(os.str());
      }
      const double v = tail_transform(gamma, x).value();
      const double exact = normalized_cdf(law, x);
      const double limit = laplace_transform(mixing, v);
      const double remainder =
          exact - limit + row.rate * offers.second_order_shape(x) * laplace_slope(mixing, v);
      row.leading_term_error = std::max(row.leading_term_error, std::fabs(remainder));
      row.sup_gap_to_limit = std::max(row.sup_gap_to_limit, std::fabs(exact - limit));
    }
    row.sup_ratio = row.rate == 0.0 ? 0.0 : row.leading_term_error / std::fabs(row.rate);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hevt
