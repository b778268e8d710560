#include "hevt/typedist.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hevt/errors.hpp"

namespace hevt {
namespace {

constexpr double kWeightTolerance = 1e-12;

void require_finite_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + " must be finite and positive");
  }
}

// Quantile of the mean-one parametric member at u (lower side).
double parametric_unit_quantile(TypeDistribution::Kind kind, double param, double u) {
  if (kind == TypeDistribution::Kind::kGammaMeanOne) {
    return boost::math::gamma_p_inv(param, u) / param;
  }
  const double z = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
  return std::exp(param * z - 0.5 * param * param);
}

// Quantile at 1 - s, accurate for small s.
double parametric_unit_upper_quantile(TypeDistribution::Kind kind, double param, double s) {
  if (kind == TypeDistribution::Kind::kGammaMeanOne) {
    return boost::math::gamma_q_inv(param, s) / param;
  }
  const double z = std::sqrt(2.0) * boost::math::erfc_inv(2.0 * s);
  return std::exp(param * z - 0.5 * param * param);
}

// Lower and upper cdf of the mean-one parametric member at x > 0.
double parametric_unit_cdf(TypeDistribution::Kind kind, double param, double x) {
  if (kind == TypeDistribution::Kind::kGammaMeanOne) return boost::math::gamma_p(param, param * x);
  return 0.5 * std::erfc(-(std::log(x) + 0.5 * param * param) / (param * std::sqrt(2.0)));
}
double parametric_unit_survival(TypeDistribution::Kind kind, double param, double x) {
  if (kind == TypeDistribution::Kind::kGammaMeanOne) return boost::math::gamma_q(param, param * x);
  return 0.5 * std::erfc((std::log(x) + 0.5 * param * param) / (param * std::sqrt(2.0)));
}

// int_0^1 g(Q(u)) du for a parametric law, split at u = 1/2 so that both
// tails are integrated in their own accurate coordinates, and at the
// optional kink x of g.
template <class G>
double parametric_expectation(const TypeDistribution& f, G g,
                              std::optional<double> kink = std::nullopt) {
  constexpr double kTolerance = 1e-13;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const auto kind = f.kind();
  const double param = f.parameter();
  const double c = f.scale();
  auto lower = [&](double u) { return g(c * parametric_unit_quantile(kind, param, u)); };
  auto upper = [&](double s) { return g(c * parametric_unit_upper_quantile(kind, param, s)); };
  double lo_split = 0.5;
  double up_split = 0.5;
  if (kink && *kink > 0.0) {
    const double u = parametric_unit_cdf(kind, param, *kink / c);
    if (u > 0.0 && u < 0.5) lo_split = u;
    const double s = parametric_unit_survival(kind, param, *kink / c);
    if (s > 0.0 && s < 0.5) up_split = s;
  }
  double sum = integrator.integrate(lower, 0.0, lo_split, kTolerance) +
               integrator.integrate(upper, 0.0, up_split, kTolerance);
  if (lo_split < 0.5) sum += integrator.integrate(lower, lo_split, 0.5, kTolerance);
  if (up_split < 0.5) sum += integrator.integrate(upper, up_split, 0.5, kTolerance);
  return sum;
}

std::vector<double> parametric_grid(TypeDistribution::Kind kind, double param, double scale,
                                    std::size_t n) {
  std::vector<double> q(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    q[j] = scale * (u <= 0.5 ? parametric_unit_quantile(kind, param, u)
                             : parametric_unit_upper_quantile(kind, param, 1.0 - u));
  }
  return q;
}

template <class G>
MomentEstimate grid_average(std::span<const double> q, G g) {
  double sum = 0.0;
  for (double x : q) sum += g(x);
  const double n = static_cast<double>(q.size());
  MomentEstimate out{sum / n, false};
  if (q.size() > 1 && sum > 0.0) {
    const double edge = std::max(std::fabs(g(q.front())), std::fabs(g(q.back())));
    out.edge_dominated = edge > 0.25 * std::fabs(sum);
  }
  if (!std::isfinite(sum)) out.value = ExtendedReal::infinite();
  return out;
}

// Atom list used by the order and transport algorithms.
std::vector<Atom> atoms_of(const TypeDistribution& f, bool* discretized) {
  if (f.is_atomic()) return {f.atoms().begin(), f.atoms().end()};
  if (discretized && f.is_parametric()) *discretized = true;
  // Parametric laws are rescaled so the discretization keeps the exact mean.
  const auto atomic = f.to_atomic();
  std::vector<Atom> out(atomic.atoms().begin(), atomic.atoms().end());
  if (f.is_parametric()) {
    const double c = f.mean() / atomic.mean();
    for (auto& a : out) a.location *= c;
  }
  return out;
}

// E[(X - x)^+] from atoms sorted by location, using suffix sums.
class IntegratedSurvival {
 public:
  explicit IntegratedSurvival(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    suffix_w_.assign(atoms_.size() + 1, 0.0);
    suffix_wx_.assign(atoms_.size() + 1, 0.0);
    for (std::size_t i = atoms_.size(); i-- > 0;) {
      suffix_w_[i] = suffix_w_[i + 1] + atoms_[i].weight;
      suffix_wx_[i] = suffix_wx_[i + 1] + atoms_[i].weight * atoms_[i].location;
    }
  }
  double operator()(double x) const {
    const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                                     [](double v, const Atom& a) { return v < a.location; });
    const auto i = static_cast<std::size_t>(it - atoms_.begin());
    return suffix_wx_[i] - x * suffix_w_[i];
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> suffix_w_;
  std::vector<double> suffix_wx_;
};

}  // namespace

TypeDistribution TypeDistribution::atomic(std::vector<Atom> atoms) {
  if (atoms.empty()) throw DomainError("atomic distribution needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    require_finite_positive(a.location, "atom location");
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw DomainError("atom weights must be finite and nonnegative");
    }
    total += a.weight;
  }
  if (std::fabs(total - 1.0) > kWeightTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "atom weights sum to " << total << ", not 1";
    throw DomainError(os.str());
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (a.weight == 0.0) continue;
    if (!merged.empty() && merged.back().location == a.location) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(a);
    }
  }
  TypeDistribution f;
  f.kind_ = Kind::kAtomic;
  f.atoms_ = std::make_shared<const std::vector<Atom>>(std::move(merged));
  f.finish();
  return f;
}

TypeDistribution TypeDistribution::dirac(double x0) { return atomic({{x0, 1.0}}); }

TypeDistribution TypeDistribution::two_point(double x_lo, double x_hi, double w_lo) {
  if (!(w_lo >= 0.0 && w_lo <= 1.0)) throw DomainError("two-point weight must lie in [0,1]");
  return atomic({{x_lo, w_lo}, {x_hi, 1.0 - w_lo}});
}

TypeDistribution TypeDistribution::quantile_grid(std::vector<double> quantiles) {
  if (quantiles.empty()) throw DomainError("quantile grid must not be empty");
  for (std::size_t j = 0; j < quantiles.size(); ++j) {
    require_finite_positive(quantiles[j], "quantile grid value");
    if (j > 0 && quantiles[j] < quantiles[j - 1]) {
      throw DomainError("quantile grid must be nondecreasing (index " + std::to_string(j) + ")");
    }
  }
  TypeDistribution f;
  f.kind_ = Kind::kQuantileGrid;
  f.grid_ = std::make_shared<const std::vector<double>>(std::move(quantiles));
  f.finish();
  return f;
}

TypeDistribution TypeDistribution::gamma_mean_one(double shape) {
  require_finite_positive(shape, "gamma shape");
  TypeDistribution f;
  f.kind_ = Kind::kGammaMeanOne;
  f.parameter_ = shape;
  f.grid_ = std::make_shared<const std::vector<double>>(
      parametric_grid(f.kind_, shape, 1.0, kDefaultGridSize));
  f.finish();
  return f;
}

TypeDistribution TypeDistribution::lognormal_mean_one(double sigma) {
  require_finite_positive(sigma, "log-normal sigma");
  TypeDistribution f;
  f.kind_ = Kind::kLogNormalMeanOne;
  f.parameter_ = sigma;
  f.grid_ = std::make_shared<const std::vector<double>>(
      parametric_grid(f.kind_, sigma, 1.0, kDefaultGridSize));
  f.finish();
  return f;
}

void TypeDistribution::finish() {
  switch (kind_) {
    case Kind::kAtomic: {
      double m = 0.0;
      for (const auto& a : *atoms_) m += a.weight * a.location;
      mean_ = m;
      break;
    }
    case Kind::kQuantileGrid:
      mean_ = std::accumulate(grid_->begin(), grid_->end(), 0.0) /
              static_cast<double>(grid_->size());
      break;
    case Kind::kGammaMeanOne:
    case Kind::kLogNormalMeanOne:
      mean_ = scale_;
      break;
  }
}

std::span<const Atom> TypeDistribution::atoms() const& {
  if (!is_atomic()) throw PreconditionError("distribution is not atomic: " + describe());
  return *atoms_;
}

std::span<const double> TypeDistribution::grid() const& {
  if (is_atomic()) throw PreconditionError("atomic distribution has no quantile grid");
  return *grid_;
}

bool TypeDistribution::is_mean_one(double tol) const { return std::fabs(mean_ - 1.0) <= tol; }

double TypeDistribution::support_min() const {
  switch (kind_) {
    case Kind::kAtomic: return atoms_->front().location;
    case Kind::kQuantileGrid: return grid_->front();
    default: return 0.0;
  }
}

double TypeDistribution::support_max() const {
  switch (kind_) {
    case Kind::kAtomic: return atoms_->back().location;
    case Kind::kQuantileGrid: return grid_->back();
    default: return std::numeric_limits<double>::infinity();
  }
}

TypeDistribution TypeDistribution::to_grid(std::size_t n) const {
  if (n == 0) throw DomainError("grid size must be positive");
  if (kind_ == Kind::kQuantileGrid && grid_->size() == n) return *this;
  if (is_parametric()) {
    if (grid_->size() == n) return quantile_grid(*grid_);
    return quantile_grid(parametric_grid(kind_, parameter_, scale_, n));
  }
  std::vector<double> q(n);
  for (std::size_t j = 0; j < n; ++j) {
    q[j] = quantile(*this, (static_cast<double>(j) + 0.5) / static_cast<double>(n));
  }
  return quantile_grid(std::move(q));
}

TypeDistribution TypeDistribution::to_atomic(std::size_t n) const {
  if (is_atomic()) return *this;
  const auto g = is_parametric() ? to_grid(n) : *this;
  const double w = 1.0 / static_cast<double>(g.grid_->size());
  std::vector<Atom> atoms;
  atoms.reserve(g.grid_->size());
  for (double q : *g.grid_) atoms.push_back({q, w});
  // Equal weights 1/N may sum to 1 +- N ulp; renormalize the last atom.
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) total += atoms[i].weight;
  atoms.back().weight = 1.0 - total;
  return atomic(std::move(atoms));
}

TypeDistribution TypeDistribution::scaled(double c) const {
  require_finite_positive(c, "scale factor");
  TypeDistribution f = *this;
  switch (kind_) {
    case Kind::kAtomic: {
      auto atoms = *atoms_;
      for (auto& a : atoms) a.location *= c;
      f.atoms_ = std::make_shared<const std::vector<Atom>>(std::move(atoms));
      break;
    }
    case Kind::kQuantileGrid:
    case Kind::kGammaMeanOne:
    case Kind::kLogNormalMeanOne: {
      auto q = *grid_;
      for (auto& v : q) v *= c;
      f.grid_ = std::make_shared<const std::vector<double>>(std::move(q));
      if (is_parametric()) f.scale_ = scale_ * c;
      break;
    }
  }
  f.finish();
  return f;
}

std::string TypeDistribution::describe() const {
  std::ostringstream os;
  os.precision(6);
  switch (kind_) {
    case Kind::kAtomic: os << "atomic(" << atoms_->size() << " atoms"; break;
    case Kind::kQuantileGrid: os << "grid(N=" << grid_->size(); break;
    case Kind::kGammaMeanOne: os << "gamma(shape=" << parameter_; break;
    case Kind::kLogNormalMeanOne: os << "lognormal(sigma=" << parameter_; break;
  }
  if (is_parametric() && scale_ != 1.0) os << ", scale=" << scale_;
  os << ", mean=" << mean_ << ")";
  return os.str();
}

bool operator==(const TypeDistribution& a, const TypeDistribution& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.is_atomic()) return *a.atoms_ == *b.atoms_;
  if (a.is_parametric()) return a.parameter_ == b.parameter_ && a.scale_ == b.scale_;
  return *a.grid_ == *b.grid_;
}

double SignedPerturbation::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

double SignedPerturbation::first_moment() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight * a.location;
  return s;
}

bool SignedPerturbation::is_balanced(double tol) const {
  return std::fabs(total_mass()) <= tol && std::fabs(first_moment()) <= tol;
}

double laplace_transform(const TypeDistribution& f, double z) {
  if (!(z >= 0.0)) throw DomainError("Laplace transform needs z >= 0");
  switch (f.kind()) {
    case TypeDistribution::Kind::kAtomic: {
      double s = 0.0;
      for (const auto& a : f.atoms()) s += a.weight * std::exp(-z * a.location);
      return s;
    }
    case TypeDistribution::Kind::kGammaMeanOne: {
      const double k = f.parameter();
      return std::exp(-k * std::log1p(z * f.scale() / k));
    }
    case TypeDistribution::Kind::kLogNormalMeanOne:
      return parametric_expectation(f, [z](double x) { return std::exp(-z * x); });
    default: {
      const auto q = f.grid();
      double s = 0.0;
      for (double x : q) s += std::exp(-z * x);
      return s / static_cast<double>(q.size());
    }
  }
}

double laplace_complement(const TypeDistribution& f, double z) {
  if (!(z >= 0.0)) throw DomainError("Laplace transform needs z >= 0");
  switch (f.kind()) {
    case TypeDistribution::Kind::kAtomic: {
      double s = 0.0;
      for (const auto& a : f.atoms()) s -= a.weight * std::expm1(-z * a.location);
      return s;
    }
    case TypeDistribution::Kind::kGammaMeanOne: {
      const double k = f.parameter();
      return -std::expm1(-k * std::log1p(z * f.scale() / k));
    }
    case TypeDistribution::Kind::kLogNormalMeanOne:
      return parametric_expectation(f, [z](double x) { return -std::expm1(-z * x); });
    default: {
      const auto q = f.grid();
      double s = 0.0;
      for (double x : q) s -= std::expm1(-z * x);
      return s / static_cast<double>(q.size());
    }
  }
}

double laplace_slope(const TypeDistribution& f, double z) {
  if (!(z >= 0.0)) throw DomainError("Laplace transform needs z >= 0");
  switch (f.kind()) {
    case TypeDistribution::Kind::kAtomic: {
      double s = 0.0;
      for (const auto& a : f.atoms()) s += a.weight * a.location * std::exp(-z * a.location);
      return s;
    }
    case TypeDistribution::Kind::kGammaMeanOne: {
      const double k = f.parameter();
      const double c = f.scale();
      return c * std::exp(-(k + 1.0) * std::log1p(z * c / k));
    }
    case TypeDistribution::Kind::kLogNormalMeanOne:
      return parametric_expectation(f, [z](double x) { return x * std::exp(-z * x); });
    default: {
      const auto q = f.grid();
      double s = 0.0;
      for (double x : q) s += x * std::exp(-z * x);
      return s / static_cast<double>(q.size());
    }
  }
}

double laplace_gap(const TypeDistribution& f, double z) {
  return laplace_transform(f, z) - std::exp(-z);
}

MomentEstimate moment(const TypeDistribution& f, double r) {
  if (!std::isfinite(r)) throw DomainError("moment order must be finite");
  switch (f.kind()) {
    case TypeDistribution::Kind::kAtomic: {
      double s = 0.0;
      for (const auto& a : f.atoms()) s += a.weight * std::pow(a.location, r);
      return {s, false};
    }
    case TypeDistribution::Kind::kQuantileGrid:
      return grid_average(f.grid(), [r](double x) { return std::pow(x, r); });
    case TypeDistribution::Kind::kGammaMeanOne: {
      const double k = f.parameter();
      if (k + r <= 0.0) return {ExtendedReal::infinite(), false};
      // E[Y^r] = Gamma(k + r) / (Gamma(k) k^r) for Y ~ Gamma(k, 1/k).
      const double log_m = std::lgamma(k + r) - std::lgamma(k) - r * std::log(k) +
                           r * std::log(f.scale());
      return {std::exp(log_m), false};
    }
    case TypeDistribution::Kind::kLogNormalMeanOne: {
      const double s2 = f.parameter() * f.parameter();
      return {std::exp(0.5 * s2 * (r * r - r) + r * std::log(f.scale())), false};
    }
  }
  return {};
}

MomentEstimate log_moment(const TypeDistribution& f, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("log-moment order must be positive");
  auto g = [p](double x) { return std::pow(std::fabs(std::log(x)), p); };
  switch (f.kind()) {
    case TypeDistribution::Kind::kAtomic: {
      double s = 0.0;
      for (const auto& a : f.atoms()) s += a.weight * g(a.location);
      return {s, false};
    }
    case TypeDistribution::Kind::kQuantileGrid:
      return grid_average(f.grid(), g);
    default:
      // Gamma and log-normal laws have all logarithmic moments.
      return {parametric_expectation(f, g), false};
  }
}

double quantile(const TypeDistribution& f, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  switch (f.kind()) {
    case TypeDistribution::Kind::kAtomic: {
      const auto atoms = f.atoms();
      double cum = 0.0;
      for (const auto& a : atoms) {
        cum += a.weight;
        if (cum >= u) return a.location;
      }
      return atoms.back().location;
    }
    case TypeDistribution::Kind::kQuantileGrid: {
      const auto q = f.grid();
      const double n = static_cast<double>(q.size());
      auto j = static_cast<std::size_t>(std::ceil(u * n));
      j = std::clamp<std::size_t>(j, 1, q.size());
      return q[j - 1];
    }
    default:
      return f.scale() * (u <= 0.5 ? parametric_unit_quantile(f.kind(), f.parameter(), u)
                                   : parametric_unit_upper_quantile(f.kind(), f.parameter(),
                                                                    1.0 - u));
  }
}

ExtendedReal misallocation_index(const TypeDistribution& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("misallocation index needs p >= 1");
  auto g = [p](double x) { return std::pow(std::fabs(x - 1.0), p); };
  double integral = 0.0;
  switch (f.kind()) {
    case TypeDistribution::Kind::kAtomic:
      for (const auto& a : f.atoms()) integral += a.weight * g(a.location);
      break;
    case TypeDistribution::Kind::kQuantileGrid:
      integral = grid_average(f.grid(), g).value.value_or_inf();
      break;
    default:
      if (moment(f, p).value.is_infinite()) return ExtendedReal::infinite();
      integral = parametric_expectation(f, g, 1.0);
      break;
  }
  if (!std::isfinite(integral)) return ExtendedReal::infinite();
  return std::pow(integral, 1.0 / p);
}

ConvexOrderResult convex_order_leq(const TypeDistribution& first,
                                   const TypeDistribution& second) {
  if (std::fabs(first.mean() - second.mean()) > 1e-10) {
    throw PreconditionError("convex order needs equal means");
  }
  ConvexOrderResult result;
  auto a = atoms_of(first, &result.discretized);
  auto b = atoms_of(second, &result.discretized);

  std::vector<double> points;
  points.reserve(a.size() + b.size());
  for (const auto& x : a) points.push_back(x.location);
  for (const auto& x : b) points.push_back(x.location);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const IntegratedSurvival pi_first(std::move(a));
  const IntegratedSurvival pi_second(std::move(b));
  for (double x : points) {
    if (pi_second(x) < pi_first(x) - 1e-12) {
      result.witness = x;
      return result;
    }
  }
  result.holds = true;
  return result;
}

}  // namespace hevt
