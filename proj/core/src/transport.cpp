#include "hevt/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hevt/errors.hpp"
#include "hevt/quadrature.hpp"

namespace hevt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("Wasserstein order must be >= 1");
}

void require_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic time must lie in [0,1]");
}

// Piece of the monotone coupling: mass `length` moved from xa to xb.
struct Piece {
  double length;
  double xa;
  double xb;
};

std::vector<Atom> sorted(std::span<const Atom> atoms) {
  std::vector<Atom> out(atoms.begin(), atoms.end());
  std::sort(out.begin(), out.end(),
            [](const Atom& l, const Atom& r) { return l.location < r.location; });
  return out;
}

std::vector<double> cumulative(const std::vector<Atom>& atoms) {
  std::vector<double> c(atoms.size());
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) c[i] = (s += atoms[i].weight);
  c.back() = 1.0;
  return c;
}

// Common refinement of the two quantile staircases.
std::vector<Piece> monotone_coupling(std::span<const Atom> a_in, std::span<const Atom> b_in) {
  if (a_in.empty() || b_in.empty()) throw DomainError("coupling needs nonempty atom lists");
  const auto a = sorted(a_in);
  const auto b = sorted(b_in);
  const auto ca = cumulative(a);
  const auto cb = cumulative(b);
  std::vector<Piece> pieces;
  pieces.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next = std::min(ca[i], cb[j]);
    if (next > prev) pieces.push_back({next - prev, a[i].location, b[j].location});
    prev = next;
    if (ca[i] <= next) ++i;
    if (cb[j] <= next) ++j;
  }
  return pieces;
}

double piece_cost(double d, double p) { return p == 1.0 ? std::fabs(d) : std::pow(std::fabs(d), p); }

// Quantile values at the N midpoints.
std::vector<double> midpoint_values(const TypeDistribution& f, std::size_t n) {
  if (!f.is_atomic() && f.grid().size() == n) return {f.grid().begin(), f.grid().end()};
  const auto grid = f.to_grid(n);
  return {grid.grid().begin(), grid.grid().end()};
}

// Midpoint quantiles of the pushforward under s_gamma, nondecreasing.
std::vector<double> pushforward_values(TailIndex gamma, const TypeDistribution& f,
                                       std::size_t n) {
  auto v = midpoint_values(f, n);
  for (auto& x : v) x = adapted_transform(gamma, x);
  if (gamma.value() < 0.0) std::reverse(v.begin(), v.end());
  return v;
}

std::vector<Atom> pushforward_atoms(TailIndex gamma, const TypeDistribution& f) {
  std::vector<Atom> out;
  for (const auto& a : f.atoms()) out.push_back({adapted_transform(gamma, a.location), a.weight});
  return out;
}

double grid_pp(const std::vector<double>& a, const std::vector<double>& b, double p) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += piece_cost(a[j] - b[j], p);
  return s / static_cast<double>(a.size());
}

bool adapted_moment_infinite(TailIndex gamma, double p, const TypeDistribution& f) {
  if (f.is_atomic()) return false;
  if (gamma.value() == 0.0) return log_moment(f, p).value.is_infinite();
  return moment(f, gamma.value() * p).value.is_infinite();
}

}  // namespace

const char* method_name(MetricMethod m) {
  return m == MetricMethod::kExactAtomic ? "exact-atomic" : "quantile-grid";
}

double wasserstein_pp_atoms(std::span<const Atom> a, std::span<const Atom> b, double p) {
  require_order(p);
  double s = 0.0;
  for (const auto& piece : monotone_coupling(a, b)) s += piece.length * piece_cost(piece.xa - piece.xb, p);
  return s;
}

MetricReport wasserstein_p(const TypeDistribution& mu, const TypeDistribution& nu, double p,
                           std::size_t grid) {
  require_order(p);
  MetricReport r;
  r.p = p;
  if (mu.is_atomic() && nu.is_atomic()) {
    r.method = MetricMethod::kExactAtomic;
    r.value = std::pow(wasserstein_pp_atoms(mu.atoms(), nu.atoms(), p), 1.0 / p);
    return r;
  }
  r.method = MetricMethod::kQuantileGrid;
  r.grid_size = grid;
  if ((!mu.is_atomic() && moment(mu, p).value.is_infinite()) ||
      (!nu.is_atomic() && moment(nu, p).value.is_infinite())) {
    r.value = ExtendedReal::infinite();
    return r;
  }
  r.value = std::pow(grid_pp(midpoint_values(mu, grid), midpoint_values(nu, grid), p), 1.0 / p);
  return r;
}

MetricReport adapted_distance(TailIndex gamma, double p, const TypeDistribution& f1,
                              const TypeDistribution& f2, std::size_t grid) {
  require_order(p);
  MetricReport r;
  r.p = p;
  if (f1.is_atomic() && f2.is_atomic()) {
    r.method = MetricMethod::kExactAtomic;
    const auto a = pushforward_atoms(gamma, f1);
    const auto b = pushforward_atoms(gamma, f2);
    r.value = std::pow(wasserstein_pp_atoms(a, b, p), 1.0 / p);
    return r;
  }
  r.method = MetricMethod::kQuantileGrid;
  r.grid_size = grid;
  if (adapted_moment_infinite(gamma, p, f1) || adapted_moment_infinite(gamma, p, f2)) {
    r.value = ExtendedReal::infinite();
    return r;
  }
  r.value = std::pow(
      grid_pp(pushforward_values(gamma, f1, grid), pushforward_values(gamma, f2, grid), p),
      1.0 / p);
  return r;
}

double stability_constant(TailIndex gamma, double p) {
  require_order(p);
  const double g = gamma.value();
  if (g == 0.0) return 1.0;
  if (g > 0.0) {
    if (p * g >= 1.0) {
      throw RegimeError("p*gamma = " + std::to_string(p * g) +
                        " >= 1: E[E^{-p gamma}] = Gamma(1 - p gamma) is infinite");
    }
    return std::pow(std::tgamma(1.0 - p * g), 1.0 / p) / g;
  }
  return std::pow(std::tgamma(1.0 + p * std::fabs(g)), 1.0 / p) / std::fabs(g);
}

InducedDistance induced_wasserstein(TailIndex gamma, double p, const TypeDistribution& f1,
                                    const TypeDistribution& f2, std::size_t cells) {
  require_order(p);
  const double g = gamma.value();
  if (g > 0.0 && p * g >= 1.0) {
    throw RegimeError("induced laws have no finite p-th moment when p*gamma >= 1 (p*gamma = " +
                      std::to_string(p * g) + ")");
  }
  const HevLaw l1(gamma, f1);
  const HevLaw l2(gamma, f2);
  auto lower = [&](double u) { return piece_cost(hev_quantile(l1, u) - hev_quantile(l2, u), p); };
  auto upper = [&](double s) {
    return piece_cost(hev_quantile_upper(l1, s) - hev_quantile_upper(l2, s), p);
  };
  const auto integral =
      quadrature::integrate_unit_interval(lower, upper, cells, g > 0.0 ? p * g : 0.0);
  return {std::pow(std::max(integral.value, 0.0), 1.0 / p), integral.truncation, cells};
}

StabilityCertificate certify_stability(TailIndex gamma, double p, const TypeDistribution& f1,
                                       const TypeDistribution& f2, std::size_t grid) {
  StabilityCertificate c;
  c.gamma = gamma.value();
  c.p = p;
  c.constant = stability_constant(gamma, p);
  c.metric = adapted_distance(gamma, p, f1, f2, grid).value;
  if (c.metric.is_infinite()) {
    c.vacuous = true;
    c.passed = true;
    c.bound = kInf;
    c.slack = kInf;
    return c;
  }
  const auto induced = induced_wasserstein(gamma, p, f1, f2, grid);
  c.lhs = induced.value;
  c.truncation = induced.truncation;
  c.bound = c.constant * c.metric.value();
  c.slack = c.bound - c.lhs;
  c.passed = c.slack >= -kCertificateTolerance * std::max(c.bound, c.lhs);
  return c;
}

TypeDistribution raw_geodesic(const TypeDistribution& f0, const TypeDistribution& f1, double t,
                              std::size_t grid) {
  require_time(t);
  if (f0.is_atomic() && f1.is_atomic()) {
    std::vector<Atom> atoms;
    for (const auto& piece : monotone_coupling(f0.atoms(), f1.atoms())) {
      atoms.push_back({(1.0 - t) * piece.xa + t * piece.xb, piece.length});
    }
    return TypeDistribution::atomic(std::move(atoms));
  }
  const auto a = midpoint_values(f0, grid);
  const auto b = midpoint_values(f1, grid);
  std::vector<double> q(grid);
  for (std::size_t j = 0; j < grid; ++j) q[j] = (1.0 - t) * a[j] + t * b[j];
  return TypeDistribution::quantile_grid(std::move(q));
}

TypeDistribution adapted_geodesic(TailIndex gamma, double p, const TypeDistribution& f0,
                                  const TypeDistribution& f1, double t, std::size_t grid) {
  require_time(t);
  if (adapted_distance(gamma, p, f0, f1, grid).value.is_infinite()) {
    throw DomainError("adapted distance between the endpoints is infinite");
  }
  if (f0.is_atomic() && f1.is_atomic()) {
    std::vector<Atom> atoms;
    const auto a = pushforward_atoms(gamma, f0);
    const auto b = pushforward_atoms(gamma, f1);
    for (const auto& piece : monotone_coupling(a, b)) {
      const double y = (1.0 - t) * piece.xa + t * piece.xb;
      atoms.push_back({inverse_adapted_transform(gamma, y), piece.length});
    }
    return TypeDistribution::atomic(std::move(atoms));
  }
  const auto a = pushforward_values(gamma, f0, grid);
  const auto b = pushforward_values(gamma, f1, grid);
  std::vector<double> q(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    q[j] = inverse_adapted_transform(gamma, (1.0 - t) * a[j] + t * b[j]);
  }
  if (gamma.value() < 0.0) std::reverse(q.begin(), q.end());
  return TypeDistribution::quantile_grid(std::move(q));
}

RenormalizationBridge renormalization_bridge(TailIndex gamma, double p,
                                             const TypeDistribution& f, std::size_t grid) {
  require_order(p);
  RenormalizationBridge r;
  r.mean = f.mean();
  if (!(r.mean > 0.0) || !std::isfinite(r.mean)) throw DomainError("mean must be finite and positive");
  const double g = gamma.value();
  if (g == 0.0) {
    r.distance = std::fabs(std::log(r.mean));
  } else {
    const auto m = moment(f, g * p).value;
    if (m.is_infinite()) {
      throw DivergenceError("transformed moment E[X^{gamma p}] is infinite");
    }
    r.distance = std::fabs(std::expm1(-g * std::log(r.mean))) * std::pow(m.value(), 1.0 / p);
  }
  const auto direct = adapted_distance(gamma, p, f, f.renormalized(), grid).value;
  if (direct.is_infinite()) throw DivergenceError("adapted distance to the rescaled law is infinite");
  r.direct = direct.value();
  r.agrees = std::fabs(r.distance - r.direct) <= 1e-9 * std::max(1.0, r.distance);
  try {
    r.induced_bound = stability_constant(gamma, p) * r.distance;
  } catch (const RegimeError&) {
  }
  return r;
}

PointwiseBound pointwise_cdf_bound(TailIndex gamma, const TypeDistribution& f1,
                                   const TypeDistribution& f2, double x) {
  if (!gamma.in_interior(x)) {
    throw DomainError("x=" + std::to_string(x) + " is not interior to the support of H_gamma");
  }
  const double v = tail_transform(gamma, x).value();
  PointwiseBound r;
  r.gap = std::fabs(hev_cdf(HevLaw(gamma, f1), x) - hev_cdf(HevLaw(gamma, f2), x));
  r.bound = v * wasserstein_p(f1, f2, 1.0).value.value_or_inf();
  r.passed = r.gap <= r.bound + 1e-12;
  return r;
}

MetricBridge metric_bridge(TailIndex gamma, double p, const TypeDistribution& f1,
                           const TypeDistribution& f2, std::optional<double> support_floor,
                           std::size_t grid) {
  const double g = gamma.value();
  if (g > 1.0) throw RegimeError("metric bridge covers gamma <= 1 only");
  if (g <= 0.0) {
    if (!support_floor) throw PreconditionError("gamma <= 0 needs a support floor a > 0");
    if (!(*support_floor > 0.0)) throw DomainError("support floor must be positive");
    if (f1.support_min() < *support_floor || f2.support_min() < *support_floor) {
      throw PreconditionError("a support lies below the floor a=" + std::to_string(*support_floor));
    }
  }
  MetricBridge r;
  r.adapted = adapted_distance(gamma, p, f1, f2, grid).value.value_or_inf();
  r.raw = wasserstein_p(f1, f2, p, grid).value.value_or_inf();
  if (g > 0.0) {
    r.exponent = g;
    r.bound = std::pow(r.raw, g);
  } else if (g < 0.0) {
    r.bound = std::fabs(g) * std::pow(*support_floor, g - 1.0) * r.raw;
  } else {
    r.bound = r.raw / *support_floor;
  }
  r.passed = r.adapted <= r.bound + 1e-9;
  return r;
}

FunctionalGap lipschitz_functional_gap(TailIndex gamma, const TypeDistribution& f1,
                                       const TypeDistribution& f2,
                                       const std::function<double(double)>& psi,
                                       double lipschitz_constant, std::size_t grid) {
  if (!(lipschitz_constant >= 0.0)) throw DomainError("Lipschitz constant must be nonnegative");
  FunctionalGap r;
  r.gap = std::fabs(kernel_expectation(HevLaw(gamma, f1), psi) -
                    kernel_expectation(HevLaw(gamma, f2), psi));
  r.induced_w1 = induced_wasserstein(gamma, 1.0, f1, f2, grid).value;
  r.bound = lipschitz_constant * r.induced_w1;
  // Kernel quadrature error plus the relative grid error of the induced W_1.
  r.passed = r.gap <= r.bound + 1e-8 + kCertificateTolerance * r.bound;
  return r;
}

}  // namespace hevt
