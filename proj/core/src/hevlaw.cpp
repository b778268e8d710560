#include "hevt/hevlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hevt/errors.hpp"
#include "hevt/quadrature.hpp"
#include "hevt/rng.hpp"
#include "hevt/parallel.hpp"

namespace hevt {
namespace {

// Largest z worth searching: beyond 700 / min support every e^{-zx}
// underflows. Families whose support reaches 0 are capped at 1e300.
double z_cap(const TypeDistribution& f) {
  const double lo = f.support_min();
  return lo > 0.0 ? std::max(700.0 / lo, 1.0) : 1e300;
}

// Root of an increasing phi on [0, cap] with phi(0) < 0, by Newton steps
// kept inside a bisection bracket. Returns cap when phi(cap) < 0.
template <class Phi, class DPhi>
double solve_increasing(Phi phi, DPhi dphi, double start, double cap) {
  double lo = 0.0;
  double hi = std::min(1.0, cap);
  while (phi(hi) < 0.0) {
    if (hi >= cap) return cap;
    lo = hi;
    hi = std::min(2.0 * hi, cap);
  }
  double z = (start > lo && start < hi) ? start : hi;
  for (int iter = 0; iter < 400; ++iter) {
    const double f = phi(z);
    if (f == 0.0) return z;
    if (f < 0.0) lo = z; else hi = z;
    const double d = dphi(z);
    double next = (d > 0.0) ? z - f / d : -1.0;
    if (!(next > lo && next < hi)) {
      next = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    if (std::fabs(next - z) <= 2e-16 * next || hi - lo <= 2e-16 * hi) return next;
    z = next;
  }
  return z;
}

void require_level(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("probability level must lie in (0,1)");
}

}  // namespace

double laplace_inverse(const TypeDistribution& f, double u) {
  require_level(u);
  if (u > 0.5) return laplace_inverse_complement(f, 1.0 - u);
  return solve_increasing([&](double z) { return u - laplace_transform(f, z); },
                          [&](double z) { return laplace_slope(f, z); }, -1.0, z_cap(f));
}

double laplace_inverse_complement(const TypeDistribution& f, double s) {
  require_level(s);
  if (s > 0.5) return laplace_inverse(f, 1.0 - s);
  return solve_increasing([&](double z) { return laplace_complement(f, z) - s; },
                          [&](double z) { return laplace_slope(f, z); }, s / f.mean(),
                          z_cap(f));
}

double hev_cdf(const HevLaw& law, double x) {
  const ExtendedReal v = tail_transform(law.gamma(), x);
  if (v.is_infinite()) return 0.0;
  return laplace_transform(law.mixing(), v.value());
}

double hev_quantile(const HevLaw& law, double u) {
  return inverse_tail_transform(law.gamma(), laplace_inverse(law.mixing(), u));
}

double hev_quantile_upper(const HevLaw& law, double s) {
  return inverse_tail_transform(law.gamma(), laplace_inverse_complement(law.mixing(), s));
}

std::vector<double> sample(const HevLaw& law, std::uint64_t seed, std::size_t n) {
  if (n == 0) throw DomainError("sample size must be at least 1");
  std::vector<double> out(n);
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  const double g = law.gamma().value();
  detail::parallel_for(chunks, [&](std::size_t c) {
    Rng rng(derive_seed(seed, c));
    const std::size_t end = std::min(n, (c + 1) * kSampleChunk);
    for (std::size_t i = c * kSampleChunk; i < end; ++i) {
      const double x = quantile(law.mixing(), rng.uniform());
      const double e = rng.exponential();
      const double log_ratio = std::log(x) - std::log(e);  // -log(E/X)
      out[i] = (g == 0.0) ? log_ratio : std::expm1(g * log_ratio) / g;
    }
  });
  return out;
}

double kernel_at(TailIndex gamma, const std::function<double(double)>& psi, double x,
                 int quad_nodes) {
  if (!(x > 0.0)) throw DomainError("kernel needs a positive type");
  if (quad_nodes < 64) throw DomainError("kernel quadrature needs at least 64 nodes");
  const double g = gamma.value();
  const double log_x = std::log(x);
  auto integrand = [&](double e) {
    const double log_ratio = log_x - std::log(e);
    return psi(g == 0.0 ? log_ratio : std::expm1(g * log_ratio) / g);
  };
  return quadrature::exponential_expectation(integrand, quad_nodes).value;
}

double kernel_expectation(const HevLaw& law, const std::function<double(double)>& psi,
                          int quad_nodes) {
  const auto& f = law.mixing();
  if (f.is_atomic()) {
    double s = 0.0;
    for (const auto& a : f.atoms()) s += a.weight * kernel_at(law.gamma(), psi, a.location, quad_nodes);
    return s;
  }
  const auto q = f.grid();
  std::vector<double> values(q.size());
  detail::parallel_for(q.size(), [&](std::size_t j) {
    values[j] = kernel_at(law.gamma(), psi, q[j], quad_nodes);
  });
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(q.size());
}

double gateaux_derivative(const HevLaw& law, const SignedPerturbation& nu, double x) {
  if (!nu.is_balanced()) {
    throw PreconditionError("perturbation must have zero total mass and zero first moment");
  }
  const ExtendedReal v = tail_transform(law.gamma(), x);
  if (v.is_infinite()) {
    throw PreconditionError("v_gamma(x) is infinite at x=" + std::to_string(x));
  }
  double s = 0.0;
  for (const auto& a : nu.atoms) s += a.weight * std::exp(-v.value() * a.location);
  return s;
}

double hev_cdf_perturbed(const HevLaw& law, const SignedPerturbation& nu, double eps,
                         double x) {
  const auto& f = law.mixing();
  if (!f.is_atomic()) throw PreconditionError("perturbed cdf needs an atomic mixing law");
  std::vector<Atom> merged(f.atoms().begin(), f.atoms().end());
  for (const auto& a : nu.atoms) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Atom& m) { return m.location == a.location; });
    if (it != merged.end()) {
      it->weight += eps * a.weight;
    } else {
      merged.push_back({a.location, eps * a.weight});
    }
  }
  const ExtendedReal v = tail_transform(law.gamma(), x);
  if (v.is_infinite()) return 0.0;
  double s = 0.0;
  for (const auto& m : merged) s += m.weight * std::exp(-v.value() * m.location);
  return s;
}

}  // namespace hevt
