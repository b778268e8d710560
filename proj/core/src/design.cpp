#include "hevt/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hevt/errors.hpp"
#include "hevt/rng.hpp"

namespace hevt {
namespace {

constexpr double kMaxBracket = 1048576.0;  // 2^20
constexpr double kMeanTolerance = 1e-10;

struct TiltEval {
  double log_z = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

double log_sum_exp(const std::vector<double>& a) {
  const double m = *std::max_element(a.begin(), a.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : a) s += std::exp(v - m);
  return m + std::log(s);
}

// Baseline atoms, score values and the upper-tail model used to decide
// whether Z(eta) is finite for the underlying continuous baseline.
class PreparedTilt {
 public:
  explicit PreparedTilt(const TiltProblem& problem) : problem_(problem) {
    if (!(problem.lambda > 0.0) || !std::isfinite(problem.lambda)) {
      throw DomainError("lambda must be finite and positive");
    }
    const auto& f0 = problem.baseline;
    if (!f0.is_mean_one()) {
      throw PreconditionError("tilt baseline must have mean one (mean = " +
                              std::to_string(f0.mean()) + ")");
    }
    if (!problem.score.fn) throw DomainError("score function is empty");
    const auto& sc = problem.score;
    if (sc.kind == ScoreKind::kPower && sc.c > 0.0 && sc.rho < 0.0 && !f0.is_atomic()) {
      if (!problem.support_floor) {
        throw AdmissibilityError(
            "inverse-power score on a non-atomic baseline: int x^rho dF0 near 0 needs a declared "
            "support floor");
      }
      if (!(f0.support_min() >= *problem.support_floor) || *problem.support_floor <= 0.0) {
        throw AdmissibilityError("baseline support reaches below the declared floor " +
                                 std::to_string(*problem.support_floor));
      }
    }
    discretized_ = !f0.is_atomic();
    const auto atomic = discretized_ ? f0.to_atomic() : f0;
    for (const auto& a : atomic.atoms()) {
      x_.push_back(a.location);
      log_w0_.push_back(std::log(a.weight));
      const double s = sc(a.location);
      if (!std::isfinite(s)) {
        std::ostringstream os;
        os << "score " << sc.name << " is not finite at x=" << a.location;
        throw AdmissibilityError(os.str());
      }
      psi_.push_back(s);
      atoms_.push_back(a);
    }
    if (discretized_) fit_tail();
  }

  bool discretized() const { return discretized_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& psi() const { return psi_; }
  double lambda() const { return problem_.lambda; }

  std::vector<double> exponents(double eta) const {
    std::vector<double> a(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) {
      a[i] = log_w0_[i] + (psi_[i] + eta * x_[i]) / problem_.lambda;
    }
    return a;
  }

  TiltEval eval(double eta) const {
    const auto a = exponents(eta);
    TiltEval e;
    e.log_z = log_sum_exp(a);
    double m = 0.0;
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      p[i] = std::exp(a[i] - e.log_z);
      m += p[i] * x_[i];
    }
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) v += p[i] * (x_[i] - m) * (x_[i] - m);
    e.mean = m;
    e.variance = v;
    return e;
  }

  // Atomic baselines always have finite Z. For discretized baselines the
  // integrand exp((psi + eta x)/lambda) S(x) is extrapolated beyond the top
  // node with the fitted hazard; growth there means Z(eta) diverges.
  bool admissible(double eta) const {
    if (!discretized_ || !std::isfinite(hazard_)) return true;
    double prev = -std::numeric_limits<double>::infinity();
    int rising = 0;
    for (int k = 4; k <= 12; ++k) {
      const double x = top_ * std::ldexp(1.0, k);
      const double s = problem_.score(x);
      if (!std::isfinite(s)) return false;
      const double e = (s + eta * x) / problem_.lambda + log_surv_top_ - hazard_ * (x - top_);
      rising = e > prev ? rising + 1 : 0;
      prev = e;
    }
    return rising < 3;
  }

 private:
  void fit_tail() {
    const std::size_t n = x_.size();
    const std::size_t k = std::min<std::size_t>(32, n - 1);
    if (k == 0) return;
    const double nn = static_cast<double>(n);
    const double log_s_top = std::log(0.5 / nn);
    const double log_s_low = std::log((static_cast<double>(k) + 0.5) / nn);
    const double dx = x_[n - 1] - x_[n - 1 - k];
    top_ = x_[n - 1];
    log_surv_top_ = log_s_top;
    hazard_ = dx > 0.0 ? (log_s_low - log_s_top) / dx : std::numeric_limits<double>::infinity();
  }

  const TiltProblem& problem_;
  bool discretized_ = false;
  std::vector<Atom> atoms_;
  std::vector<double> x_;
  std::vector<double> log_w0_;
  std::vector<double> psi_;
  double top_ = 0.0;
  double log_surv_top_ = 0.0;
  double hazard_ = std::numeric_limits<double>::infinity();
};

// Finds eta on the side `direction` with sign(m(eta) - 1) == direction.
double expand_bracket(const PreparedTilt& t, double direction) {
  double last_ok = 0.0;
  double b = 1.0;
  auto found = [&](double eta) { return direction * (t.eval(eta).mean - 1.0) > 0.0; };
  while (b <= kMaxBracket) {
    if (t.admissible(direction * b)) {
      if (found(direction * b)) return direction * b;
      last_ok = b;
      b *= 2.0;
      continue;
    }
    double bad = b;
    for (int iter = 0; iter < 60; ++iter) {
      const double mid = 0.5 * (last_ok + bad);
      if (t.admissible(direction * mid)) {
        if (found(direction * mid)) return direction * mid;
        last_ok = mid;
      } else {
        bad = mid;
      }
    }
    break;
  }
  std::ostringstream os;
  os << "no sign change of m(eta) - 1 for " << (direction > 0 ? "0 < eta <= " : "0 > eta >= -")
     << std::min(b, kMaxBracket) << " on the admissible range; the mean constraint is not "
     << "interior to the tilt family";
  throw BracketError(os.str());
}

}  // namespace

const char* score_kind_name(ScoreKind k) {
  switch (k) {
    case ScoreKind::kCdf: return "cdf";
    case ScoreKind::kExpectedUtility: return "expected_utility";
    case ScoreKind::kPower: return "power";
    case ScoreKind::kCustom: return "custom";
  }
  return "custom";
}

Score cdf_score(TailIndex gamma, double y) {
  const ExtendedReal v = tail_transform(gamma, y);
  if (v.is_infinite()) throw DomainError("cdf score threshold lies below the support of H_gamma");
  Score s;
  s.kind = ScoreKind::kCdf;
  s.gamma = gamma.value();
  s.y = y;
  std::ostringstream os;
  os << "cdf(gamma=" << gamma.value() << ", y=" << y << ")";
  s.name = os.str();
  const double vy = v.value();
  s.fn = [vy](double x) { return std::exp(-vy * x); };
  return s;
}

double expected_utility_score(TailIndex gamma, const std::function<double(double)>& u, double x,
                              int quad_nodes) {
  return kernel_at(gamma, u, x, quad_nodes);
}

Score expected_utility(TailIndex gamma, std::function<double(double)> u, std::string name,
                       int quad_nodes) {
  Score s;
  s.kind = ScoreKind::kExpectedUtility;
  s.gamma = gamma.value();
  s.name = std::move(name);
  s.fn = [gamma, u = std::move(u), quad_nodes](double x) {
    return kernel_at(gamma, u, x, quad_nodes);
  };
  return s;
}

Score power_score(double c, double rho) {
  if (!std::isfinite(c) || !std::isfinite(rho)) throw DomainError("power score needs finite C and rho");
  Score s;
  s.kind = ScoreKind::kPower;
  s.c = c;
  s.rho = rho;
  std::ostringstream os;
  os << "power(C=" << c << ", rho=" << rho << ")";
  s.name = os.str();
  s.fn = [c, rho](double x) { return c * std::pow(x, rho); };
  return s;
}

Score constant_score(double value) {
  std::ostringstream os;
  os << "constant(" << value << ")";
  return custom_score(os.str(), [value](double) { return value; });
}

Score custom_score(std::string name, std::function<double(double)> fn) {
  Score s;
  s.kind = ScoreKind::kCustom;
  s.name = std::move(name);
  s.fn = std::move(fn);
  return s;
}

double tilted_mean(const TiltProblem& problem, double eta) {
  const PreparedTilt t(problem);
  if (!t.admissible(eta)) {
    throw AdmissibilityError("Z(eta) = int exp((psi + eta x)/lambda) dF0 diverges at eta=" +
                             std::to_string(eta));
  }
  return t.eval(eta).mean;
}

double dual_objective(const TiltProblem& problem, double eta) {
  const PreparedTilt t(problem);
  return problem.lambda * t.eval(eta).log_z - eta;
}

std::vector<double> tilt_weights(const TiltProblem& problem, double eta) {
  const PreparedTilt t(problem);
  const auto a = t.exponents(eta);
  const double log_z = log_sum_exp(a);
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = std::exp(a[i] - log_z);
  return p;
}

TiltSolution solve_tilt(const TiltProblem& problem) {
  const PreparedTilt t(problem);
  if (!t.admissible(0.0)) {
    throw AdmissibilityError("Z(0) = int exp(psi/lambda) dF0 diverges for score " +
                             problem.score.name + ": the baseline tail is too heavy");
  }
  TiltSolution sol;
  sol.discretized = t.discretized();
  const TiltEval at_zero = t.eval(0.0);
  double eta = 0.0;
  int iterations = 0;
  if (std::fabs(at_zero.mean - 1.0) > 1e-14) {
    if (at_zero.variance == 0.0) {
      throw BracketError("degenerate baseline: m(eta) is constant and differs from 1");
    }
    double lo = 0.0;
    double hi = 0.0;
    if (at_zero.mean < 1.0) hi = expand_bracket(t, 1.0); else lo = expand_bracket(t, -1.0);
    for (; iterations < 200; ++iterations) {
      const TiltEval e = t.eval(eta);
      const double f = e.mean - 1.0;
      if (std::fabs(f) <= 1e-14) break;
      if (f < 0.0) lo = eta; else hi = eta;
      const double slope = e.variance / problem.lambda;
      double next = slope > 0.0 ? eta - f / slope : lo - 1.0;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::fabs(next - eta) <= 1e-16 * std::max(1.0, std::fabs(eta))) {
        eta = next;
        break;
      }
      eta = next;
    }
  }
  const auto a = t.exponents(eta);
  const double log_z = log_sum_exp(a);
  std::vector<double> p(a.size());
  double mean = 0.0;
  double linear = 0.0;
  double kl = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double log_p = a[i] - log_z;
    p[i] = std::exp(log_p);
    mean += p[i] * t.atoms()[i].location;
    linear += p[i] * t.psi()[i];
    if (p[i] > 0.0) kl += p[i] * (log_p - std::log(t.atoms()[i].weight));
  }
  if (std::fabs(mean - 1.0) > kMeanTolerance) {
    std::ostringstream os;
    os << "tilt root finder stopped with |m(eta) - 1| = " << std::fabs(mean - 1.0);
    throw DivergenceError(os.str());
  }
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < p.size(); ++i) atoms.push_back({t.atoms()[i].location, p[i]});
  sol.eta_star = eta;
  sol.optimizer = TypeDistribution::atomic(atoms);
  sol.baseline_atoms = t.atoms();
  sol.weights = std::move(p);
  sol.kl = std::max(kl, 0.0);
  sol.primal_value = linear - problem.lambda * sol.kl;
  sol.dual_value = problem.lambda * log_z - eta;
  sol.mean_residual = mean - 1.0;
  sol.iterations = iterations;
  return sol;
}

ExtendedReal kl_divergence(const TypeDistribution& f, const TypeDistribution& f0) {
  auto atoms_of = [](const TypeDistribution& d, std::size_t n) {
    if (d.is_atomic()) return d;
    if (d.is_parametric()) {
      throw PreconditionError("relative entropy needs atomic or common-grid representations");
    }
    return d.to_atomic(n);
  };
  const std::size_t n = !f0.is_atomic() && !f0.is_parametric() ? f0.grid().size() : kDefaultGridSize;
  const auto fa = atoms_of(f, n);
  const auto fb = atoms_of(f0, n);
  const auto a = fa.atoms();
  const auto b = fb.atoms();
  double s = 0.0;
  std::size_t j = 0;
  for (const auto& atom : a) {
    while (j < b.size() && b[j].location < atom.location &&
           std::fabs(b[j].location - atom.location) > 1e-12 * atom.location) {
      ++j;
    }
    if (j == b.size() || std::fabs(b[j].location - atom.location) > 1e-12 * atom.location) {
      return ExtendedReal::infinite();
    }
    s += atom.weight * std::log(atom.weight / b[j].weight);
  }
  return std::max(s, 0.0);
}

PairwiseOdds pairwise_odds(const TiltProblem& problem, const TiltSolution& solution,
                           std::size_t i, std::size_t j) {
  const auto& atoms = solution.baseline_atoms;
  if (i >= atoms.size() || j >= atoms.size()) throw DomainError("atom index out of range");
  if (!(atoms[i].weight > 0.0) || !(atoms[j].weight > 0.0)) {
    throw PreconditionError("pairwise odds need positive baseline weights");
  }
  PairwiseOdds r;
  if (i == j) return r;
  r.from_weights =
      (solution.weights[i] / solution.weights[j]) / (atoms[i].weight / atoms[j].weight);
  const double xi = atoms[i].location;
  const double xj = atoms[j].location;
  r.closed_form = std::exp((problem.score(xi) - problem.score(xj) + solution.eta_star * (xi - xj)) /
                           problem.lambda);
  r.difference = std::fabs(r.from_weights - r.closed_form) / std::max(1.0, r.closed_form);
  return r;
}

DvCheck dv_check(const TypeDistribution& f0, const std::function<double(double)>& f,
                 std::uint64_t seed, std::size_t samples) {
  const auto base = f0.is_atomic() ? f0 : f0.to_atomic();
  const auto atoms = base.atoms();
  const std::size_t n = atoms.size();
  std::vector<double> fx(n);
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    fx[i] = f(atoms[i].location);
    if (!std::isfinite(fx[i])) throw DivergenceError("f is not finite on the support of F0");
    a[i] = std::log(atoms[i].weight) + fx[i];
  }
  DvCheck r;
  r.lhs = log_sum_exp(a);
  auto objective = [&](const std::vector<double>& q) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (q[i] > 0.0) v += q[i] * fx[i] - q[i] * std::log(q[i] / atoms[i].weight);
    }
    return v;
  };
  std::vector<double> gibbs(n);
  for (std::size_t i = 0; i < n; ++i) gibbs[i] = std::exp(a[i] - r.lhs);
  r.rhs_at_gibbs = objective(gibbs);
  r.gap = r.lhs - r.rhs_at_gibbs;

  Rng rng(seed);
  r.max_random_rhs = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    std::vector<double> q;
    if (k % 2 == 0) {
      q = rng.flat_dirichlet(n);
    } else {
      q.resize(n);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += (q[i] = gibbs[i] * std::exp(rng.uniform() - 0.5));
      for (auto& v : q) v /= total;
    }
    const double v = objective(q);
    r.max_random_rhs = std::max(r.max_random_rhs, v);
    if (v > r.lhs + 1e-12) r.weak_duality_holds = false;
  }
  return r;
}

}  // namespace hevt
