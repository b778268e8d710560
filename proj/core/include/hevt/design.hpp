#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hevt/extended_real.hpp"
#include "hevt/gevcore.hpp"
#include "hevt/hevlaw.hpp"
#include "hevt/typedist.hpp"

namespace hevt {

enum class ScoreKind { kCdf, kExpectedUtility, kPower, kCustom };

const char* score_kind_name(ScoreKind k);

/// Score psi(x) of the linear design objective int psi dF.
struct Score {
  ScoreKind kind = ScoreKind::kCustom;
  std::string name;
  std::function<double(double)> fn;
  double gamma = 0.0;  // cdf and expected-utility scores
  double y = 0.0;      // cdf threshold
  double c = 0.0;      // power score coefficient
  double rho = 0.0;    // power score exponent

  double operator()(double x) const { return fn(x); }
};

// psi_y(x) = exp(-v_gamma(y) x), so int psi_y dF = H_{gamma,F}(y).
Score cdf_score(TailIndex gamma, double y);
// psi_u(x) = E[u(w_gamma(E/x))].
Score expected_utility(TailIndex gamma, std::function<double(double)> u, std::string name,
                       int quad_nodes = kDefaultQuadNodes);
// psi(x) = C x^rho. rho < 0 with C > 0 rewards low-access types and needs a
// support floor on non-atomic baselines.
Score power_score(double c, double rho);
Score constant_score(double value);
Score custom_score(std::string name, std::function<double(double)> fn);

// E[u(w_gamma(E/x))] by Gauss-Laguerre over E ~ Exp(1).
double expected_utility_score(TailIndex gamma, const std::function<double(double)>& u, double x,
                              int quad_nodes = kDefaultQuadNodes);

/// sup_F int psi dF - lambda KL(F || F0) subject to E_F[X] = 1.
struct TiltProblem {
  TypeDistribution baseline;
  Score score;
  double lambda = 1.0;
  // Declared lower bound of the baseline support; required for inverse-power
  // scores on non-atomic baselines.
  std::optional<double> support_floor;
};

struct TiltSolution {
  double eta_star = 0.0;
  TypeDistribution optimizer = TypeDistribution::dirac(1.0);
  // Baseline atoms and tilted weights, index-aligned with the (possibly
  // discretized) baseline.
  std::vector<Atom> baseline_atoms;
  std::vector<double> weights;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double mean_residual = 0.0;
  double kl = 0.0;
  int iterations = 0;
  bool discretized = false;
};

// Mean of the tilt dF_eta ∝ exp((psi + eta x)/lambda) dF0.
double tilted_mean(const TiltProblem& problem, double eta);
// J(eta) = lambda log Z(eta) - eta.
double dual_objective(const TiltProblem& problem, double eta);
// Normalized tilt weights on the baseline atoms.
std::vector<double> tilt_weights(const TiltProblem& problem, double eta);

// Solves m(eta) = 1 after symmetric bracket expansion up to 2^20. Throws
// AdmissibilityError when Z diverges at eta = 0 and BracketError when no
// sign change of m - 1 exists on the admissible range.
TiltSolution solve_tilt(const TiltProblem& problem);

// sum w log(w / w0); infinite when F charges an atom that F0 does not.
ExtendedReal kl_divergence(const TypeDistribution& f, const TypeDistribution& f0);

struct PairwiseOdds {
  double from_weights = 1.0;
  double closed_form = 1.0;
  double difference = 0.0;
};

// (pi_i / pi_j) / (pi0_i / pi0_j) against exp((psi_i - psi_j + eta (x_i - x_j))/lambda).
PairwiseOdds pairwise_odds(const TiltProblem& problem, const TiltSolution& solution,
                           std::size_t i, std::size_t j);

struct DvCheck {
  double lhs = 0.0;           // log int e^f dF0
  double rhs_at_gibbs = 0.0;  // int f dQ* - KL(Q* || F0)
  double gap = 0.0;
  double max_random_rhs = 0.0;
  bool weak_duality_holds = true;
};

// Donsker-Varadhan check on an atomic (or discretized) F0, with `samples`
// random competitors drawn from `seed`.
DvCheck dv_check(const TypeDistribution& f0, const std::function<double(double)>& f,
                 std::uint64_t seed = 0, std::size_t samples = 100);

}  // namespace hevt
