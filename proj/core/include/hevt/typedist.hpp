#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hevt/extended_real.hpp"

namespace hevt {

// Default number of midpoint nodes u_j = (j - 1/2)/N for quantile grids.
inline constexpr std::size_t kDefaultGridSize = 4096;

struct Atom {
  double location = 0.0;
  double weight = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Law of the opportunity intensity X on (0, inf).
///
/// Three representations are supported:
///  - atomic: finitely many (location, weight) pairs, kept exact end to end;
///  - quantile grid: N nondecreasing values Q(u_j) at midpoints u_j;
///  - parametric: mean-one Gamma or log-normal families with closed forms.
/// Two-point and Dirac laws are atomic. Values are immutable; copies share
/// the underlying storage.
class TypeDistribution {
 public:
  enum class Kind { kAtomic, kQuantileGrid, kGammaMeanOne, kLogNormalMeanOne };

  // Atoms must have finite positive locations and nonnegative weights that
  // sum to one within 1e-12. Atoms are sorted, duplicates merged and zero
  // weights dropped.
  static TypeDistribution atomic(std::vector<Atom> atoms);
  static TypeDistribution dirac(double x0);
  static TypeDistribution two_point(double x_lo, double x_hi, double w_lo);
  // Nondecreasing positive quantile values at the midpoints (j - 1/2)/N.
  static TypeDistribution quantile_grid(std::vector<double> quantiles);
  // Gamma(shape k, scale 1/k): mean one, variance 1/k.
  static TypeDistribution gamma_mean_one(double shape);
  // exp(sigma Z - sigma^2/2) for standard normal Z.
  static TypeDistribution lognormal_mean_one(double sigma);

  Kind kind() const { return kind_; }
  bool is_atomic() const { return kind_ == Kind::kAtomic; }
  bool is_parametric() const {
    return kind_ == Kind::kGammaMeanOne || kind_ == Kind::kLogNormalMeanOne;
  }
  // Gamma shape or log-normal sigma; 0 for non-parametric kinds.
  double parameter() const { return parameter_; }
  // Parametric laws are c * Y with Y mean-one; c is the scale (= mean).
  double scale() const { return scale_; }

  // Views into shared storage; not callable on temporaries.
  std::span<const Atom> atoms() const&;     // atomic only
  std::span<const double> grid() const&;    // quantile grid or parametric
  std::span<const Atom> atoms() const&& = delete;
  std::span<const double> grid() const&& = delete;
  double mean() const { return mean_; }
  bool is_mean_one(double tol = 1e-10) const;
  // Smallest support point; 0 for parametric families whose support reaches 0.
  double support_min() const;
  // Largest support point; +inf for unbounded parametric families.
  double support_max() const;

  // Midpoint quantile grid with n nodes (exact copy for grids of size n).
  TypeDistribution to_grid(std::size_t n = kDefaultGridSize) const;
  // Atomic law; grids become n equal-weight atoms, parametric laws are
  // discretized first.
  TypeDistribution to_atomic(std::size_t n = kDefaultGridSize) const;
  // Law of c X.
  TypeDistribution scaled(double c) const;
  // Law of X / E[X]. Never applied implicitly.
  TypeDistribution renormalized() const { return scaled(1.0 / mean_); }

  std::string describe() const;

  friend bool operator==(const TypeDistribution& a, const TypeDistribution& b);

 private:
  TypeDistribution() = default;
  void finish();

  Kind kind_ = Kind::kAtomic;
  double parameter_ = 0.0;
  double scale_ = 1.0;
  double mean_ = 1.0;
  std::shared_ptr<const std::vector<Atom>> atoms_;
  std::shared_ptr<const std::vector<double>> grid_;
};

/// Balanced signed measure nu used as a perturbation direction F + eps nu.
struct SignedPerturbation {
  std::vector<Atom> atoms;  // weights are signed

  double total_mass() const;
  double first_moment() const;
  bool is_balanced(double tol = 1e-12) const;
};

// Laplace transform P_0(z) = E[e^{-zX}], z >= 0.
double laplace_transform(const TypeDistribution& f, double z);
// 1 - P_0(z) computed without cancellation for small z.
double laplace_complement(const TypeDistribution& f, double z);
// E[X e^{-zX}] = -P_0'(z).
double laplace_slope(const TypeDistribution& f, double z);
// P_0(z) - e^{-z}; nonnegative for mean-one laws.
double laplace_gap(const TypeDistribution& f, double z);

struct MomentEstimate {
  ExtendedReal value;
  // Grids only: more than a quarter of the sum sits on the first or last
  // node, a sign that the underlying integral may diverge.
  bool edge_dominated = false;
};

// E[X^r] for any real r.
MomentEstimate moment(const TypeDistribution& f, double r);
// E[|log X|^p], p > 0.
MomentEstimate log_moment(const TypeDistribution& f, double p);

// Left-continuous generalized inverse inf{x : F(x) >= u}, 0 < u < 1.
double quantile(const TypeDistribution& f, double u);

// M_p(F) = W_p(F, delta_1) = (int_0^1 |Q(u) - 1|^p du)^{1/p}.
ExtendedReal misallocation_index(const TypeDistribution& f, double p);

struct ConvexOrderResult {
  bool holds = false;
  // First merged support point where the integrated survival of the second
  // law falls below the first.
  std::optional<double> witness;
  // True when a parametric input had to be discretized.
  bool discretized = false;
};

// Decides second >=_cx first for laws with equal means (within 1e-10) by
// comparing E[(X - x)^+] on the merged support.
ConvexOrderResult convex_order_leq(const TypeDistribution& first,
                                   const TypeDistribution& second);

}  // namespace hevt
