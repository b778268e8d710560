#pragma once

// Independent reference computations used only by the test suites.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "hevt/rng.hpp"
#include "hevt/typedist.hpp"

namespace oracle {

// Plain bisection for an increasing function on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     int iterations = 200) {
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Minimum transport cost sum c_ij pi_ij over couplings of (a, b) by
// enumerating every basis of m + n - 1 cells of the transportation polytope.
inline double brute_force_transport(const std::vector<double>& xa, const std::vector<double>& wa,
                                    const std::vector<double>& xb, const std::vector<double>& wb,
                                    double p) {
  const int m = static_cast<int>(xa.size());
  const int n = static_cast<int>(xb.size());
  const int cells = m * n;
  const int basis = m + n - 1;
  Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(m + n, cells);
  Eigen::VectorXd rhs(m + n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      constraints(i, i * n + j) = 1.0;
      constraints(m + j, i * n + j) = 1.0;
    }
    rhs(i) = wa[i];
  }
  for (int j = 0; j < n; ++j) rhs(m + j) = wb[j];

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(cells, 0);
  std::fill(pick.end() - basis, pick.end(), 1);
  do {
    std::vector<int> cols;
    for (int c = 0; c < cells; ++c) if (pick[c]) cols.push_back(c);
    Eigen::MatrixXd sub(m + n, basis);
    for (int k = 0; k < basis; ++k) sub.col(k) = constraints.col(cols[k]);
    Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    if (qr.rank() < basis) continue;
    const Eigen::VectorXd sol = qr.solve(rhs);
    if ((sub * sol - rhs).norm() > 1e-12) continue;
    if (sol.minCoeff() < -1e-12) continue;
    double cost = 0.0;
    for (int k = 0; k < basis; ++k) {
      const int i = cols[k] / n;
      const int j = cols[k] % n;
      cost += std::max(sol(k), 0.0) * std::pow(std::fabs(xa[i] - xb[j]), p);
    }
    best = std::min(best, cost);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

// Random mean-one atomic law: locations log-uniform on [0.1, 10], flat
// Dirichlet weights, rescaled to mean one.
inline hevt::TypeDistribution random_mean_one(hevt::Rng& rng, std::size_t atoms = 3) {
  std::vector<hevt::Atom> a;
  const auto w = rng.flat_dirichlet(atoms);
  for (std::size_t i = 0; i < atoms; ++i) a.push_back({rng.log_uniform(0.1, 10.0), w[i]});
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) total += a[i].weight;
  a.back().weight = 1.0 - total;
  return hevt::TypeDistribution::atomic(std::move(a)).renormalized();
}

// Random mean-one reweighting of the given atoms: a Dirichlet mixture of the
// extreme points of {w >= 0, sum w = 1, sum w x = 1}, i.e. two-point laws on
// pairs straddling 1 and the Dirac at an atom equal to 1.
inline std::vector<double> random_feasible_weights(hevt::Rng& rng, const std::vector<double>& x) {
  std::vector<std::vector<double>> extremes;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 1.0) {
      std::vector<double> e(x.size(), 0.0);
      e[i] = 1.0;
      extremes.push_back(e);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[i] < 1.0 && x[j] > 1.0) {
        std::vector<double> e(x.size(), 0.0);
        e[i] = (x[j] - 1.0) / (x[j] - x[i]);
        e[j] = 1.0 - e[i];
        extremes.push_back(e);
      }
    }
  }
  const auto mix = rng.flat_dirichlet(extremes.size());
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t k = 0; k < extremes.size(); ++k) {
    for (std::size_t i = 0; i < x.size(); ++i) w[i] += mix[k] * extremes[k][i];
  }
  return w;
}

// Standard error of an empirical frequency with success probability q.
inline double binomial_se(double q, double n) { return std::sqrt(q * (1.0 - q) / n); }

}  // namespace oracle
