#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hevt/hevlaw.hpp"
#include "hevt/rng.hpp"
#include "oracles.hpp"

using hevt::HevLaw;
using hevt::TypeDistribution;

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

TypeDistribution two_point_f0() { return TypeDistribution::two_point(0.5, 3.0, 0.8); }
double two_point_h0() { return 0.8 * std::exp(-0.5) + 0.2 * std::exp(-3.0); }

double empirical_cdf(const std::vector<double>& s, double x) {
  return static_cast<double>(std::count_if(s.begin(), s.end(), [x](double z) { return z <= x; })) /
         static_cast<double>(s.size());
}

TEST(HevCdf, TwoPointValueAtZero) {
  for (double g : {-0.5, 0.0, 0.5}) {
    const double h = hevt::hev_cdf(HevLaw(g, two_point_f0()), 0.0);
    EXPECT_NEAR(h, two_point_h0(), 1e-15);
    EXPECT_NEAR(h, 0.495, 5e-4);
  }
}

TEST(HevCdf, DiracIsGev) {
  const HevLaw law(0.0, TypeDistribution::dirac(1.0));
  for (double x : {-2.0, 0.0, 1.0, 5.0}) {
    EXPECT_NEAR(hevt::hev_cdf(law, x), std::exp(-std::exp(-x)), 1e-15);
    EXPECT_NEAR(hevt::hev_cdf(law, x), hevt::gev_cdf(0.0, x), 1e-16);
  }
}

TEST(HevCdf, GumbelMixtureAtOneMatchesSampler) {
  const HevLaw law(0.0, two_point_f0());
  const double exact = 0.8 * std::exp(-0.5 / std::exp(1.0)) + 0.2 * std::exp(-3.0 / std::exp(1.0));
  EXPECT_NEAR(hevt::hev_cdf(law, 1.0), exact, 1e-15);
  EXPECT_NEAR(exact, 0.7319212, 1e-7);
  const auto s = hevt::sample(law, 11, 200000);
  EXPECT_NEAR(empirical_cdf(s, 1.0), exact, 3.0 * oracle::binomial_se(exact, 2e5));
}

TEST(HevQuantile, Examples) {
  const HevLaw gumbel(0.0, TypeDistribution::dirac(1.0));
  for (double u : {0.01, 0.3, 0.5, 0.99}) {
    EXPECT_NEAR(hevt::hev_quantile(gumbel, u), -std::log(-std::log(u)), 1e-12);
  }
  for (double g : {-0.5, 0.0, 0.5}) {
    EXPECT_NEAR(hevt::hev_quantile(HevLaw(g, two_point_f0()), two_point_h0()), 0.0, 1e-12);
  }
  EXPECT_THROW(hevt::hev_quantile(gumbel, 1.0), hevt::DomainError);
}

TEST(HevQuantile, GammaMixtureMatchesSampleQuantile) {
  const HevLaw law(0.25, TypeDistribution::gamma_mean_one(2.0));
  const double u = 0.9;
  const double q = hevt::hev_quantile(law, u);
  const double n = 1e6;
  auto s = hevt::sample(law, 2024, static_cast<std::size_t>(n));
  std::nth_element(s.begin(), s.begin() + static_cast<long>(u * n), s.end());
  const double empirical = s[static_cast<std::size_t>(u * n)];
  const double h = 1e-4;
  const double density = (hevt::hev_cdf(law, q + h) - hevt::hev_cdf(law, q - h)) / (2.0 * h);
  const double se = std::sqrt(u * (1.0 - u) / n) / density;
  EXPECT_NEAR(empirical, q, 3.0 * se);
}

TEST(HevQuantile, RoundTripOnPercentiles) {
  const std::vector<TypeDistribution> laws = {two_point_f0(), TypeDistribution::dirac(1.0),
                                              TypeDistribution::gamma_mean_one(2.0),
                                              TypeDistribution::lognormal_mean_one(0.8)};
  for (const auto& f : laws) {
    for (double g : {-0.5, 0.0, 0.5}) {
      const HevLaw law(g, f);
      for (int k = 1; k <= 99; ++k) {
        const double u = k / 100.0;
        EXPECT_NEAR(hevt::hev_cdf(law, hevt::hev_quantile(law, u)), u, 1e-9)
            << f.describe() << " gamma=" << g;
      }
    }
  }
}

TEST(HevQuantile, UpperTailKeepsPrecision) {
  const HevLaw law(0.5, two_point_f0());
  for (double s : {1e-3, 1e-8, 1e-14, 1e-40}) {
    const double x = hevt::hev_quantile_upper(law, s);
    const double v = hevt::tail_transform(0.5, x).value();
    EXPECT_NEAR(hevt::laplace_complement(two_point_f0(), v) / s, 1.0, 1e-10);
  }
}

TEST(Sample, GumbelKolmogorovSmirnov) {
  const std::size_t n = 100000;
  auto s = hevt::sample(HevLaw(0.0, TypeDistribution::dirac(1.0)), 5, n);
  std::sort(s.begin(), s.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = std::exp(-std::exp(-s[i]));
    ks = std::max({ks, std::fabs(f - static_cast<double>(i) / n), std::fabs(f - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LE(ks, 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST(Sample, GumbelDrawsAreLogXMinusLogE) {
  const auto f = two_point_f0();
  const auto s = hevt::sample(HevLaw(0.0, f), 99, 1000);
  hevt::Rng rng(hevt::derive_seed(99, 0));
  for (double z : s) {
    const double x = hevt::quantile(f, rng.uniform());
    const double e = rng.exponential();
    EXPECT_EQ(z, std::log(x) - std::log(e));
  }
}

TEST(Sample, FrechetMixtureAtZero) {
  const auto s = hevt::sample(HevLaw(0.5, two_point_f0()), 7, 1000000);
  const double emp = empirical_cdf(s, 0.0);
  EXPECT_NEAR(emp, two_point_h0(), 0.002);
  EXPECT_NEAR(emp, two_point_h0(), 3.0 * oracle::binomial_se(two_point_h0(), 1e6));
}

TEST(Sample, DecilesAgreeWithCdf) {
  for (double g : {-0.5, 0.0, 0.5}) {
    const HevLaw law(g, TypeDistribution::gamma_mean_one(3.0));
    const auto s = hevt::sample(law, 31, 1000000);
    for (int k = 1; k <= 9; ++k) {
      const double u = k / 10.0;
      const double x = hevt::hev_quantile(law, u);
      EXPECT_NEAR(empirical_cdf(s, x), u, 3.3 * oracle::binomial_se(u, 1e6)) << g << " " << u;
    }
  }
}

TEST(Sample, ChunkedStreamsArePrefixStable) {
  const HevLaw law(0.3, two_point_f0());
  const auto a = hevt::sample(law, 1234, 150000);
  const auto b = hevt::sample(law, 1234, 70000);
  for (std::size_t i = 0; i < b.size(); ++i) ASSERT_EQ(a[i], b[i]);
  EXPECT_EQ(a, hevt::sample(law, 1234, 150000));
  EXPECT_THROW(hevt::sample(law, 1, 0), hevt::DomainError);
}

TEST(KernelExpectation, Examples) {
  const auto f0 = two_point_f0();
  EXPECT_NEAR(hevt::kernel_expectation(HevLaw(0.4, f0), [](double) { return 1.0; }), 1.0, 1e-13);
  EXPECT_NEAR(hevt::kernel_expectation(HevLaw(0.0, TypeDistribution::dirac(1.0)), [](double z) { return z; }),
              kEulerGamma, 1e-10);
  EXPECT_NEAR(hevt::kernel_expectation(HevLaw(0.0, f0), [](double z) { return z <= 0.0 ? 1.0 : 0.0; }),
              hevt::hev_cdf(HevLaw(0.0, f0), 0.0), 1e-10);
}

TEST(KernelExpectation, LinearInMixing) {
  const auto f1 = TypeDistribution::two_point(0.5, 2.0, 2.0 / 3.0);
  const auto f2 = TypeDistribution::two_point(0.25, 4.0, 0.8);
  std::vector<hevt::Atom> mix;
  for (const auto& a : f1.atoms()) mix.push_back({a.location, 0.5 * a.weight});
  for (const auto& a : f2.atoms()) mix.push_back({a.location, 0.5 * a.weight});
  const auto half = TypeDistribution::atomic(mix);
  auto psi = [](double z) { return std::clamp(z, -2.0, 2.0); };
  for (double g : {-0.5, 0.0, 0.25}) {
    const double lhs = hevt::kernel_expectation(HevLaw(g, half), psi);
    const double rhs = 0.5 * hevt::kernel_expectation(HevLaw(g, f1), psi) +
                       0.5 * hevt::kernel_expectation(HevLaw(g, f2), psi);
    EXPECT_NEAR(lhs, rhs, 1e-9);
  }
}

TEST(KernelExpectation, DivergentPsiThrows) {
  EXPECT_THROW(hevt::kernel_expectation(HevLaw(0.5, TypeDistribution::dirac(1.0)),
                                        [](double z) { return std::pow(1.0 + 0.5 * z, 4.0); }),
               hevt::DivergenceError);
}

hevt::SignedPerturbation example_perturbation() {
  return {{{0.5, 0.5}, {1.0, -1.0}, {1.5, 0.5}}};
}

TEST(GateauxDerivative, Example) {
  const HevLaw law(0.0, TypeDistribution::dirac(1.0));
  const double d = hevt::gateaux_derivative(law, example_perturbation(), 0.0);
  const double exact = 0.5 * std::exp(-0.5) - std::exp(-1.0) + 0.5 * std::exp(-1.5);
  EXPECT_NEAR(d, exact, 1e-16);
  EXPECT_NEAR(exact, 0.0469510, 1e-7);
  const double eps = 1e-5;
  const double fd = (hevt::hev_cdf_perturbed(law, example_perturbation(), eps, 0.0) -
                     hevt::hev_cdf_perturbed(law, example_perturbation(), -eps, 0.0)) /
                    (2.0 * eps);
  EXPECT_NEAR(fd, d, 1e-8);
}

TEST(GateauxDerivative, Preconditions) {
  const HevLaw law(0.5, TypeDistribution::dirac(1.0));
  EXPECT_EQ(hevt::gateaux_derivative(law, {}, 0.3), 0.0);
  EXPECT_THROW(hevt::gateaux_derivative(law, {{{1.0, 0.1}}}, 0.0), hevt::PreconditionError);
  EXPECT_THROW(hevt::gateaux_derivative(law, example_perturbation(), -3.0), hevt::PreconditionError);
}

TEST(HevCdf, BenchmarkDominationAndUltraTail) {
  hevt::Rng rng(77);
  for (int k = 0; k < 20; ++k) {
    const auto f = oracle::random_mean_one(rng);
    for (double g : {-0.5, 0.0, 0.5}) {
      const hevt::TailIndex gi(g);
      for (int j = 1; j < 50; ++j) {
        const double x = hevt::inverse_tail_transform(g, std::pow(10.0, -4.0 + 0.12 * j));
        EXPECT_GE(hevt::hev_cdf(HevLaw(g, f), x), hevt::gev_cdf(g, x) - 1e-12);
      }
      const double x = hevt::inverse_tail_transform(g, 1e-4);
      const double ratio = (1.0 - hevt::hev_cdf(HevLaw(g, f), x)) / (1.0 - hevt::gev_cdf(g, x));
      EXPECT_GE(ratio, 0.95);
      EXPECT_LE(ratio, 1.05);
    }
  }
}

}  // namespace
