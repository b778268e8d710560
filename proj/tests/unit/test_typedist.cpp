#include <gtest/gtest.h>

#include <cmath>

#include "hevt/errors.hpp"
#include "hevt/typedist.hpp"
#include "oracles.hpp"

using hevt::Atom;
using hevt::TypeDistribution;

namespace {

TypeDistribution two_point_f0() { return TypeDistribution::two_point(0.5, 3.0, 0.8); }

TEST(TypeDistribution, ValidatesAtoms) {
  EXPECT_THROW(TypeDistribution::atomic({}), hevt::DomainError);
  EXPECT_THROW(TypeDistribution::atomic({{0.0, 1.0}}), hevt::DomainError);
  EXPECT_THROW(TypeDistribution::atomic({{1.0, 0.5}, {2.0, 0.4}}), hevt::DomainError);
  EXPECT_THROW(TypeDistribution::atomic({{1.0, -0.1}, {2.0, 1.1}}), hevt::DomainError);
  EXPECT_THROW(TypeDistribution::quantile_grid({1.0, 0.5}), hevt::DomainError);
  EXPECT_THROW(TypeDistribution::gamma_mean_one(0.0), hevt::DomainError);
}

TEST(TypeDistribution, MergesAndSortsAtoms) {
  const auto f = TypeDistribution::atomic({{3.0, 0.1}, {0.5, 0.4}, {3.0, 0.1}, {1.0, 0.4}, {2.0, 0.0}});
  ASSERT_EQ(f.atoms().size(), 3u);
  EXPECT_EQ(f.atoms()[0].location, 0.5);
  EXPECT_EQ(f.atoms()[2].location, 3.0);
  EXPECT_DOUBLE_EQ(f.atoms()[2].weight, 0.2);
}

TEST(LaplaceTransform, Examples) {
  EXPECT_NEAR(hevt::laplace_transform(TypeDistribution::dirac(1.0), 1.0), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(hevt::laplace_transform(two_point_f0(), 1.0),
              0.8 * std::exp(-0.5) + 0.2 * std::exp(-3.0), 1e-15);
  const auto g = TypeDistribution::gamma_mean_one(2.0);
  EXPECT_NEAR(hevt::laplace_transform(g, 1.0), std::pow(1.5, -2.0), 1e-15);
  EXPECT_NEAR(hevt::laplace_transform(g.to_grid(), 1.0), std::pow(1.5, -2.0), 1e-6);
  EXPECT_THROW(hevt::laplace_transform(g, -1.0), hevt::DomainError);
}

TEST(LaplaceTransform, LogNormalGridMatchesMoments) {
  // P_0 has no closed form; check the small-z expansion 1 - z + z^2 E[X^2]/2.
  const auto f = TypeDistribution::lognormal_mean_one(0.5);
  const double z = 1e-3;
  const double second = std::exp(0.25);
  EXPECT_NEAR(hevt::laplace_transform(f, z), 1.0 - z + 0.5 * z * z * second, 1e-9);
}

TEST(LaplaceTransform, ComplementAndSlope) {
  const auto f = two_point_f0();
  for (double z : {1e-12, 1e-6, 0.3, 2.0}) {
    EXPECT_NEAR(hevt::laplace_complement(f, z), 1.0 - hevt::laplace_transform(f, z),
                1e-15 + 1e-12 * z);
    const double h = 1e-6 * std::max(z, 1e-3);
    const double fd = -(hevt::laplace_transform(f, z + h) - hevt::laplace_transform(f, std::max(z - h, 0.0))) /
                      (z + h - std::max(z - h, 0.0));
    EXPECT_NEAR(hevt::laplace_slope(f, z), fd, 1e-7);
  }
  EXPECT_NEAR(hevt::laplace_complement(f, 1e-20), 1e-20, 1e-34);
}

TEST(Moment, Examples) {
  EXPECT_NEAR(hevt::moment(two_point_f0(), 1.0).value.value(), 1.0, 1e-15);
  EXPECT_NEAR(hevt::moment(TypeDistribution::dirac(1.0), -3.0).value.value(), 1.0, 1e-15);
  EXPECT_TRUE(hevt::moment(TypeDistribution::gamma_mean_one(0.5), -1.0).value.is_infinite());
  EXPECT_NEAR(hevt::moment(TypeDistribution::gamma_mean_one(3.0), -1.0).value.value(), 1.5, 1e-12);
  EXPECT_NEAR(hevt::moment(TypeDistribution::lognormal_mean_one(0.5), 2.0).value.value(),
              std::exp(0.25), 1e-12);
}

TEST(Moment, DivergentInverseMomentGrowsUnderRefinement) {
  const auto g = TypeDistribution::gamma_mean_one(0.5);
  double previous = 0.0;
  for (std::size_t n : {1024u, 4096u, 16384u}) {
    const auto est = hevt::moment(g.to_grid(n), -1.0);
    const double v = est.value.value();
    EXPECT_GT(v, 1.5 * previous) << "N=" << n;
    EXPECT_TRUE(est.edge_dominated) << "N=" << n;
    previous = v;
  }
}

TEST(Moment, LogMoments) {
  const double s = 0.7;
  EXPECT_NEAR(hevt::log_moment(TypeDistribution::lognormal_mean_one(s), 2.0).value.value(),
              s * s + std::pow(s, 4) / 4.0, 1e-10);
  EXPECT_NEAR(hevt::log_moment(two_point_f0(), 1.0).value.value(),
              0.8 * std::log(2.0) + 0.2 * std::log(3.0), 1e-15);
}

TEST(Quantile, Examples) {
  const auto f = two_point_f0();
  EXPECT_EQ(hevt::quantile(f, 0.5), 0.5);
  EXPECT_EQ(hevt::quantile(f, 0.8), 0.5);
  EXPECT_EQ(hevt::quantile(f, 0.9), 3.0);
  const double median = oracle::bisect([](double x) { return -std::expm1(-x) - 0.5; }, 0.0, 10.0);
  EXPECT_NEAR(hevt::quantile(TypeDistribution::gamma_mean_one(1.0), 0.5), median, 1e-12);
  EXPECT_NEAR(median, std::log(2.0), 1e-12);
  EXPECT_THROW(hevt::quantile(f, 0.0), hevt::DomainError);
  EXPECT_THROW(hevt::quantile(f, 1.0), hevt::DomainError);
}

TEST(Quantile, ScaledParametricKeepsClosedForm) {
  const auto g = TypeDistribution::gamma_mean_one(2.0).scaled(3.0);
  EXPECT_NEAR(g.mean(), 3.0, 1e-15);
  EXPECT_NEAR(hevt::laplace_transform(g, 1.0), std::pow(1.0 + 3.0 / 2.0, -2.0), 1e-15);
  EXPECT_NEAR(hevt::quantile(g, 0.3),
              3.0 * hevt::quantile(TypeDistribution::gamma_mean_one(2.0), 0.3), 1e-12);
  EXPECT_TRUE(g.renormalized().is_mean_one());
}

TEST(Misallocation, Examples) {
  const auto f = two_point_f0();
  EXPECT_NEAR(hevt::misallocation_index(f, 1.0).value(), 0.8, 1e-15);
  EXPECT_NEAR(hevt::misallocation_index(f, 2.0).value(), 1.0, 1e-15);
  EXPECT_EQ(hevt::misallocation_index(TypeDistribution::dirac(1.0), 2.0).value(), 0.0);
  // Exp(1): E|X - 1| = 2/e, sd = 1.
  const auto e = TypeDistribution::gamma_mean_one(1.0);
  EXPECT_NEAR(hevt::misallocation_index(e, 1.0).value(), 2.0 / std::exp(1.0), 1e-9);
  EXPECT_NEAR(hevt::misallocation_index(TypeDistribution::gamma_mean_one(4.0), 2.0).value(), 0.5, 1e-9);
  EXPECT_THROW(hevt::misallocation_index(f, 0.5), hevt::DomainError);
}

TEST(LaplaceGap, Examples) {
  EXPECT_NEAR(hevt::laplace_gap(two_point_f0(), 1.0),
              0.8 * std::exp(-0.5) + 0.2 * std::exp(-3.0) - std::exp(-1.0), 1e-15);
  for (double z : {0.0, 0.5, 3.0}) {
    EXPECT_EQ(hevt::laplace_gap(TypeDistribution::dirac(1.0), z), 0.0);
  }
  EXPECT_NEAR(hevt::laplace_gap(TypeDistribution::gamma_mean_one(4.0), 2.0),
              std::pow(1.5, -4.0) - std::exp(-2.0), 1e-15);
  EXPECT_NEAR(hevt::laplace_gap(TypeDistribution::gamma_mean_one(4.0), 2.0), 0.0621956, 1e-7);
}

TEST(ConvexOrder, Examples) {
  const auto f0 = two_point_f0();
  const auto d1 = TypeDistribution::dirac(1.0);
  EXPECT_TRUE(hevt::convex_order_leq(d1, f0).holds);
  const auto rev = hevt::convex_order_leq(f0, d1);
  EXPECT_FALSE(rev.holds);
  ASSERT_TRUE(rev.witness.has_value());
  EXPECT_GT(*rev.witness, 0.5);
  EXPECT_LT(*rev.witness, 3.0);
  EXPECT_TRUE(hevt::convex_order_leq(TypeDistribution::two_point(0.5, 1.5, 0.5),
                                     TypeDistribution::two_point(0.25, 1.75, 0.5))
                  .holds);
  EXPECT_THROW(hevt::convex_order_leq(d1, TypeDistribution::dirac(2.0)), hevt::PreconditionError);
}

TEST(ConvexOrder, ParametricInputsAreDiscretized) {
  const auto r = hevt::convex_order_leq(TypeDistribution::dirac(1.0), TypeDistribution::gamma_mean_one(2.0));
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.discretized);
}

class RandomMeanOne : public ::testing::TestWithParam<int> {};

TEST_P(RandomMeanOne, LaplaceInvariants) {
  hevt::Rng rng(static_cast<std::uint64_t>(GetParam()));
  const auto f = oracle::random_mean_one(rng, 4);
  double previous = 2.0;
  for (int k = 0; k < 200; ++k) {
    const double z = 0.05 * k;
    const double p0 = hevt::laplace_transform(f, z);
    EXPECT_LT(p0, previous);
    previous = p0;
    EXPECT_GE(hevt::laplace_gap(f, z), -1e-12);
  }
  const double z = 1e-4;
  EXPECT_LE(std::fabs(hevt::laplace_transform(f, z) - 1.0 + z) / z, 0.1);
  // Mean-preserving spread by splitting the first atom.
  std::vector<Atom> atoms(f.atoms().begin(), f.atoms().end());
  const Atom a = atoms.front();
  const double delta = 0.5 * a.location;
  atoms.erase(atoms.begin());
  atoms.push_back({a.location - delta, 0.5 * a.weight});
  atoms.push_back({a.location + delta, 0.5 * a.weight});
  const auto spread = TypeDistribution::atomic(atoms);
  ASSERT_TRUE(hevt::convex_order_leq(f, spread).holds);
  for (int k = 0; k < 200; ++k) {
    const double zz = 0.05 * k;
    EXPECT_GE(hevt::laplace_transform(spread, zz), hevt::laplace_transform(f, zz) - 1e-12);
  }
}

TEST_P(RandomMeanOne, GridMomentMatchesQuantileIntegral) {
  hevt::Rng rng(static_cast<std::uint64_t>(GetParam()) + 1000);
  const auto g = oracle::random_mean_one(rng).to_grid();
  double integral = 0.0;
  const std::size_t n = g.grid().size();
  for (std::size_t j = 0; j < n; ++j) {
    integral += hevt::quantile(g, (static_cast<double>(j) + 0.5) / static_cast<double>(n));
  }
  EXPECT_NEAR(hevt::moment(g, 1.0).value.value(), integral / static_cast<double>(n), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomMeanOne, ::testing::Range(0, 20));

}  // namespace
