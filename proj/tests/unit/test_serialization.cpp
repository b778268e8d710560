#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "hevt/serialization.hpp"

using hevt::TypeDistribution;

namespace {

TEST(FormatNumber, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    EXPECT_EQ(std::stod(hevt::format_number(x)), x);
  }
  EXPECT_EQ(hevt::format_number(0.5), "0.5");
  EXPECT_EQ(hevt::format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(hevt::format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(hevt::format_number(std::nan("")), "nan");
}

TEST(DistributionCsv, AtomicRoundTrip) {
  const auto f = TypeDistribution::atomic({{0.1, 0.2}, {1.0 / 3.0, 0.3}, {2.7, 0.5}});
  std::stringstream ss;
  hevt::write_distribution_csv(ss, f);
  EXPECT_EQ(ss.str().substr(0, 4), "x,w\n");
  EXPECT_EQ(hevt::read_distribution_csv(ss), f);
}

TEST(DistributionCsv, GridRoundTripAndComments) {
  const auto f = TypeDistribution::gamma_mean_one(3.0).to_grid(64);
  std::stringstream ss;
  ss << "# written by a test\n";
  hevt::write_distribution_csv(ss, f);
  const auto g = hevt::read_distribution_csv(ss);
  ASSERT_EQ(g.kind(), TypeDistribution::Kind::kQuantileGrid);
  ASSERT_EQ(g.grid().size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(g.grid()[i], f.grid()[i]);
}

TEST(DistributionCsv, RejectsMalformedInput) {
  std::stringstream bad_header("a,b\n1,1\n");
  EXPECT_THROW(hevt::read_distribution_csv(bad_header), hevt::DomainError);
  std::stringstream bad_row("x,w\n1\n");
  EXPECT_THROW(hevt::read_distribution_csv(bad_row), hevt::DomainError);
  std::stringstream bad_weights("x,w\n1,0.5\n2,0.4\n");
  EXPECT_THROW(hevt::read_distribution_csv(bad_weights), hevt::DomainError);
}

TEST(Json, Records) {
  EXPECT_EQ(hevt::to_json(hevt::ExtendedReal(0.25)), nlohmann::json(0.25));
  EXPECT_EQ(hevt::to_json(hevt::ExtendedReal::infinite()), nlohmann::json("inf"));

  const auto f0 = TypeDistribution::two_point(0.5, 3.0, 0.8);
  const auto cert = hevt::certify_stability(0.0, 1.0, f0, TypeDistribution::dirac(1.0), 1024);
  const auto j = hevt::to_json(cert);
  EXPECT_EQ(j.at("passed").get<bool>(), cert.passed);
  EXPECT_DOUBLE_EQ(j.at("lhs").get<double>(), cert.lhs);
  EXPECT_TRUE(j.contains("constant"));

  const auto fj = hevt::to_json(f0);
  EXPECT_EQ(fj.at("atoms").size(), 2u);

  hevt::TiltProblem p{f0, hevt::cdf_score(0.0, 0.0), 1.0, std::nullopt};
  const auto sj = hevt::to_json(hevt::solve_tilt(p));
  EXPECT_TRUE(sj.contains("eta_star"));
  EXPECT_TRUE(sj.contains("primal_value"));
  EXPECT_TRUE(sj.contains("dual_value"));
}

}  // namespace
