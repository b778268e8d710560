#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hevt/errors.hpp"
#include "hevt/serialization.hpp"
#include "hevt_app/config.hpp"

using hevt::app::ConfigError;
using hevt::app::parse_config;
using hevt::app::serialize_config;

namespace {

const char* kFull = R"(# every table at once
scenario = "full"
gamma = -0.25
p = 2
seed = 99
output = "out/full"
grid = 1024

[distributions.F0]
kind = "two_point"
lo = 0.5
hi = 3.0
weight_lo = 0.8

[distributions.atoms]
kind = "atomic"
atoms = [[0.5, 0.4], [1.0, 0.4], [2.0, 0.2]]

[distributions.net]
kind = "degree_histogram"
degrees = [[1, 3], [2, 2], [4, 1]]

[distributions.scores]
kind = "scores"
values = [0.2, 1.7, 1.1, 1.7]

[distributions.g]
kind = "gamma"
shape = 2.5

[distributions.ln]
kind = "lognormal"
sigma = 0.3

[distributions."odd name"]
kind = "dirac"
location = 2.0
normalize = true

[law]
distribution = "F0"
samples = 10

[compare]
first = "F0"
second = "g"
x = [0.1, 1e-3, 0.30000000000000004]

[offers]
family = "hall"
gamma = 0.5
d = -0.25
beta = 2

[horizon]
distribution = "net"
theta = [10, 1e6]

[design]
distribution = "atoms"
score = "power"
c = 1.0
rho = -1.0
lambda = 0.25
support_floor = 0.1

[certify]
gammas = [0.1]
ps = [1.0]
pairs = 3
atoms = 2
)";

TEST(Config, ParsesEveryTable) {
  const auto c = parse_config(kFull);
  EXPECT_EQ(c.scenario, "full");
  EXPECT_EQ(c.gamma, -0.25);
  EXPECT_EQ(c.p, 2.0);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.grid, 1024u);
  ASSERT_EQ(c.distributions.size(), 7u);
  EXPECT_EQ(c.distribution("F0").weight_lo, 0.8);
  EXPECT_TRUE(c.distribution("net").normalize);
  EXPECT_TRUE(c.distribution("odd name").normalize);
  ASSERT_TRUE(c.compare);
  EXPECT_EQ(c.compare->x[2], 0.30000000000000004);
  ASSERT_TRUE(c.design);
  EXPECT_EQ(c.design->support_floor, 0.1);
  EXPECT_EQ(c.offers->family, "hall");
  EXPECT_EQ(c.horizon->theta, (std::vector<double>{10.0, 1e6}));
  EXPECT_EQ(c.certify->pairs, 3u);
}

TEST(Config, SerializeParseIsAFixedPoint) {
  const auto once = parse_config(kFull);
  const auto text = serialize_config(once);
  const auto twice = parse_config(text);
  EXPECT_EQ(once, twice);
  EXPECT_EQ(serialize_config(twice), text);
}

TEST(Config, MinimalConfigRoundTrips) {
  const auto c = parse_config("");
  EXPECT_EQ(c.gamma, 0.0);
  EXPECT_TRUE(c.distributions.empty());
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, DegreeHistogramIsNormalizedWithRawMeanKept) {
  const auto c = parse_config(kFull);
  const auto d = hevt::app::load_distribution(c.distribution("net"));
  // Mean degree (3*1 + 2*2 + 1*4)/6 = 11/6.
  EXPECT_NEAR(d.raw_mean, 11.0 / 6.0, 1e-15);
  EXPECT_TRUE(d.normalized);
  EXPECT_TRUE(d.law.is_mean_one(1e-14));
  ASSERT_EQ(d.law.atoms().size(), 3u);
  EXPECT_NEAR(d.law.atoms()[0].location, 6.0 / 11.0, 1e-15);
  EXPECT_NEAR(d.law.atoms()[0].weight, 0.5, 1e-15);
  EXPECT_NEAR(d.law.atoms()[2].location, 24.0 / 11.0, 1e-15);
}

TEST(Config, ScoresBecomeEqualWeightAtoms) {
  const auto c = parse_config(kFull);
  const auto d = hevt::app::load_distribution(c.distribution("scores"));
  EXPECT_NEAR(d.raw_mean, 4.7 / 4.0, 1e-15);
  ASSERT_EQ(d.law.atoms().size(), 3u);
  EXPECT_NEAR(d.law.atoms()[2].weight, 0.5, 1e-15);
  EXPECT_TRUE(d.law.is_mean_one(1e-14));
}

TEST(Config, RenormalizationIsOptIn) {
  const auto c = parse_config(kFull);
  const auto odd = hevt::app::load_distribution(c.distribution("odd name"));
  EXPECT_EQ(odd.raw_mean, 2.0);
  EXPECT_EQ(odd.law.mean(), 1.0);
  const auto f0 = hevt::app::load_distribution(c.distribution("F0"));
  EXPECT_FALSE(f0.normalized);
}

std::size_t error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return 0;
}

TEST(Config, ErrorsAreLineAnchored) {
  EXPECT_EQ(error_line("gamma = 0.5\nbogus = 1\n"), 2u);
  EXPECT_EQ(error_line("gamma = 0.5\np = \"two\"\n"), 2u);
  EXPECT_EQ(error_line("gamma = 0.5\n\ngamma = [\n"), 3u);
  EXPECT_EQ(error_line("\n[distributions.a]\nkind = \"dirac\"\nlocation = 1\nshape = 2\n"), 5u);
  EXPECT_EQ(error_line("[distributions.a]\nkind = \"weird\"\n"), 1u);
  EXPECT_EQ(error_line("\n\n[law]\ndistribution = \"nowhere\"\n"), 3u);
  EXPECT_EQ(error_line("[distributions.a]\nkind = \"atomic\"\natoms = [[1.0, 0.5]]\n"), 1u);
  EXPECT_EQ(error_line("[distributions.n]\nkind = \"degree_histogram\"\ndegrees = [[0, 4], [2, 1]]\n"), 1u);
  EXPECT_EQ(error_line("[distributions.n]\nkind = \"scores\"\nvalues = [1.0]\nnormalize = false\n"), 1u);
  EXPECT_EQ(error_line("p = 0.5\n"), 1u);
  EXPECT_EQ(error_line("grid = 8\n"), 1u);
  EXPECT_EQ(error_line("[distributions.a]\nkind = \"dirac\"\n[horizon]\ndistribution = \"a\"\n"), 3u);
}

TEST(Config, MessagesNameTheLine) {
  try {
    parse_config("gamma = 0.5\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(Config, CsvDistributionsResolveAgainstTheConfigDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "hevt_config_csv";
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "law.csv");
    hevt::write_distribution_csv(csv, hevt::TypeDistribution::two_point(0.5, 3.0, 0.8));
    std::ofstream toml(dir / "s.toml");
    toml << "[distributions.f]\nkind = \"csv\"\npath = \"law.csv\"\n";
  }
  const auto c = hevt::app::load_config((dir / "s.toml").string());
  EXPECT_EQ(c.base_dir, dir.string());
  const auto d = hevt::app::load_distribution(c.distribution("f"), c.base_dir);
  EXPECT_EQ(d.law, hevt::TypeDistribution::two_point(0.5, 3.0, 0.8));
  EXPECT_EQ(error_line("\n[distributions.f]\nkind = \"csv\"\npath = \"/nonexistent/x.csv\"\n"), 2u);
  std::filesystem::remove_all(dir);
}

}  // namespace
