#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hevt/typedist.hpp"

namespace hevt::app {

/// Config problem anchored at a line of the scenario file (0 when unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class DistributionKind {
  kAtomic,
  kDirac,
  kTwoPoint,
  kGamma,
  kLogNormal,
  kDegreeHistogram,  // (degree, count) pairs, always normalized to mean one
  kScores,           // nonnegative per-node scores, always normalized to mean one
  kCsv,              // "x,w" or "u,Q" file
};

const char* kind_name(DistributionKind k);

struct DistributionSpec {
  std::string name;
  DistributionKind kind = DistributionKind::kDirac;
  std::vector<std::pair<double, double>> pairs;  // atoms or (degree, count)
  std::vector<double> values;                    // scores
  double location = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  double weight_lo = 0.0;
  double shape = 1.0;
  double sigma = 1.0;
  std::string path;
  bool normalize = false;  // rescale to mean one after loading

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

struct LawSection {
  std::string distribution;
  double x_min = -3.0;
  double x_max = 6.0;
  std::size_t points = 91;
  std::size_t quantiles = 99;
  std::size_t samples = 0;

  friend bool operator==(const LawSection&, const LawSection&) = default;
};

struct CompareSection {
  std::string first;
  std::string second;
  std::vector<double> x = {-1.0, 0.0, 1.0, 2.0, 3.0};
  std::size_t quantiles = 99;
  std::size_t geodesic_steps = 4;

  friend bool operator==(const CompareSection&, const CompareSection&) = default;
};

struct OfferSpec {
  std::string family = "pareto";  // pareto | exponential | hall
  double gamma = 0.5;
  double d = 0.0;
  double beta = 1.0;

  friend bool operator==(const OfferSpec&, const OfferSpec&) = default;
};

struct HorizonSection {
  std::string distribution;
  std::vector<double> theta = {1e2, 1e3, 1e4};
  std::vector<double> x = {0.0, 1.0, 2.0};
  std::size_t simulations = 0;

  friend bool operator==(const HorizonSection&, const HorizonSection&) = default;
};

struct DesignSection {
  std::string distribution;
  std::string score = "cdf";  // cdf | power | constant | expected_utility
  std::string utility = "linear";  // expected_utility: linear z, or exponential 1 - e^{-rho z}
  double y = 0.0;
  double c = 1.0;
  double rho = 1.0;
  double value = 0.0;
  double lambda = 1.0;
  std::optional<double> support_floor;

  friend bool operator==(const DesignSection&, const DesignSection&) = default;
};

struct CertifySection {
  std::vector<double> gammas = {-0.75, -0.25, 0.0, 0.2, 0.45};
  std::vector<double> ps = {1.0, 2.0};
  std::size_t pairs = 100;
  std::size_t atoms = 3;

  friend bool operator==(const CertifySection&, const CertifySection&) = default;
};

struct ScenarioConfig {
  std::string scenario = "scenario";
  double gamma = 0.0;
  double p = 1.0;
  std::uint64_t seed = 0;
  std::string output = "out";
  std::size_t grid = kDefaultGridSize;
  std::vector<DistributionSpec> distributions;
  std::optional<LawSection> law;
  std::optional<CompareSection> compare;
  std::optional<OfferSpec> offers;
  std::optional<HorizonSection> horizon;
  std::optional<DesignSection> design;
  std::optional<CertifySection> certify;
  // Directory that relative CSV paths resolve against; not serialized.
  std::string base_dir = ".";

  const DistributionSpec& distribution(const std::string& name) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Parses TOML text. `base_dir` resolves relative CSV paths. Throws
// ConfigError on syntax errors, unknown keys, wrong types and unresolved
// distribution names.
ScenarioConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

// TOML text that parses back to an equal config.
std::string serialize_config(const ScenarioConfig& config);

struct LoadedDistribution {
  TypeDistribution law;
  double raw_mean = 1.0;  // mean before any normalization
  bool normalized = false;
};

LoadedDistribution load_distribution(const DistributionSpec& spec,
                                     const std::string& base_dir = ".");

}  // namespace hevt::app
