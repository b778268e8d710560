#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hevt_app/config.hpp"

namespace hevt::app {

inline constexpr const char* kVersion = HEVT_VERSION;

// Every command writes into `config.output` (created if missing) and returns
// the files it wrote, in order.
using Written = std::vector<std::filesystem::path>;

Written cmd_law(const ScenarioConfig& config);
Written cmd_compare(const ScenarioConfig& config);
Written cmd_design(const ScenarioConfig& config);
Written cmd_horizon(const ScenarioConfig& config);
Written cmd_certify(const ScenarioConfig& config);

// Seeded random mean-one law with `atoms` atoms: log-uniform locations on
// [0.1, 10] and flat Dirichlet weights, rescaled to mean one.
TypeDistribution random_mean_one_law(std::uint64_t seed, std::size_t atoms);

}  // namespace hevt::app
