#include "hevt_app/cli.hpp"

#include <CLI11.hpp>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>

#include "hevt/errors.hpp"
#include "hevt_app/commands.hpp"
#include "hevt_app/config.hpp"

namespace hevt::app {
namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> grid;
};

int report(std::ostream& err, int code, const std::string& kind, const std::string& message,
           std::size_t line = 0) {
  nlohmann::json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
  if (line) j["line"] = line;
  err << j.dump() << "\n";
  return code;
}

int exit_code_for(const hevt::Error& e) {
  if (dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const BracketError*>(&e)) {
    return kExitNumerical;
  }
  return kExitDomain;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heterogeneous extreme-value laws: scenario runner"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Overrides o;
  const std::map<std::string, std::pair<std::string, std::function<Written(const ScenarioConfig&)>>> commands = {
      {"law", {"cdf grid, quantile schedule and samples of H_{gamma,F}", cmd_law}},
      {"compare", {"stability certificate, schedules, pointwise bounds and geodesic for two laws", cmd_compare}},
      {"design", {"entropy-regularized tilt of a baseline law", cmd_design}},
      {"horizon", {"finite-horizon convergence, second-order diagnostic and simulation", cmd_horizon}},
      {"certify", {"batch certification on seeded random pairs", cmd_certify}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", o.config, "scenario file (TOML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override the scenario seed");
    sub->add_option("--out", o.out, "override the output directory");
    sub->add_option("--grid", o.grid, "override the quantile grid size")->check(CLI::Range(32, 1 << 24));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report(err, kExitConfig, "usage", e.what());
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    auto config = load_config(o.config);
    if (o.seed) config.seed = *o.seed;
    if (o.out) config.output = *o.out;
    if (o.grid) config.grid = *o.grid;
    for (const auto& path : commands.at(name).second(config)) out << "wrote " << path.string() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    return report(err, kExitConfig, "config", e.what(), e.line());
  } catch (const hevt::Error& e) {
    return report(err, exit_code_for(e), e.kind(), e.what());
  } catch (const std::exception& e) {
    return report(err, kExitNumerical, "internal", e.what());
  }
}

}  // namespace hevt::app
