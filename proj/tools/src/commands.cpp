#include "hevt_app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>

#include "hevt/design.hpp"
#include "hevt/errors.hpp"
#include "hevt/hevlaw.hpp"
#include "hevt/horizon.hpp"
#include "hevt/parallel.hpp"
#include "hevt/rng.hpp"
#include "hevt/serialization.hpp"
#include "hevt/transport.hpp"

namespace hevt::app {
namespace {

using nlohmann::json;

// Run metadata repeated at the top of every CSV and inside every JSON file.
class Provenance {
 public:
  Provenance(const ScenarioConfig& c, std::string command) {
    add("scenario", c.scenario);
    add("command", std::move(command));
    add("seed", std::to_string(c.seed));
    add("version", kVersion);
    add("gamma", format_number(c.gamma));
    add("p", format_number(c.p));
    add("grid", std::to_string(c.grid));
  }

  void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

  void add_distribution(const DistributionSpec& spec, const LoadedDistribution& d) {
    add("distribution " + spec.name,
        std::string(kind_name(spec.kind)) + ", raw_mean=" + format_number(d.raw_mean) +
            (d.normalized ? ", normalized to mean one" : ""));
  }

  void write_comments(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << "# " << k << ": " << v << "\n";
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : entries_) j[k] = v;
    return j;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

class OutputDir {
 public:
  explicit OutputDir(const ScenarioConfig& c) : dir_(c.output) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  std::ofstream open(const std::string& name) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    written_.push_back(path);
    return out;
  }

  void write_json(const std::string& name, const Provenance& prov, json body) {
    body["provenance"] = prov.to_json();
    auto out = open(name);
    out << body.dump(2) << "\n";
  }

  Written written() const { return written_; }

 private:
  std::filesystem::path dir_;
  Written written_;
};

class CsvWriter {
 public:
  CsvWriter(std::ofstream out, const Provenance& prov, const std::vector<std::string>& columns)
      : out_(std::move(out)) {
    prov.write_comments(out_);
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }

  CsvWriter& operator<<(double v) { return cell(format_number(v)); }
  CsvWriter& operator<<(const ExtendedReal& v) { return cell(format_number(v.value_or_inf())); }
  CsvWriter& operator<<(bool v) { return cell(v ? "true" : "false"); }
  CsvWriter& operator<<(std::size_t v) { return cell(std::to_string(v)); }

  void end_row() {
    out_ << "\n";
    first_ = true;
  }

 private:
  CsvWriter& cell(const std::string& s) {
    out_ << (first_ ? "" : ",") << s;
    first_ = false;
    return *this;
  }

  std::ofstream out_;
  bool first_ = true;
};

struct Named {
  const DistributionSpec* spec;
  LoadedDistribution loaded;
};

Named load(const ScenarioConfig& c, const std::string& name, Provenance& prov) {
  const auto& spec = c.distribution(name);
  Named n{&spec, load_distribution(spec, c.base_dir)};
  prov.add_distribution(spec, n.loaded);
  return n;
}

json error_json(const hevt::Error& e) { return {{"error", e.kind()}, {"message", e.what()}}; }

// Evaluates one report; library failures become an error object in its slot.
template <class Fn>
json attempt(Fn&& fn) {
  try {
    return fn();
  } catch (const hevt::Error& e) {
    return error_json(e);
  }
}

std::vector<double> quantile_levels(std::size_t count) {
  std::vector<double> u(count);
  for (std::size_t k = 0; k < count; ++k) {
    u[k] = static_cast<double>(k + 1) / static_cast<double>(count + 1);
  }
  return u;
}

OfferModel offer_model(const OfferSpec& s) {
  if (s.family == "pareto") return OfferModel::pareto_tail(s.gamma);
  if (s.family == "exponential") return OfferModel::exponential();
  return OfferModel::hall_class(s.gamma, s.d, s.beta);
}

Score design_score(const DesignSection& s, TailIndex gamma) {
  if (s.score == "cdf") return cdf_score(gamma, s.y);
  if (s.score == "power") return power_score(s.c, s.rho);
  if (s.score == "constant") return constant_score(s.value);
  if (s.utility == "linear") {
    return expected_utility(gamma, [](double z) { return z; }, "linear");
  }
  const double rho = s.rho;
  if (!(rho > 0.0)) throw DomainError("exponential utility needs rho > 0");
  return expected_utility(
      gamma, [rho](double z) { return -std::expm1(-rho * z) / rho; },
      "exponential(rho=" + format_number(rho) + ")");
}

}  // namespace

TypeDistribution random_mean_one_law(std::uint64_t seed, std::size_t atoms) {
  Rng rng(seed);
  const auto w = rng.flat_dirichlet(atoms);
  std::vector<Atom> a;
  for (std::size_t i = 0; i < atoms; ++i) a.push_back({rng.log_uniform(0.1, 10.0), w[i]});
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) total += a[i].weight;
  a.back().weight = 1.0 - total;
  return TypeDistribution::atomic(std::move(a)).renormalized();
}

Written cmd_law(const ScenarioConfig& c) {
  if (!c.law) throw ConfigError("the law command needs a [law] table");
  const auto& s = *c.law;
  Provenance prov(c, "law");
  const auto f = load(c, s.distribution, prov);
  const HevLaw law(c.gamma, f.loaded.law);
  OutputDir dir(c);

  {
    CsvWriter csv(dir.open("law_cdf.csv"), prov, {"x", "H", "H_gamma", "gap"});
    const double n1 = static_cast<double>(s.points - 1);
    for (std::size_t i = 0; i < s.points; ++i) {
      // Endpoint-weighted form keeps grid points such as 0 exact.
      const double x = (s.x_min * (n1 - static_cast<double>(i)) + s.x_max * static_cast<double>(i)) / n1;
      const double h = hev_cdf(law, x);
      const double hg = gev_cdf(c.gamma, x);
      csv << x << h << hg << (h - hg);
      csv.end_row();
    }
  }
  {
    CsvWriter csv(dir.open("law_quantiles.csv"), prov, {"u", "Q", "Q_gamma"});
    for (double u : quantile_levels(s.quantiles)) {
      csv << u << hev_quantile(law, u) << inverse_tail_transform(c.gamma, -std::log(u));
      csv.end_row();
    }
  }
  if (s.samples > 0) {
    CsvWriter csv(dir.open("law_samples.csv"), prov, {"z"});
    for (double z : sample(law, c.seed, s.samples)) {
      csv << z;
      csv.end_row();
    }
  }

  const double h0 = hev_cdf(law, 0.0);
  json summary = {{"distribution", to_json(f.loaded.law)},
                  {"raw_mean", f.loaded.raw_mean},
                  {"normalized", f.loaded.normalized},
                  {"H_at_0", h0},
                  {"homogeneous_at_0", gev_cdf(c.gamma, 0.0)},
                  {"gap_at_0", h0 - gev_cdf(c.gamma, 0.0)},
                  {"samples", s.samples}};
  summary["M_1"] = attempt([&] { return to_json(misallocation_index(f.loaded.law, 1.0)); });
  summary["M_2"] = attempt([&] { return to_json(misallocation_index(f.loaded.law, 2.0)); });
  dir.write_json("law_summary.json", prov, summary);
  return dir.written();
}

Written cmd_compare(const ScenarioConfig& c) {
  if (!c.compare) throw ConfigError("the compare command needs a [compare] table");
  const auto& s = *c.compare;
  Provenance prov(c, "compare");
  const auto a = load(c, s.first, prov);
  const auto b = load(c, s.second, prov);
  const auto& f1 = a.loaded.law;
  const auto& f2 = b.loaded.law;
  const TailIndex gamma(c.gamma);
  OutputDir dir(c);
  json report = {{"first", s.first}, {"second", s.second}};

  report["certificate"] = attempt([&] { return to_json(certify_stability(gamma, c.p, f1, f2, c.grid)); });
  report["adapted_distance"] = attempt([&] { return to_json(adapted_distance(gamma, c.p, f1, f2, c.grid)); });
  report["raw_wasserstein"] = attempt([&] { return to_json(wasserstein_p(f1, f2, c.p, c.grid)); });

  // Quantile schedules are defined in every regime.
  {
    const HevLaw l1(gamma, f1);
    const HevLaw l2(gamma, f2);
    CsvWriter csv(dir.open("compare_schedule.csv"), prov, {"u", "Q_first", "Q_second", "gap"});
    for (double u : quantile_levels(s.quantiles)) {
      const double q1 = hev_quantile(l1, u);
      const double q2 = hev_quantile(l2, u);
      csv << u << q1 << q2 << std::fabs(q1 - q2);
      csv.end_row();
    }
  }

  json artifacts = json::object();
  artifacts["pointwise"] = attempt([&] {
    std::vector<PointwiseBound> bounds;
    for (double x : s.x) bounds.push_back(pointwise_cdf_bound(gamma, f1, f2, x));
    CsvWriter csv(dir.open("compare_pointwise.csv"), prov, {"x", "H_first", "H_second", "gap", "bound", "passed"});
    bool all = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double h1 = hev_cdf(HevLaw(gamma, f1), s.x[i]);
      const double h2 = hev_cdf(HevLaw(gamma, f2), s.x[i]);
      csv << s.x[i] << h1 << h2 << bounds[i].gap << bounds[i].bound << bounds[i].passed;
      csv.end_row();
      all = all && bounds[i].passed;
    }
    return json{{"file", "compare_pointwise.csv"}, {"all_passed", all}};
  });
  artifacts["geodesic"] = attempt([&] {
    struct Row {
      double t, mean, raw_mean;
      ExtendedReal from_start;
      double bridge;
    };
    std::vector<Row> rows(s.geodesic_steps + 1);
    detail::parallel_for(rows.size(), [&](std::size_t k) {
      const double t = static_cast<double>(k) / static_cast<double>(s.geodesic_steps);
      const auto ft = adapted_geodesic(gamma, c.p, f1, f2, t, c.grid);
      rows[k] = {t, ft.mean(), raw_geodesic(f1, f2, t, c.grid).mean(),
                 adapted_distance(gamma, c.p, f1, ft, c.grid).value,
                 renormalization_bridge(gamma, c.p, ft, c.grid).distance};
    });
    CsvWriter csv(dir.open("compare_geodesic.csv"), prov,
                  {"t", "mean", "raw_mean", "distance_from_start", "bridge_distance"});
    for (const auto& r : rows) {
      csv << r.t << r.mean << r.raw_mean << r.from_start << r.bridge;
      csv.end_row();
    }
    return json{{"file", "compare_geodesic.csv"}, {"steps", s.geodesic_steps}};
  });
  report["artifacts"] = artifacts;
  dir.write_json("compare_certificate.json", prov, report);
  return dir.written();
}

Written cmd_design(const ScenarioConfig& c) {
  if (!c.design) throw ConfigError("the design command needs a [design] table");
  const auto& s = *c.design;
  Provenance prov(c, "design");
  const auto base = load(c, s.distribution, prov);
  const TailIndex gamma(c.gamma);
  const TiltProblem problem{base.loaded.law, design_score(s, gamma), s.lambda, s.support_floor};
  const auto sol = solve_tilt(problem);
  OutputDir dir(c);

  double before = 0.0;
  double after = 0.0;
  for (std::size_t i = 0; i < sol.baseline_atoms.size(); ++i) {
    const double psi = problem.score(sol.baseline_atoms[i].location);
    before += sol.baseline_atoms[i].weight * psi;
    after += sol.weights[i] * psi;
  }
  json report = to_json(sol);
  report["score"] = {{"kind", s.score}, {"name", problem.score.name}};
  report["lambda"] = s.lambda;
  report["objective_before"] = before;
  report["objective_after"] = after;
  report["kl_cost"] = s.lambda * sol.kl;
  dir.write_json("design_solution.json", prov, report);

  {
    const std::size_t n = sol.baseline_atoms.size();
    CsvWriter csv(dir.open("design_odds.csv"), prov,
                  {"i", "j", "x_i", "x_j", "odds_from_weights", "odds_closed_form", "difference"});
    auto row = [&](std::size_t i, std::size_t j) {
      const auto o = pairwise_odds(problem, sol, i, j);
      csv << i << j << sol.baseline_atoms[i].location << sol.baseline_atoms[j].location
          << o.from_weights << o.closed_form << o.difference;
      csv.end_row();
    };
    // All pairs for small supports, neighbours otherwise.
    if (n <= 16) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) row(i, j);
      }
    } else {
      for (std::size_t i = 0; i + 1 < n; ++i) row(i, i + 1);
    }
  }
  {
    const HevLaw l0(gamma, base.loaded.law);
    const HevLaw l1(gamma, sol.optimizer);
    CsvWriter csv(dir.open("design_schedules.csv"), prov, {"u", "Q_before", "Q_after"});
    for (double u : quantile_levels(99)) {
      csv << u << hev_quantile(l0, u) << hev_quantile(l1, u);
      csv.end_row();
    }
  }
  return dir.written();
}

Written cmd_horizon(const ScenarioConfig& c) {
  if (!c.horizon || !c.offers) throw ConfigError("the horizon command needs [horizon] and [offers] tables");
  const auto& s = *c.horizon;
  Provenance prov(c, "horizon");
  const auto base = load(c, s.distribution, prov);
  const auto& f = base.loaded.law;
  const auto offers = offer_model(*c.offers);
  prov.add("offers", offers.describe());
  const HevLaw limit(offers.gamma(), f);
  OutputDir dir(c);

  {
    CsvWriter csv(dir.open("horizon_convergence.csv"), prov, {"theta", "sup_gap"});
    for (double theta : s.theta) {
      const HorizonLaw h(f, offers, theta);
      double gap = 0.0;
      for (double x : s.x) gap = std::max(gap, std::fabs(normalized_cdf(h, x) - hev_cdf(limit, x)));
      csv << theta << gap;
      csv.end_row();
    }
  }
  {
    const auto rows = second_order_diagnostic(f, offers, s.x, s.theta);
    CsvWriter csv(dir.open("horizon_second_order.csv"), prov,
                  {"theta", "rate", "sup_ratio", "leading_term_error", "sup_gap_to_limit"});
    for (const auto& r : rows) {
      csv << r.theta << r.rate << r.sup_ratio << r.leading_term_error << r.sup_gap_to_limit;
      csv.end_row();
    }
  }

  json runs = json::array();
  if (s.simulations > 0) {
    for (std::size_t k = 0; k < s.theta.size(); ++k) {
      const HorizonLaw h(f, offers, s.theta[k]);
      const auto draws = simulate_max(h, derive_seed(c.seed, k), s.simulations);
      const double n = static_cast<double>(draws.size());
      std::size_t empty = 0;
      for (const auto& d : draws) empty += d ? 0 : 1;
      json points = json::array();
      for (double x : s.x) {
        const double t = offers.a(s.theta[k]) * x + offers.b(s.theta[k]);
        std::size_t hits = 0;
        for (const auto& d : draws) hits += (!d || *d <= t) ? 1 : 0;
        const double freq = static_cast<double>(hits) / n;
        const double q = normalized_cdf(h, x);
        const double se = std::sqrt(q * (1.0 - q) / n);
        points.push_back({{"x", x},
                          {"empirical", freq},
                          {"finite_cdf", q},
                          {"standard_error", se},
                          {"z", se > 0.0 ? (freq - q) / se : 0.0}});
      }
      runs.push_back({{"theta", s.theta[k]},
                      {"replicates", draws.size()},
                      {"empty_fraction", static_cast<double>(empty) / n},
                      {"empty_probability", laplace_transform(f, s.theta[k])},
                      {"thresholds", points}});
    }
  }
  dir.write_json("horizon_simulation.json", prov,
                 {{"offers", offers.describe()}, {"simulations", s.simulations}, {"runs", runs}});
  return dir.written();
}

Written cmd_certify(const ScenarioConfig& c) {
  const CertifySection s = c.certify.value_or(CertifySection{});
  Provenance prov(c, "certify");
  prov.add("pairs", std::to_string(s.pairs));
  prov.add("atoms", std::to_string(s.atoms));
  OutputDir dir(c);

  // The same seeded pairs are reused for every (gamma, p).
  std::vector<std::pair<TypeDistribution, TypeDistribution>> pairs;
  for (std::size_t k = 0; k < s.pairs; ++k) {
    pairs.emplace_back(random_mean_one_law(derive_seed(c.seed, 2 * k), s.atoms),
                       random_mean_one_law(derive_seed(c.seed, 2 * k + 1), s.atoms));
  }

  CsvWriter csv(dir.open("certify.csv"), prov,
                {"gamma", "p", "pair", "lhs", "metric", "constant", "bound", "slack", "passed", "vacuous"});
  json combos = json::array();
  bool all = true;
  for (double g : s.gammas) {
    for (double p : s.ps) {
      if (g > 0.0 && p * g >= 1.0) {
        combos.push_back({{"gamma", g}, {"p", p}, {"skipped", "p*gamma >= 1"}});
        continue;
      }
      std::vector<StabilityCertificate> certs(pairs.size());
      detail::parallel_for(pairs.size(), [&](std::size_t k) {
        certs[k] = certify_stability(g, p, pairs[k].first, pairs[k].second, c.grid);
      });
      std::size_t passed = 0;
      double min_slack = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < certs.size(); ++k) {
        const auto& r = certs[k];
        csv << g << p << k << r.lhs << r.metric << r.constant << r.bound << r.slack << r.passed << r.vacuous;
        csv.end_row();
        passed += r.passed ? 1 : 0;
        if (!r.vacuous) min_slack = std::min(min_slack, r.slack);
      }
      all = all && passed == certs.size();
      combos.push_back({{"gamma", g},
                        {"p", p},
                        {"pairs", certs.size()},
                        {"passed", passed},
                        {"min_slack", std::isfinite(min_slack) ? json(min_slack) : json("inf")}});
    }
  }
  dir.write_json("certify_summary.json", prov, {{"combinations", combos}, {"all_passed", all}});
  return dir.written();
}

}  // namespace hevt::app
