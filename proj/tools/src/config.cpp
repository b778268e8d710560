#include "hevt_app/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "hevt/errors.hpp"
#include "hevt/serialization.hpp"

namespace hevt::app {
namespace {

std::size_t line_of(const toml::node& node) { return node.source().begin.line; }

// Typed access to one TOML table that remembers which keys were read, so
// that leftovers can be reported as unknown.
class TableReader {
 public:
  TableReader(const toml::table& table, std::string where)
      : table_(table), where_(std::move(where)) {}

  std::size_t line() const { return line_of(table_); }

  bool has(std::string_view key) const { return table_.contains(key); }

  const toml::node* node(std::string_view key) {
    used_.insert(std::string(key));
    return table_.get(key);
  }

  std::string string(std::string_view key, std::optional<std::string> fallback = std::nullopt) {
    const auto* n = node(key);
    if (!n) return required(key, fallback);
    const auto v = n->value<std::string>();
    if (!n->is_string() || !v) fail(*n, key, "a string");
    return *v;
  }

  double number(std::string_view key, std::optional<double> fallback = std::nullopt) {
    const auto* n = node(key);
    if (!n) return required(key, fallback);
    return as_number(*n, key);
  }

  std::optional<double> optional_number(std::string_view key) {
    const auto* n = node(key);
    if (!n) return std::nullopt;
    return as_number(*n, key);
  }

  std::int64_t integer(std::string_view key, std::optional<std::int64_t> fallback = std::nullopt,
                       std::int64_t min = 0) {
    const auto* n = node(key);
    if (!n) return required(key, fallback);
    if (!n->is_integer()) fail(*n, key, "an integer");
    const auto v = *n->value<std::int64_t>();
    if (v < min) {
      throw ConfigError(key_name(key) + " must be at least " + std::to_string(min), line_of(*n));
    }
    return v;
  }

  bool boolean(std::string_view key, bool fallback) {
    const auto* n = node(key);
    if (!n) return fallback;
    if (!n->is_boolean()) fail(*n, key, "a boolean");
    return *n->value<bool>();
  }

  std::vector<double> numbers(std::string_view key, std::vector<double> fallback) {
    const auto* n = node(key);
    if (!n) return fallback;
    const auto* arr = n->as_array();
    if (!arr) fail(*n, key, "an array of numbers");
    std::vector<double> out;
    for (const auto& item : *arr) out.push_back(as_number(item, key));
    return out;
  }

  std::vector<std::pair<double, double>> pairs(std::string_view key) {
    const auto* n = node(key);
    if (!n) throw ConfigError("missing key " + key_name(key), line());
    const auto* arr = n->as_array();
    if (!arr) fail(*n, key, "an array of [a, b] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& item : *arr) {
      const auto* pair = item.as_array();
      if (!pair || pair->size() != 2) fail(item, key, "an array of [a, b] pairs");
      out.emplace_back(as_number((*pair)[0], key), as_number((*pair)[1], key));
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, v] : table_) {
      if (!used_.count(std::string(k.str()))) {
        throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where_, line_of(v));
      }
    }
  }

 private:
  template <typename T>
  T required(std::string_view key, const std::optional<T>& fallback) const {
    if (!fallback) throw ConfigError("missing key " + key_name(key), line());
    return *fallback;
  }

  double as_number(const toml::node& n, std::string_view key) const {
    if (n.is_integer()) return static_cast<double>(*n.value<std::int64_t>());
    if (!n.is_floating_point()) fail(n, key, "a number");
    return *n.value<double>();
  }

  [[noreturn]] void fail(const toml::node& n, std::string_view key, const char* expected) const {
    throw ConfigError(key_name(key) + " must be " + expected, line_of(n));
  }

  std::string key_name(std::string_view key) const {
    return "'" + std::string(key) + "' in " + where_;
  }

  const toml::table& table_;
  std::string where_;
  std::set<std::string> used_;
};

const toml::table* subtable(const toml::table& root, std::string_view key) {
  const auto* n = root.get(key);
  if (!n) return nullptr;
  const auto* t = n->as_table();
  if (!t) throw ConfigError("'" + std::string(key) + "' must be a table", line_of(*n));
  return t;
}

DistributionKind parse_kind(const std::string& s, std::size_t line) {
  static const std::map<std::string, DistributionKind> kinds = {
      {"atomic", DistributionKind::kAtomic},
      {"dirac", DistributionKind::kDirac},
      {"two_point", DistributionKind::kTwoPoint},
      {"gamma", DistributionKind::kGamma},
      {"lognormal", DistributionKind::kLogNormal},
      {"degree_histogram", DistributionKind::kDegreeHistogram},
      {"scores", DistributionKind::kScores},
      {"csv", DistributionKind::kCsv},
  };
  const auto it = kinds.find(s);
  if (it == kinds.end()) throw ConfigError("unknown distribution kind '" + s + "'", line);
  return it->second;
}

DistributionSpec parse_distribution(const std::string& name, const toml::table& table) {
  TableReader r(table, "distributions." + name);
  DistributionSpec d;
  d.name = name;
  d.kind = parse_kind(r.string("kind"), r.line());
  switch (d.kind) {
    case DistributionKind::kAtomic:
      d.pairs = r.pairs("atoms");
      break;
    case DistributionKind::kDirac:
      d.location = r.number("location", 1.0);
      break;
    case DistributionKind::kTwoPoint:
      d.lo = r.number("lo");
      d.hi = r.number("hi");
      d.weight_lo = r.number("weight_lo");
      break;
    case DistributionKind::kGamma:
      d.shape = r.number("shape");
      break;
    case DistributionKind::kLogNormal:
      d.sigma = r.number("sigma");
      break;
    case DistributionKind::kDegreeHistogram:
      d.pairs = r.pairs("degrees");
      break;
    case DistributionKind::kScores:
      d.values = r.numbers("values", {});
      if (d.values.empty()) throw ConfigError("'values' in distributions." + name + " is empty", r.line());
      break;
    case DistributionKind::kCsv:
      d.path = r.string("path");
      break;
  }
  const bool always = d.kind == DistributionKind::kDegreeHistogram || d.kind == DistributionKind::kScores;
  d.normalize = r.boolean("normalize", always);
  if (always && !d.normalize) {
    throw ConfigError("distributions." + name + ": " + kind_name(d.kind) +
                          " inputs are always normalized to mean one",
                      r.line());
  }
  r.finish();
  return d;
}

void check_positive(const std::string& what, double v, std::size_t line) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(what + " must be positive and finite", line);
  }
}

void check_name(const ScenarioConfig& c, const std::string& name, const std::string& where,
                std::size_t line) {
  for (const auto& d : c.distributions) {
    if (d.name == name) return;
  }
  throw ConfigError(where + " refers to unknown distribution '" + name + "'", line);
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (const char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

// TOML float literal that reads back to the same double.
std::string toml_float(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::string s = format_number(x);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string toml_floats(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + toml_float(v[i]);
  return s + "]";
}

std::string toml_pairs(const std::vector<std::pair<double, double>>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += (i ? ", " : "") + ("[" + toml_float(v[i].first) + ", " + toml_float(v[i].second) + "]");
  }
  return s + "]";
}

// TOML bare keys are [A-Za-z0-9_-]+; anything else is quoted.
std::string toml_key(const std::string& k) {
  const bool bare = !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
  return bare ? k : quoted(k);
}

TypeDistribution equal_weight(const std::vector<double>& values) {
  std::map<double, double> counts;
  for (double v : values) counts[v] += 1.0;
  std::vector<Atom> atoms;
  for (const auto& [x, c] : counts) atoms.push_back({x, c / static_cast<double>(values.size())});
  return TypeDistribution::atomic(std::move(atoms));
}

}  // namespace

const char* kind_name(DistributionKind k) {
  switch (k) {
    case DistributionKind::kAtomic: return "atomic";
    case DistributionKind::kDirac: return "dirac";
    case DistributionKind::kTwoPoint: return "two_point";
    case DistributionKind::kGamma: return "gamma";
    case DistributionKind::kLogNormal: return "lognormal";
    case DistributionKind::kDegreeHistogram: return "degree_histogram";
    case DistributionKind::kScores: return "scores";
    case DistributionKind::kCsv: return "csv";
  }
  return "unknown";
}

const DistributionSpec& ScenarioConfig::distribution(const std::string& name) const {
  for (const auto& d : distributions) {
    if (d.name == name) return d;
  }
  throw ConfigError("unknown distribution '" + name + "'");
}

LoadedDistribution load_distribution(const DistributionSpec& spec, const std::string& base_dir) {
  LoadedDistribution out{TypeDistribution::dirac(1.0), 1.0, false};
  switch (spec.kind) {
    case DistributionKind::kAtomic: {
      std::vector<Atom> atoms;
      for (const auto& [x, w] : spec.pairs) atoms.push_back({x, w});
      out.law = TypeDistribution::atomic(std::move(atoms));
      break;
    }
    case DistributionKind::kDirac:
      out.law = TypeDistribution::dirac(spec.location);
      break;
    case DistributionKind::kTwoPoint:
      out.law = TypeDistribution::two_point(spec.lo, spec.hi, spec.weight_lo);
      break;
    case DistributionKind::kGamma:
      out.law = TypeDistribution::gamma_mean_one(spec.shape);
      break;
    case DistributionKind::kLogNormal:
      out.law = TypeDistribution::lognormal_mean_one(spec.sigma);
      break;
    case DistributionKind::kDegreeHistogram: {
      // X_i = D_i / E[D] with E[D] the node-weighted mean degree.
      double nodes = 0.0;
      for (const auto& [degree, count] : spec.pairs) {
        if (!(degree > 0.0)) {
          throw DomainError("degree " + format_number(degree) +
                            " has no positive type; drop isolated nodes before ingestion");
        }
        if (!(count >= 0.0)) throw DomainError("degree counts must be nonnegative");
        nodes += count;
      }
      if (!(nodes > 0.0)) throw DomainError("degree histogram has no nodes");
      std::vector<Atom> atoms;
      for (const auto& [degree, count] : spec.pairs) atoms.push_back({degree, count / nodes});
      // Weights may miss one by rounding; fold the residual into the last.
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < atoms.size(); ++i) total += atoms[i].weight;
      atoms.back().weight = 1.0 - total;
      out.law = TypeDistribution::atomic(std::move(atoms));
      break;
    }
    case DistributionKind::kScores:
      for (double v : spec.values) {
        if (!(v > 0.0)) {
          throw DomainError("score " + format_number(v) + " has no positive type");
        }
      }
      out.law = equal_weight(spec.values);
      break;
    case DistributionKind::kCsv: {
      const std::filesystem::path p(spec.path);
      const auto full = p.is_absolute() ? p : std::filesystem::path(base_dir) / p;
      std::ifstream in(full);
      if (!in) throw ConfigError("cannot open distribution file " + full.string());
      out.law = read_distribution_csv(in);
      break;
    }
  }
  out.raw_mean = out.law.mean();
  if (spec.normalize) {
    out.law = out.law.renormalized();
    out.normalized = true;
  }
  return out;
}

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(e.description()), e.source().begin.line);
  }

  ScenarioConfig c;
  c.base_dir = base_dir;
  TableReader top(root, "the top level");
  c.scenario = top.string("scenario", c.scenario);
  c.gamma = top.number("gamma", c.gamma);
  c.p = top.number("p", c.p);
  c.seed = static_cast<std::uint64_t>(top.integer("seed", 0));
  c.output = top.string("output", c.output);
  c.grid = static_cast<std::size_t>(top.integer("grid", static_cast<std::int64_t>(c.grid), 32));
  if (!std::isfinite(c.gamma)) throw ConfigError("gamma must be finite", 1);
  check_positive("p", c.p, 1);
  if (c.p < 1.0) throw ConfigError("p must be at least 1", 1);

  if (const auto* dists = subtable(root, "distributions")) {
    top.node("distributions");
    for (const auto& [key, node] : *dists) {
      const auto* t = node.as_table();
      if (!t) throw ConfigError("distributions." + std::string(key.str()) + " must be a table", line_of(node));
      auto spec = parse_distribution(std::string(key.str()), *t);
      try {
        load_distribution(spec, base_dir);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), line_of(node));
      } catch (const hevt::Error& e) {
        throw ConfigError("distributions." + spec.name + ": " + e.what(), line_of(node));
      }
      c.distributions.push_back(std::move(spec));
    }
  }

  if (const auto* t = subtable(root, "law")) {
    top.node("law");
    TableReader r(*t, "[law]");
    LawSection s;
    s.distribution = r.string("distribution");
    check_name(c, s.distribution, "[law]", r.line());
    s.x_min = r.number("x_min", s.x_min);
    s.x_max = r.number("x_max", s.x_max);
    s.points = static_cast<std::size_t>(r.integer("points", static_cast<std::int64_t>(s.points), 2));
    s.quantiles = static_cast<std::size_t>(r.integer("quantiles", static_cast<std::int64_t>(s.quantiles), 1));
    s.samples = static_cast<std::size_t>(r.integer("samples", 0));
    if (!(s.x_min < s.x_max)) throw ConfigError("[law] needs x_min < x_max", r.line());
    r.finish();
    c.law = s;
  }

  if (const auto* t = subtable(root, "compare")) {
    top.node("compare");
    TableReader r(*t, "[compare]");
    CompareSection s;
    s.first = r.string("first");
    s.second = r.string("second");
    check_name(c, s.first, "[compare]", r.line());
    check_name(c, s.second, "[compare]", r.line());
    s.x = r.numbers("x", s.x);
    s.quantiles = static_cast<std::size_t>(r.integer("quantiles", static_cast<std::int64_t>(s.quantiles), 1));
    s.geodesic_steps = static_cast<std::size_t>(
        r.integer("geodesic_steps", static_cast<std::int64_t>(s.geodesic_steps), 1));
    r.finish();
    c.compare = s;
  }

  if (const auto* t = subtable(root, "offers")) {
    top.node("offers");
    TableReader r(*t, "[offers]");
    OfferSpec s;
    s.family = r.string("family", s.family);
    if (s.family != "pareto" && s.family != "exponential" && s.family != "hall") {
      throw ConfigError("[offers] family must be pareto, exponential or hall", r.line());
    }
    s.gamma = r.number("gamma", s.gamma);
    s.d = r.number("d", s.d);
    s.beta = r.number("beta", s.beta);
    if (s.family != "exponential") check_positive("[offers] gamma", s.gamma, r.line());
    if (s.family == "hall") check_positive("[offers] beta", s.beta, r.line());
    r.finish();
    c.offers = s;
  }

  if (const auto* t = subtable(root, "horizon")) {
    top.node("horizon");
    TableReader r(*t, "[horizon]");
    HorizonSection s;
    s.distribution = r.string("distribution");
    check_name(c, s.distribution, "[horizon]", r.line());
    s.theta = r.numbers("theta", s.theta);
    s.x = r.numbers("x", s.x);
    s.simulations = static_cast<std::size_t>(r.integer("simulations", 0));
    if (s.theta.empty()) throw ConfigError("[horizon] theta list is empty", r.line());
    for (double th : s.theta) check_positive("[horizon] theta", th, r.line());
    if (!c.offers) throw ConfigError("[horizon] needs an [offers] table", r.line());
    r.finish();
    c.horizon = s;
  }

  if (const auto* t = subtable(root, "design")) {
    top.node("design");
    TableReader r(*t, "[design]");
    DesignSection s;
    s.distribution = r.string("distribution");
    check_name(c, s.distribution, "[design]", r.line());
    s.score = r.string("score", s.score);
    if (s.score != "cdf" && s.score != "power" && s.score != "constant" &&
        s.score != "expected_utility") {
      throw ConfigError("[design] score must be cdf, power, constant or expected_utility", r.line());
    }
    s.utility = r.string("utility", s.utility);
    if (s.utility != "linear" && s.utility != "exponential") {
      throw ConfigError("[design] utility must be linear or exponential", r.line());
    }
    s.y = r.number("y", s.y);
    s.c = r.number("c", s.c);
    s.rho = r.number("rho", s.rho);
    s.value = r.number("value", s.value);
    s.lambda = r.number("lambda", s.lambda);
    s.support_floor = r.optional_number("support_floor");
    check_positive("[design] lambda", s.lambda, r.line());
    r.finish();
    c.design = s;
  }

  if (const auto* t = subtable(root, "certify")) {
    top.node("certify");
    TableReader r(*t, "[certify]");
    CertifySection s;
    s.gammas = r.numbers("gammas", s.gammas);
    s.ps = r.numbers("ps", s.ps);
    s.pairs = static_cast<std::size_t>(r.integer("pairs", static_cast<std::int64_t>(s.pairs), 1));
    s.atoms = static_cast<std::size_t>(r.integer("atoms", static_cast<std::int64_t>(s.atoms), 1));
    for (double p : s.ps) {
      if (!(p >= 1.0)) throw ConfigError("[certify] ps must be at least 1", r.line());
    }
    r.finish();
    c.certify = s;
  }

  top.finish();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(text.str(), dir.empty() ? "." : dir.string());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "scenario = " << quoted(c.scenario) << "\n";
  o << "gamma = " << toml_float(c.gamma) << "\n";
  o << "p = " << toml_float(c.p) << "\n";
  if (c.seed > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw ConfigError("seed does not fit a TOML integer");
  }
  o << "seed = " << c.seed << "\n";
  o << "output = " << quoted(c.output) << "\n";
  o << "grid = " << c.grid << "\n";

  for (const auto& d : c.distributions) {
    o << "\n[distributions." << toml_key(d.name) << "]\n";
    o << "kind = " << quoted(kind_name(d.kind)) << "\n";
    switch (d.kind) {
      case DistributionKind::kAtomic: o << "atoms = " << toml_pairs(d.pairs) << "\n"; break;
      case DistributionKind::kDirac: o << "location = " << toml_float(d.location) << "\n"; break;
      case DistributionKind::kTwoPoint:
        o << "lo = " << toml_float(d.lo) << "\nhi = " << toml_float(d.hi)
          << "\nweight_lo = " << toml_float(d.weight_lo) << "\n";
        break;
      case DistributionKind::kGamma: o << "shape = " << toml_float(d.shape) << "\n"; break;
      case DistributionKind::kLogNormal: o << "sigma = " << toml_float(d.sigma) << "\n"; break;
      case DistributionKind::kDegreeHistogram: o << "degrees = " << toml_pairs(d.pairs) << "\n"; break;
      case DistributionKind::kScores: o << "values = " << toml_floats(d.values) << "\n"; break;
      case DistributionKind::kCsv: o << "path = " << quoted(d.path) << "\n"; break;
    }
    o << "normalize = " << (d.normalize ? "true" : "false") << "\n";
  }

  if (c.law) {
    const auto& s = *c.law;
    o << "\n[law]\ndistribution = " << quoted(s.distribution) << "\n"
      << "x_min = " << toml_float(s.x_min) << "\nx_max = " << toml_float(s.x_max) << "\n"
      << "points = " << s.points << "\nquantiles = " << s.quantiles << "\nsamples = " << s.samples
      << "\n";
  }
  if (c.compare) {
    const auto& s = *c.compare;
    o << "\n[compare]\nfirst = " << quoted(s.first) << "\nsecond = " << quoted(s.second) << "\n"
      << "x = " << toml_floats(s.x) << "\nquantiles = " << s.quantiles
      << "\ngeodesic_steps = " << s.geodesic_steps << "\n";
  }
  if (c.offers) {
    const auto& s = *c.offers;
    o << "\n[offers]\nfamily = " << quoted(s.family) << "\ngamma = " << toml_float(s.gamma)
      << "\nd = " << toml_float(s.d) << "\nbeta = " << toml_float(s.beta) << "\n";
  }
  if (c.horizon) {
    const auto& s = *c.horizon;
    o << "\n[horizon]\ndistribution = " << quoted(s.distribution) << "\ntheta = " << toml_floats(s.theta)
      << "\nx = " << toml_floats(s.x) << "\nsimulations = " << s.simulations << "\n";
  }
  if (c.design) {
    const auto& s = *c.design;
    o << "\n[design]\ndistribution = " << quoted(s.distribution) << "\nscore = " << quoted(s.score)
      << "\nutility = " << quoted(s.utility) << "\ny = " << toml_float(s.y)
      << "\nc = " << toml_float(s.c) << "\nrho = " << toml_float(s.rho)
      << "\nvalue = " << toml_float(s.value) << "\nlambda = " << toml_float(s.lambda) << "\n";
    if (s.support_floor) o << "support_floor = " << toml_float(*s.support_floor) << "\n";
  }
  if (c.certify) {
    const auto& s = *c.certify;
    o << "\n[certify]\ngammas = " << toml_floats(s.gammas) << "\nps = " << toml_floats(s.ps)
      << "\npairs = " << s.pairs << "\natoms = " << s.atoms << "\n";
  }
  return o.str();
}

}  // namespace hevt::app
