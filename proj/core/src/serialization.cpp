#include "hevt/serialization.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "hevt/errors.hpp"

namespace hevt {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(const ExtendedReal& x) {
  if (x.is_infinite()) return "inf";
  return x.value();
}

nlohmann::json to_json(const MetricReport& r) {
  return {{"p", r.p},
          {"value", to_json(r.value)},
          {"method", method_name(r.method)},
          {"grid_size", r.grid_size}};
}

nlohmann::json to_json(const StabilityCertificate& c) {
  nlohmann::json j = {{"gamma", c.gamma},   {"p", c.p},
                      {"lhs", c.lhs},       {"metric", to_json(c.metric)},
                      {"constant", c.constant}, {"passed", c.passed},
                      {"vacuous", c.vacuous},   {"truncation", c.truncation}};
  j["bound"] = c.vacuous ? nlohmann::json("inf") : nlohmann::json(c.bound);
  j["slack"] = c.vacuous ? nlohmann::json("inf") : nlohmann::json(c.slack);
  return j;
}

nlohmann::json to_json(const RenormalizationBridge& b) {
  nlohmann::json j = {{"mean", b.mean},
                      {"distance", b.distance},
                      {"direct", b.direct},
                      {"agrees", b.agrees}};
  j["induced_bound"] = b.induced_bound ? nlohmann::json(*b.induced_bound) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const TiltSolution& s) {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < s.baseline_atoms.size(); ++i) {
    atoms.push_back({{"x", s.baseline_atoms[i].location},
                     {"baseline_weight", s.baseline_atoms[i].weight},
                     {"weight", s.weights[i]}});
  }
  return {{"eta_star", s.eta_star},
          {"primal_value", s.primal_value},
          {"dual_value", s.dual_value},
          {"duality_gap", std::fabs(s.primal_value - s.dual_value)},
          {"mean_residual", s.mean_residual},
          {"kl", s.kl},
          {"iterations", s.iterations},
          {"discretized", s.discretized},
          {"atoms", atoms}};
}

nlohmann::json to_json(const TypeDistribution& f) {
  nlohmann::json j = {{"description", f.describe()}, {"mean", f.mean()}};
  if (f.is_atomic()) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : f.atoms()) atoms.push_back({{"x", a.location}, {"w", a.weight}});
    j["atoms"] = atoms;
  }
  return j;
}

void write_distribution_csv(std::ostream& out, const TypeDistribution& f) {
  if (f.is_atomic()) {
    out << "x,w\n";
    for (const auto& a : f.atoms()) out << format_number(a.location) << ',' << format_number(a.weight) << '\n';
    return;
  }
  const auto q = f.grid();
  const double n = static_cast<double>(q.size());
  out << "u,Q\n";
  for (std::size_t j = 0; j < q.size(); ++j) {
    out << format_number((static_cast<double>(j) + 0.5) / n) << ',' << format_number(q[j]) << '\n';
  }
}

TypeDistribution read_distribution_csv(std::istream& in) {
  std::string line;
  std::string header;
  std::vector<std::pair<double, double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = line;
      if (header != "x,w" && header != "u,Q") {
        throw DomainError("distribution CSV header must be 'x,w' or 'u,Q', got '" + header + "'");
      }
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DomainError("line " + std::to_string(line_no) + ": expected two comma-separated values");
    }
    try {
      rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw DomainError("line " + std::to_string(line_no) + ": not a number");
    }
  }
  if (rows.empty()) throw DomainError("distribution CSV has no rows");
  if (header == "x,w") {
    std::vector<Atom> atoms;
    for (const auto& [x, w] : rows) atoms.push_back({x, w});
    return TypeDistribution::atomic(std::move(atoms));
  }
  std::vector<double> q;
  for (const auto& r : rows) q.push_back(r.second);
  return TypeDistribution::quantile_grid(std::move(q));
}

}  // namespace hevt
