#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hevt/design.hpp"
#include "hevt/horizon.hpp"
#include "hevt/transport.hpp"
#include "hevt/typedist.hpp"

namespace hevt {

// Shortest decimal that round-trips ("%.17g" trimmed); "inf"/"-inf"/"nan" otherwise.
std::string format_number(double x);

nlohmann::json to_json(const ExtendedReal& x);
nlohmann::json to_json(const MetricReport& r);
nlohmann::json to_json(const StabilityCertificate& c);
nlohmann::json to_json(const RenormalizationBridge& b);
nlohmann::json to_json(const TiltSolution& s);
nlohmann::json to_json(const TypeDistribution& f);

// CSV with a header: "x,w" rows for atomic laws, "u,Q" rows otherwise.
void write_distribution_csv(std::ostream& out, const TypeDistribution& f);
// Reads either layout back; lines starting with '#' are skipped.
TypeDistribution read_distribution_csv(std::istream& in);

}  // namespace hevt
