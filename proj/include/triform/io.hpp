#pragma once

// CSV and JSON serialization of trajectories, equilibrium catalogs, reports
// and Gamma evaluations. All numbers are written with shortest round-trip
// precision; JSON files carry schema_version "1".

#include <string>
#include <vector>

#include <json.hpp>

#include "triform/experiments.hpp"

namespace triform {

using Json = nlohmann::ordered_json;

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

inline constexpr const char* kSchemaVersion = "1";

std::string trajectory_csv(const TrajectoryRecord& record);
Json trajectory_json(const TrajectoryRecord& record, const FormationSpec& spec,
                     const Json& config_echo = Json::object());

std::string catalog_csv(const std::vector<EquilibriumRecord>& records);
Json catalog_json(const FormationSpec& spec, const EquilibriumCatalog& catalog,
                  const std::vector<EquilibriumRecord>& targets,
                  const Json& config_echo = Json::object());

std::string montecarlo_csv(const MonteCarloReport& report);
Json montecarlo_json(const MonteCarloReport& report,
                     const Json& config_echo = Json::object());

std::string verification_csv(const VerificationReport& report);
Json verification_json(const VerificationReport& report,
                       const Json& config_echo = Json::object());

Json gamma_report_json(const GammaReport& report);
Json probe_json(const ProbeResult& probe);
Json escape_json(const EscapeReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace triform
