// JSON scenario documents (schema_version 1). Resource vectors are 8-element
// arrays in canonical ResourceKind order; unbounded survival windows are null.
#pragma once

#include "mci/core.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace mci {

inline constexpr int kScenarioSchemaVersion = 1;

nlohmann::json resource_to_json(const ResourceVector& v);
ResourceVector resource_from_json(const nlohmann::json& j);

nlohmann::json sigmoid_to_json(const SigmoidParams& p);
SigmoidParams sigmoid_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const Scenario& s);
/// Throws Error(Validation) on missing keys or an unknown schema version.
Scenario scenario_from_json(const nlohmann::json& j);

/// Canonical text form; equal scenarios give byte-identical strings.
std::string serialize_scenario(const Scenario& s);
Scenario parse_scenario(const std::string& text);

void save_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace mci
