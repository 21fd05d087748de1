#include "mci/scenario_io.hpp"
#include "mci/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mci {

using nlohmann::json;

json resource_to_json(const ResourceVector& v) {
  json a = json::array();
  for (int k = 0; k < kResourceKinds; ++k) a.push_back(v[k]);
  return a;
}

ResourceVector resource_from_json(const json& j) {
  if (!j.is_array() || j.size() != kResourceKinds)
    throw Error(ErrorCode::Validation, "resource vector must be an array of 8 integers");
  ResourceVector v;
  for (int k = 0; k < kResourceKinds; ++k) v[k] = j.at(k).get<int>();
  return v;
}

json sigmoid_to_json(const SigmoidParams& p) {
  return {{"midpoint", p.midpoint}, {"steepness", p.steepness}, {"floor", p.floor}, {"ceiling", p.ceiling}};
}

SigmoidParams sigmoid_from_json(const json& j) {
  return {j.at("midpoint").get<double>(), j.at("steepness").get<double>(), j.at("floor").get<double>(),
          j.at("ceiling").get<double>()};
}

namespace {

json geo_to_json(const GeoPoint& g) { return {{"lat", g.lat}, {"lon", g.lon}}; }
GeoPoint geo_from_json(const json& j) { return {j.at("lat").get<double>(), j.at("lon").get<double>()}; }

}  // namespace

json scenario_to_json(const Scenario& s) {
  json patients = json::array();
  for (const auto& p : s.patients) {
    patients.push_back({{"id", p.id},
                        {"severity", static_cast<int>(p.severity)},
                        {"requirements", resource_to_json(p.requirements)},
                        {"survival_window_min", std::isinf(p.survival_window) ? json(nullptr) : json(p.survival_window)},
                        {"reveal_time_min", p.reveal_time}});
  }
  json hospitals = json::array();
  for (const auto& h : s.hospitals) {
    hospitals.push_back({{"id", h.id},
                         {"name", h.name},
                         {"location", geo_to_json(h.location)},
                         {"level", h.level},
                         {"capacities", resource_to_json(h.capacities)}});
  }
  json travel = json::array();
  for (Eigen::Index i = 0; i < s.travel.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < s.travel.cols(); ++j) row.push_back(s.travel(i, j));
    travel.push_back(std::move(row));
  }
  return {{"schema_version", kScenarioSchemaVersion},
          {"scenario_id", s.id},
          {"incident_location", geo_to_json(s.incident_location)},
          {"patients", std::move(patients)},
          {"hospitals", std::move(hospitals)},
          {"travel_matrix", std::move(travel)},
          {"reveal_params",
           {{"patients", sigmoid_to_json(s.reveal.patients)},
            {"ambulances", sigmoid_to_json(s.reveal.ambulances)},
            {"capacity", sigmoid_to_json(s.reveal.capacity)}}},
          {"fleet", {{"size_max", s.fleet_size_max}}},
          {"horizon_min", s.horizon},
          {"seed", s.seed}};
}

Scenario scenario_from_json(const json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kScenarioSchemaVersion)
      throw Error(ErrorCode::Validation, "unsupported scenario schema_version " + std::to_string(version));
    Scenario s;
    s.id = j.at("scenario_id").get<std::string>();
    s.incident_location = geo_from_json(j.at("incident_location"));
    for (const auto& pj : j.at("patients")) {
      Patient p;
      p.id = pj.at("id").get<int>();
      const auto sev = severity_from_int(pj.at("severity").get<int>());
      if (!sev) throw Error(ErrorCode::Validation, "patient severity out of range");
      p.severity = *sev;
      p.requirements = resource_from_json(pj.at("requirements"));
      const auto& w = pj.at("survival_window_min");
      p.survival_window = w.is_null() ? kUnbounded : w.get<double>();
      p.reveal_time = pj.at("reveal_time_min").get<int>();
      s.patients.push_back(p);
    }
    for (const auto& hj : j.at("hospitals")) {
      Hospital h;
      h.id = hj.at("id").get<int>();
      h.name = hj.value("name", std::string{});
      h.location = geo_from_json(hj.at("location"));
      h.level = hj.at("level").get<int>();
      h.capacities = resource_from_json(hj.at("capacities"));
      s.hospitals.push_back(std::move(h));
    }
    const auto& tm = j.at("travel_matrix");
    const Eigen::Index rows = static_cast<Eigen::Index>(tm.size());
    const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(tm.at(0).size()) : 0;
    s.travel.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (static_cast<Eigen::Index>(tm.at(r).size()) != cols)
        throw Error(ErrorCode::Validation, "travel_matrix rows have unequal length");
      for (Eigen::Index c = 0; c < cols; ++c) s.travel(r, c) = tm.at(r).at(c).get<double>();
    }
    const auto& rp = j.at("reveal_params");
    s.reveal.patients = sigmoid_from_json(rp.at("patients"));
    s.reveal.ambulances = sigmoid_from_json(rp.at("ambulances"));
    s.reveal.capacity = sigmoid_from_json(rp.at("capacity"));
    s.fleet_size_max = j.at("fleet").at("size_max").get<int>();
    s.horizon = j.at("horizon_min").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Validation, std::string("malformed scenario document: ") + e.what());
  }
}

std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Validation, std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Storage, "cannot write " + path.string());
  out << serialize_scenario(s);
  if (!out) throw Error(ErrorCode::Storage, "write failed for " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace mci
