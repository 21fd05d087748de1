// Domain types shared across the simulator: severity codes, the eight resource
// kinds, patients, hospitals, the travel matrix and whole scenarios.
#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mci {

enum class Severity : int { Deceased = 0, Minor = 1, Severe = 2, Critical = 3 };

/// Urgency rank: Critical > Severe > Minor > Deceased.
constexpr int urgency(Severity s) { return static_cast<int>(s); }

/// Canonical resource ordering. Every 8-vector in the project is indexed this way.
enum class ResourceKind : int {
  Ventilator = 0,
  Emergency = 1,
  ICU = 2,
  OperatingRoom = 3,
  PRBC = 4,
  BurnCenter = 5,
  Pediatrics = 6,
  Obstetrics = 7,
};

inline constexpr int kResourceKinds = 8;

inline constexpr std::array<std::string_view, kResourceKinds> kResourceNames = {
    "ventilator", "emergency", "icu", "operating_room", "prbc", "burn_center", "pediatrics", "obstetrics"};

constexpr int index_of(ResourceKind k) { return static_cast<int>(k); }

/// Counts per resource kind. Requirement vectors hold 0/1 entries.
using ResourceVector = Eigen::Matrix<int, kResourceKinds, 1>;

/// Travel durations in minutes, rows = patients, cols = hospitals.
using TravelMatrix = Eigen::MatrixXd;

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class PatientStatus { Hidden, Unassigned, Assigned, InTransit, Admitted, Deceased };

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

/// Static description of a casualty as it appears in a scenario. Runtime
/// status lives in the simulation state.
struct Patient {
  int id = 0;
  Severity severity = Severity::Minor;
  ResourceVector requirements = ResourceVector::Zero();
  double survival_window = kUnbounded;  // minutes; kUnbounded for Minor
  int reveal_time = 0;                  // minutes from incident start
};

struct Hospital {
  int id = 0;
  std::string name;
  GeoPoint location;
  int level = 1;  // 1 = most capable
  ResourceVector capacities = ResourceVector::Zero();
};

/// Logistic reveal curve: floor + (ceiling - floor) / (1 + exp(-k (t - t0))).
struct SigmoidParams {
  double midpoint = 0.0;   // minutes
  double steepness = 1.0;  // 1/minutes
  double floor = 0.0;
  double ceiling = 1.0;
  bool operator==(const SigmoidParams&) const = default;
};

struct RevealParams {
  SigmoidParams patients;
  SigmoidParams ambulances;
  SigmoidParams capacity;
  bool operator==(const RevealParams&) const = default;
};

struct Scenario {
  std::string id;
  GeoPoint incident_location;
  std::vector<Patient> patients;
  std::vector<Hospital> hospitals;
  TravelMatrix travel;
  RevealParams reveal;
  int fleet_size_max = 0;
  int horizon = 0;  // minutes
  std::uint64_t seed = 0;

  /// Row/column lookups by id; nullopt when absent.
  std::optional<std::size_t> patient_index(int patient_id) const;
  std::optional<std::size_t> hospital_index(int hospital_id) const;
};

struct Violation {
  std::string subject;  // e.g. "hospitals[3]" or "travel_matrix"
  std::string message;
};

/// Returns every invariant breach; an empty list means the scenario is usable.
std::vector<Violation> validate_scenario(const Scenario& scenario);

struct MatchResult {
  int q = 0;
  ResourceVector matched = ResourceVector::Zero();
};

/// Which required kinds are available (>= 1 unit). q counts them.
MatchResult resource_match_count(const ResourceVector& required, const ResourceVector& available);

/// Number of set requirement bits (Q_i).
inline int required_count(const ResourceVector& required) { return (required.array() > 0).count(); }

std::string_view to_string(Severity s);
std::string_view to_string(PatientStatus s);
std::optional<Severity> severity_from_int(int v);

/// Display colour used by the notification feed and action panel.
std::string_view severity_color(Severity s);

}  // namespace mci
