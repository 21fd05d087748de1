#include "doctest.h"
#include "support.hpp"

#include "mci/error.hpp"
#include "mci/reward.hpp"

#include <array>
#include <cmath>
#include <limits>

using namespace mci;

namespace {

// Hand-expanded table, one line per case and level.
double table(RewardCase c, Severity s, int h, double pt, double pq) {
  switch (c) {
    case RewardCase::NewlyDeceased: return s == Severity::Critical ? -600.0 : -400.0;
    case RewardCase::Critical:
      if (h == 1) return 300.0 * pq + 300.0 * pt;
      if (h == 2) return 300.0 * pq + 150.0 * pt;
      return 300.0 * pq;
    case RewardCase::Severe:
      if (h == 1) return 200.0 * pq + 200.0 * pt;
      if (h == 2) return 200.0 * pq + 200.0 * pt;
      return 200.0 * pq + 100.0 * pt;
    case RewardCase::Minor:
      if (h == 1) return 100.0 * pq;
      if (h == 2) return 100.0 * pq + 50.0 * pt;
      return 100.0 * pq + 100.0 * pt;
    case RewardCase::ExpiredPostAssignment:
      if (h == 1) return -300.0;
      if (h == 2) return -200.0;
      return -100.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

constexpr std::array<double, 4> kGrid = {0.0, 0.25, 0.5, 1.0};

}  // namespace

TEST_CASE("penalties") {
  CHECK(time_penalty(0, 60) == 1.0);
  CHECK(time_penalty(30, 60) == 0.5);
  CHECK(time_penalty(90, 60) == 0.0);
  CHECK(time_penalty(1000, kUnbounded) == 1.0);
  CHECK(resource_penalty(1, 2) == 0.5);
  CHECK(resource_penalty(0, 0) == 1.0);
  CHECK(resource_penalty(3, 3) == 1.0);
  CHECK_THROWS_AS(time_penalty(1, 0), Error);
  CHECK_THROWS_AS(time_penalty(-1, 60), Error);
  CHECK_THROWS_AS(resource_penalty(3, 2), Error);
  CHECK_THROWS_AS(resource_penalty(-1, 2), Error);
}

TEST_CASE("anchor values") {
  CHECK(patient_reward(RewardCase::Critical, Severity::Critical, 1, 1.0, 1.0) == 600.0);
  CHECK(patient_reward(RewardCase::NewlyDeceased, Severity::Critical, std::nullopt, 0, 0) == -600.0);
  CHECK(patient_reward(RewardCase::NewlyDeceased, Severity::Severe, std::nullopt, 0, 0) == -400.0);
  CHECK(patient_reward(RewardCase::ExpiredPostAssignment, Severity::Severe, 2, 0, 0) == -200.0);
  CHECK(patient_reward(RewardCase::Minor, Severity::Minor, 1, 0.7, 1.0) == 100.0);
}

TEST_CASE("exhaustive grid matches the hand table") {
  int checked = 0;
  for (auto c : {RewardCase::Critical, RewardCase::Severe, RewardCase::Minor, RewardCase::ExpiredPostAssignment})
    for (auto s : {Severity::Critical, Severity::Severe, Severity::Minor})
      for (int h = 1; h <= 3; ++h)
        for (double pt : kGrid)
          for (double pq : kGrid) {
            const bool valid = c == RewardCase::ExpiredPostAssignment ? s != Severity::Minor : arrival_case(s) == c;
            if (!valid) {
              CHECK_THROWS_AS(patient_reward(c, s, h, pt, pq), Error);
              continue;
            }
            CHECK(patient_reward(c, s, h, pt, pq) == table(c, s, h, pt, pq));
            ++checked;
          }
  for (auto s : {Severity::Critical, Severity::Severe})
    CHECK(patient_reward(RewardCase::NewlyDeceased, s, std::nullopt, 0, 0) == table(RewardCase::NewlyDeceased, s, 0, 0, 0));
  CHECK(checked == 5 * 3 * 16);
}

TEST_CASE("reward is monotone in PT and PQ") {
  mci::Rng rng(4);
  for (int i = 0; i < 20000; ++i) {
    const auto s = static_cast<Severity>(rng.uniform_int(1, 3));
    const int h = static_cast<int>(rng.uniform_int(1, 3));
    const double pt = rng.uniform01(), pq = rng.uniform01();
    const double dpt = (1.0 - pt) * rng.uniform01(), dpq = (1.0 - pq) * rng.uniform01();
    const auto c = arrival_case(s);
    const double base = patient_reward(c, s, h, pt, pq);
    CHECK(patient_reward(c, s, h, pt + dpt, pq) >= base);
    CHECK(patient_reward(c, s, h, pt, pq + dpq) >= base);
    // Lipschitz in (PT, PQ) with the largest table weight.
    CHECK(std::abs(patient_reward(c, s, h, pt + dpt, pq + dpq) - base) <= 300.0 * (dpt + dpq) + 1e-9);
  }
}

TEST_CASE("best level for a critical patient is level 1") {
  for (double pt : kGrid)
    for (double pq : kGrid) {
      const double l1 = patient_reward(RewardCase::Critical, Severity::Critical, 1, pt, pq);
      CHECK(l1 >= patient_reward(RewardCase::Critical, Severity::Critical, 2, pt, pq));
      CHECK(l1 >= patient_reward(RewardCase::Critical, Severity::Critical, 3, pt, pq));
      // Minor patients prefer lower-level hospitals.
      CHECK(patient_reward(RewardCase::Minor, Severity::Minor, 3, pt, pq) >=
            patient_reward(RewardCase::Minor, Severity::Minor, 1, pt, pq));
    }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(patient_reward(RewardCase::Critical, Severity::Critical, 4, 1, 1), Error);
  CHECK_THROWS_AS(patient_reward(RewardCase::Critical, Severity::Critical, std::nullopt, 1, 1), Error);
  CHECK_THROWS_AS(patient_reward(RewardCase::Critical, Severity::Critical, 1, 1.5, 1), Error);
  CHECK_THROWS_AS(patient_reward(RewardCase::NewlyDeceased, Severity::Minor, std::nullopt, 0, 0), Error);
  CHECK_THROWS_AS(patient_reward(RewardCase::NewlyDeceased, Severity::Critical, 1, 0, 0), Error);
  CHECK_THROWS_AS(arrival_case(Severity::Deceased), Error);
  CHECK(reward_case_from_string("ExpiredPostAssignment") == RewardCase::ExpiredPostAssignment);
  CHECK_FALSE(reward_case_from_string("Other").has_value());
}

TEST_CASE("transition rewards") {
  using namespace mci::test;
  auto sc = make_scenario({patient(1, Severity::Critical, rv({1, 1}), 60, 0), patient(2, Severity::Severe, rv({0, 1}), 10, 0),
                           patient(3, Severity::Minor, rv({0, 1, 1}), kUnbounded, 0)},
                          {hospital(1, 2, rv({0, 3, 1}))}, {15});
  SimState s = init_session(sc);
  REQUIRE(assign_patient(s, 1, 1).ok());
  REQUIRE(assign_patient(s, 3, 1).ok());
  RewardBreakdown total;
  while (!s.terminal) {
    const SimState pre = s;
    const auto events = step(s, 1);
    const auto b = transition_reward(pre, s, events);
    total.total += b.total;
    total.per_patient.insert(total.per_patient.end(), b.per_patient.begin(), b.per_patient.end());
  }
  REQUIRE(total.per_patient.size() == 3);
  for (const auto& r : total.per_patient) {
    if (r.patient_id == 1) {
      CHECK(r.reward_case == RewardCase::Critical);
      CHECK(r.pq == 0.5);
      CHECK(r.pt == doctest::Approx(0.75));
      CHECK(r.reward == doctest::Approx(150.0 + 112.5));
    } else if (r.patient_id == 2) {
      CHECK(r.reward_case == RewardCase::NewlyDeceased);
      CHECK(r.reward == -400.0);
    } else {
      CHECK(r.reward_case == RewardCase::Minor);
      CHECK(r.reward == doctest::Approx(100.0 + 50.0));
    }
  }
  CHECK(breakdown_to_json(total).at("per_patient").size() == 3);
}
