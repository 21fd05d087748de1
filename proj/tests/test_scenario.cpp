#include "doctest.h"

#include "mci/error.hpp"
#include "mci/evaluate.hpp"
#include "mci/generator.hpp"
#include "mci/presets.hpp"
#include "mci/scenario_io.hpp"
#include "mci/sigmoid.hpp"

#include <cmath>

using namespace mci;

TEST_CASE("reveal_fraction") {
  CHECK(reveal_fraction(30.0, {30.0, 0.2, 0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(reveal_fraction(0.0, {500.0, 5.0, 0.25, 1.0}) == doctest::Approx(0.25).epsilon(1e-12));
  // 1 / (1 + e^-2), evaluated separately.
  CHECK(reveal_fraction(40.0, {30.0, 0.2, 0.0, 1.0}) == doctest::Approx(0.8807970779778823).epsilon(1e-14));
  CHECK(reveal_fraction(1e6, {30.0, 0.2, 0.1, 0.7}) == doctest::Approx(0.7));
}

TEST_CASE("reveal_fraction is bounded and nondecreasing") {
  Rng rng(2024);
  for (int i = 0; i < 1000000; ++i) {
    SigmoidParams p;
    p.midpoint = rng.uniform01() * 400.0 - 50.0;
    p.steepness = std::exp(rng.uniform01() * 8.0 - 6.0);
    p.floor = rng.uniform01() * 0.9;
    p.ceiling = p.floor + (1.0 - p.floor) * (0.01 + 0.99 * rng.uniform01());
    const double t1 = rng.uniform01() * 500.0;
    const double t2 = t1 + rng.uniform01() * 50.0;
    const double f1 = reveal_fraction(t1, p);
    const double f2 = reveal_fraction(t2, p);
    if (!(f1 >= p.floor && f1 <= p.ceiling && f2 >= f1)) {
      FAIL("violation at t1=" << t1 << " t2=" << t2);
    }
  }
}

TEST_CASE("reveal schedule inverts the patient curve") {
  const int horizon = 360;
  const SigmoidParams p = default_reveal_params(horizon).patients;
  const int n = 40;
  const auto times = reveal_schedule(n, p, horizon);
  REQUIRE(times.size() == static_cast<std::size_t>(n));
  const int last = static_cast<int>(std::floor(0.9 * horizon));
  for (int k = 1; k <= n; ++k) {
    const int t = times[static_cast<std::size_t>(k - 1)];
    CHECK(t <= last);
    if (t < last) CHECK(reveal_fraction(t, p) * n >= k);
    if (t > 0) CHECK(reveal_fraction(t - 1, p) * n < k);
    if (k > 1) CHECK(times[static_cast<std::size_t>(k - 2)] <= t);
  }
}

TEST_CASE("generate_scenario") {
  GeneratorConfig c;
  c.seed = 17;
  const std::string a = serialize_scenario(generate_scenario(c));
  CHECK(a == serialize_scenario(generate_scenario(c)));

  c.patient_count = 20;
  CHECK(generate_scenario(c).patients.size() == 20);
  c.patient_count = 60;
  const Scenario s = generate_scenario(c);
  CHECK(s.patients.size() == 60);
  CHECK(validate_scenario(s).empty());
  for (Eigen::Index i = 1; i < s.travel.rows(); ++i) CHECK(s.travel.row(i) == s.travel.row(0));
  CHECK(s.travel.minCoeff() >= c.travel_time_range.lo);
  CHECK(s.travel.maxCoeff() <= c.travel_time_range.hi);
  for (const auto& p : s.patients) {
    if (p.severity == Severity::Critical) {
      CHECK(p.survival_window == c.critical_window);
      CHECK(p.requirements[index_of(ResourceKind::Emergency)] == 1);
    }
    if (p.severity == Severity::Minor) CHECK(std::isinf(p.survival_window));
  }
}

TEST_CASE("generated scenarios always validate") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GeneratorConfig c;
    c.seed = seed;
    c.patient_count = 10 + static_cast<int>(seed % 50);
    c.hospital_count = 1 + static_cast<int>(seed % 8);
    CHECK(validate_scenario(generate_scenario(c)).empty());
  }
}

TEST_CASE("generator config errors name the field") {
  GeneratorConfig c;
  c.patient_count = 5;
  try {
    generate_scenario(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("patient_count") != std::string::npos);
  }
  c = GeneratorConfig{};
  c.severity_mix = {0.5, 0.5, 0.5};
  CHECK_THROWS_WITH_AS(generate_scenario(c), doctest::Contains("severity_mix"), Error);
  c = GeneratorConfig{};
  c.travel_time_range = {10, 5};
  CHECK_THROWS_WITH_AS(generate_scenario(c), doctest::Contains("travel_time_range"), Error);
}

TEST_CASE("presets") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto s = std::make_shared<const Scenario>(standard_scenario(seed));
    CHECK(s->patients.size() == 20);
    Rng rng(0);
    const auto r = run_episode(Policy::greedy(), s, rng, ActMode::Argmax);
    for (const auto& p : r.final_state.patients) CHECK(p.status != PatientStatus::Deceased);
  }
  CHECK(complex_scenario(3).patients.size() == 60);
  CHECK(preset_scenario("small", 1)->patients.size() == 10);
  CHECK(preset_scenario("small", 1)->hospitals.size() == 3);
  CHECK_FALSE(preset_config("huge", 1).has_value());
}

TEST_CASE("distinct seeds give distinct scenarios") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorConfig a = standard_config(seed);
    GeneratorConfig b = standard_config(seed + 1000);
    const Scenario sa = generate_scenario(a);
    const Scenario sb = generate_scenario(b);
    bool differ = false;
    for (std::size_t i = 0; i < sa.patients.size(); ++i) {
      const auto& x = sa.patients[i];
      const auto& y = sb.patients[i];
      if (x.severity != y.severity || x.requirements != y.requirements || x.reveal_time != y.reveal_time) differ = true;
    }
    CHECK(differ);
  }
}
