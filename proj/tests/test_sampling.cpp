#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rave/sampling.hpp"

using namespace rave;

TEST_CASE("draw is deterministic with the prefix property") {
  ScenarioModel m;
  auto big = draw(m, 7, 5);
  auto small = draw(m, 7, 3);
  REQUIRE(big.size() == 5);
  REQUIRE(small.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(big.scenarios[i].xi == small.scenarios[i].xi);  // bitwise
  }

  auto again = draw(m, 7, 100);
  auto twice = draw(m, 7, 100);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(again.scenarios[i].xi == twice.scenarios[i].xi);
  }

  auto other_seed = draw(m, 8, 3);
  CHECK(other_seed.scenarios[0].xi != small.scenarios[0].xi);

  CHECK_THROWS_AS(draw(m, 7, 0), Error);
}

TEST_CASE("uniform marginals hit the declared ranges") {
  ScenarioModel m;
  const std::int64_t n = 10000;
  auto set = draw(m, 7, n);
  const auto [lo, hi] = m.range(0);
  double sum = 0.0;
  for (const auto& s : set.scenarios) {
    for (int j = 0; j < m.dim_xi(); ++j) {
      const auto [l, h] = m.range(j);
      CHECK(s.xi[j] >= l);
      CHECK(s.xi[j] < h);
    }
    sum += s.xi[0];
  }
  const double mid = 0.5 * (lo + hi);
  const double se = (hi - lo) / std::sqrt(12.0 * n);
  CHECK(std::abs(sum / n - mid) <= 4.0 * se);
}

TEST_CASE("realized fields respect the kappa bounds") {
  ScenarioModel m;
  std::vector<double> nodes;
  for (int i = 0; i <= 40; ++i) nodes.push_back(i / 40.0);

  Scenario zero{0, std::vector<double>(m.dim_xi(), 0.0)};
  zero.xi[m.field_modes] = 1.0;
  auto flat = realize_field(m, zero, nodes);
  for (double v : flat) CHECK(v == m.kappa_mid());

  auto set = draw(m, 99, 1000);
  for (const auto& s : set.scenarios) {
    auto a = realize_field(m, s, nodes);
    for (double v : a) {
      CHECK(v >= m.kappa_min);
      CHECK(v <= m.kappa_max);
    }
    CHECK(scenario_r(m, s) >= m.r_min);
    CHECK(scenario_r(m, s) <= m.r_max);
    CHECK(scenario_b(m, s) >= m.b_min);
    CHECK(scenario_b(m, s) <= m.b_max);
  }

  // equal xi means equal fields
  auto a0 = realize_field(m, set.scenarios[0], nodes);
  Scenario copy{1234, set.scenarios[0].xi};
  CHECK(realize_field(m, copy, nodes) == a0);
}

TEST_CASE("model validation rejects bad ranges") {
  ScenarioModel m;
  m.kappa_min = -1.0;
  CHECK_THROWS_AS(m.validate(), Error);
  m = ScenarioModel{};
  m.r_min = 3.0;
  m.r_max = 1.0;
  CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("csv export lists id and xi columns") {
  ScenarioModel m;
  m.field_modes = 1;
  auto set = draw(m, 5, 2);
  std::ostringstream ss;
  write_sample_csv(ss, set);
  const std::string text = ss.str();
  CHECK(text.rfind("id,xi_0,xi_1,xi_2\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(sample_csv(set) == text);
}
