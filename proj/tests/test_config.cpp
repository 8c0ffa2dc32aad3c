#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rave/config.hpp"

using namespace rave;
using nlohmann::json;

namespace {

json minimal_config() {
  return json::parse(R"({
    "problem": "semilinear",
    "mesh_nodes": 17,
    "alpha": 0.01,
    "risk": {"kind": "avar", "beta": 0.9},
    "study": {"schedule": [8, 16], "reps": 2, "seed": 11}
  })");
}

}  // namespace

TEST_CASE("config round-trips through its canonical form") {
  const auto c = ExperimentConfig::from_json(minimal_config());
  const auto again = ExperimentConfig::from_json(c.to_json());
  CHECK(c.to_json() == again.to_json());
  CHECK(c.canonical_dump() == again.canonical_dump());
  CHECK(c.config_hash() == again.config_hash());
  CHECK(c.risk.kind == RiskKind::AVaR);
  CHECK(c.risk.beta == 0.9);
  CHECK(c.study.schedule == std::vector<std::int64_t>{8, 16});
}

TEST_CASE("unknown keys are rejected at every level") {
  auto j = minimal_config();
  j["surprise"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), Error);

  j = minimal_config();
  j["risk"]["surprise"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), Error);

  j = minimal_config();
  j["study"]["surprise"] = true;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), Error);
}

TEST_CASE("invalid values fail with the module-level diagnostics") {
  auto j = minimal_config();
  j["risk"]["beta"] = 1.0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), Error);

  j = minimal_config();
  j["model"] = {{"kappa_min", -1.0}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), Error);

  j = minimal_config();
  j["study"]["schedule"] = {16, 8};
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), Error);

  j = minimal_config();
  j["problem"] = "obstacle";
  j["obstacle_data"] = {{"psi_const", 0.3}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), Error);

  CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent.json"), Error);
}

TEST_CASE("eps_rule accepts names and fixed numbers") {
  auto j = minimal_config();
  j["study"]["eps_rule"] = "inv_sqrt";
  CHECK(ExperimentConfig::from_json(j).study.eps_rule == EpsRule::InvSqrt);

  j["study"]["eps_rule"] = 0.25;
  const auto c = ExperimentConfig::from_json(j);
  CHECK(c.study.eps_rule == EpsRule::Fixed);
  CHECK(c.study.eps_fixed == 0.25);

  j["study"]["eps_rule"] = "sometimes";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), Error);
}

TEST_CASE("config hash is sensitive to every field") {
  const auto base = ExperimentConfig::from_json(minimal_config());
  auto j = minimal_config();
  j["alpha"] = 0.02;
  const auto other = ExperimentConfig::from_json(j);
  CHECK(base.config_hash() != other.config_hash());

  // frozen FNV-1a reference values
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 12638187200555641996ull);
}

TEST_CASE("build_problem materializes obstacle data from scalars") {
  auto j = minimal_config();
  j["problem"] = "obstacle";
  j["obstacle_data"] = {{"psi_const", -0.04}, {"u_d_amplitude", 0.1}};
  const auto c = ExperimentConfig::from_json(j);
  const auto spec = c.build_problem();
  CHECK(spec.kind == ProblemKind::ObstacleTracking);
  CHECK(spec.psi == std::vector<double>(17, -0.04));
  CHECK(spec.u_d[8] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(spec.u_d.front() == doctest::Approx(0.0).scale(1).epsilon(1e-15));
}
