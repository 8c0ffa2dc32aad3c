#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "rave/problems.hpp"
#include "rave/saa.hpp"

namespace rave {

// Batch experiment description, loaded from JSON. Parsing re-validates every
// module-level invariant and rejects unknown keys at every level, so a
// config that loads is a config that runs.
struct ExperimentConfig {
  ProblemKind problem = ProblemKind::SemilinearTracking;
  int mesh_nodes = 65;
  double alpha = 1e-2;
  double bound_lo = -1.0;
  double bound_hi = 1.0;
  ScenarioModel model;
  RiskSpec risk;
  double psi_const = -0.05;      // obstacle only
  double u_d_amplitude = 0.05;   // obstacle only
  StudyOptions study;
  StudyAcceptance acceptance;
  std::string csv_path = "study.csv";
  std::string summary_path = "study_summary.json";

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;

  // Canonical dump (sorted keys) and its FNV-1a hash; every report carries
  // the hash so results are reproducible from the report alone.
  std::string canonical_dump() const;
  std::string config_hash() const;

  ProblemSpec build_problem() const;
  void validate() const;
};

std::uint64_t fnv1a64(const std::string& text) noexcept;

}  // namespace rave
