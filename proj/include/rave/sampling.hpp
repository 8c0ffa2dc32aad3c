#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rave/errors.hpp"
#include "rave/rng.hpp"

namespace rave {

// Random-input model for one benchmark. A scenario carries `field_modes`
// sine-mode coefficients for the diffusion field a(xi), one draw for the
// Helmholtz coefficient r(xi) and one for the source magnitude b(xi):
//   xi = (mode_1..mode_m, r, b),  dim_xi = field_modes + 2.
// Mode k has amplitude (kappa_max-kappa_min)/2^(k+1), so the realized field
// stays inside [kappa_min, kappa_max] even before clamping.
struct ScenarioModel {
  int field_modes = 3;
  double kappa_min = 0.5;
  double kappa_max = 2.0;
  double r_min = 0.5;
  double r_max = 2.0;
  double b_min = 0.0;
  double b_max = 0.5;

  int dim_xi() const noexcept { return field_modes + 2; }
  double kappa_mid() const noexcept { return 0.5 * (kappa_min + kappa_max); }

  // [lo, hi] of xi component j.
  std::pair<double, double> range(int j) const;

  void validate() const;
};

struct Scenario {
  std::int64_t id = 0;
  std::vector<double> xi;
};

// i.i.d. scenario block. Scenario i is a pure function of (seed, i), so the
// first N entries of a longer set equal the shorter set (common random
// numbers across sample sizes come for free).
struct SampleSet {
  std::uint64_t seed = 0;
  std::vector<Scenario> scenarios;

  std::size_t size() const noexcept { return scenarios.size(); }
};

SampleSet draw(const ScenarioModel& model, std::uint64_t seed, std::int64_t n);

// Nodal values of the diffusion field a(xi) on the given mesh nodes,
// clamped into [kappa_min, kappa_max].
std::vector<double> realize_field(const ScenarioModel& model,
                                  const Scenario& s,
                                  const std::vector<double>& mesh_nodes);

double scenario_r(const ScenarioModel& model, const Scenario& s);
double scenario_b(const ScenarioModel& model, const Scenario& s);

// Audit export, one row per scenario: id, xi_0, ..., xi_{d-1}.
void write_sample_csv(std::ostream& out, const SampleSet& set);
std::string sample_csv(const SampleSet& set);

}  // namespace rave
