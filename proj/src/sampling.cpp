#include "rave/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

namespace rave {

std::pair<double, double> ScenarioModel::range(int j) const {
  if (j < 0 || j >= dim_xi()) {
    fail(ErrorCode::BadRange, "xi component index out of range");
  }
  if (j < field_modes) {
    const double amp = (kappa_max - kappa_min) / std::pow(2.0, j + 2);
    return {-amp, amp};
  }
  if (j == field_modes) return {r_min, r_max};
  return {b_min, b_max};
}

void ScenarioModel::validate() const {
  if (field_modes < 0) fail(ErrorCode::BadRange, "field_modes must be >= 0");
  if (!(kappa_min > 0.0 && kappa_min <= kappa_max)) {
    fail(ErrorCode::BadRange, "need 0 < kappa_min <= kappa_max");
  }
  if (!(r_min > 0.0 && r_min <= r_max)) {
    fail(ErrorCode::BadRange, "need 0 < r_min <= r_max");
  }
  if (!(b_min <= b_max)) fail(ErrorCode::BadRange, "need b_min <= b_max");
}

SampleSet draw(const ScenarioModel& model, std::uint64_t seed,
               std::int64_t n) {
  model.validate();
  if (n < 1) fail(ErrorCode::BadRange, "sample size must be >= 1");

  const int d = model.dim_xi();
  SampleSet set;
  set.seed = seed;
  set.scenarios.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Scenario& s = set.scenarios[static_cast<std::size_t>(i)];
    s.id = i;
    s.xi.resize(d);
    for (int j = 0; j < d; ++j) {
      const auto [lo, hi] = model.range(j);
      s.xi[j] = rng::uniform(seed, static_cast<std::uint64_t>(i),
                             static_cast<std::uint64_t>(j), lo, hi);
    }
  }
  return set;
}

std::vector<double> realize_field(const ScenarioModel& model,
                                  const Scenario& s,
                                  const std::vector<double>& mesh_nodes) {
  std::vector<double> a(mesh_nodes.size(), model.kappa_mid());
  for (std::size_t p = 0; p < mesh_nodes.size(); ++p) {
    const double x = mesh_nodes[p];
    double v = model.kappa_mid();
    for (int k = 0; k < model.field_modes; ++k) {
      v += s.xi[k] * std::sin((k + 1) * std::numbers::pi * x);
    }
    a[p] = std::clamp(v, model.kappa_min, model.kappa_max);
  }
  return a;
}

double scenario_r(const ScenarioModel& model, const Scenario& s) {
  return s.xi[static_cast<std::size_t>(model.field_modes)];
}

double scenario_b(const ScenarioModel& model, const Scenario& s) {
  return s.xi[static_cast<std::size_t>(model.field_modes) + 1];
}

void write_sample_csv(std::ostream& out, const SampleSet& set) {
  const std::size_t d = set.scenarios.empty() ? 0 : set.scenarios[0].xi.size();
  out << "id";
  for (std::size_t j = 0; j < d; ++j) out << ",xi_" << j;
  out << "\n";
  char buf[32];
  for (const auto& s : set.scenarios) {
    out << s.id;
    for (double v : s.xi) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << "\n";
  }
}

std::string sample_csv(const SampleSet& set) {
  std::ostringstream ss;
  write_sample_csv(ss, set);
  return ss.str();
}

}  // namespace rave
