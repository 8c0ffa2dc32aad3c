#pragma once

#include <vector>

#include "rave/fem.hpp"
#include "rave/obstacle.hpp"
#include "rave/risk.hpp"
#include "rave/sampling.hpp"

namespace rave {

// Box-constrained control on the mesh nodes.
struct ControlVector {
  std::vector<double> z;
  std::vector<double> lo;
  std::vector<double> hi;

  void validate() const;
};

// Componentwise clamp onto [lo, hi]; idempotent and non-expansive in the
// mass-weighted norm.
ControlVector project_feasible(const std::vector<double>& z,
                               const std::vector<double>& lo,
                               const std::vector<double>& hi);

enum class ProblemKind { SemilinearTracking, ObstacleTracking };

// One desk-scale benchmark:
//   SemilinearTracking: f(y,xi) = 1/2 || (1 - u)_+ ||_{L2}^2 with u the
//     semilinear state driven by B1(xi) iota* z + b(xi).
//   ObstacleTracking:   f(y,xi) = 1/2 || u - u_d ||_{L2}^2 with u the
//     obstacle-problem state forced by iota* z.
// The full objective is risk over scenarios plus (alpha/2) ||z||_{L2}^2.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::SemilinearTracking;
  Mesh mesh = Mesh::uniform(33);
  ScenarioModel model;
  double alpha = 1e-2;
  RiskSpec risk = RiskSpec::expectation();
  std::vector<double> lo;  // box bounds; default -1 / +1 on every node
  std::vector<double> hi;
  std::vector<double> u_d;  // ObstacleTracking target (full mesh)
  std::vector<double> psi;  // ObstacleTracking obstacle (full mesh)
  bool cubic_term = true;   // SemilinearTracking: disable for a linear state
  double state_tol = 1e-12;

  void finalize();  // fills defaulted nodal fields to the mesh size
  void validate() const;

  ControlVector initial_control() const;
};

struct ScenarioEval {
  double value = 0.0;
  std::vector<double> grad;  // generalized gradient of z -> f(B z, xi)
};

ScenarioEval eval_scenario(const ProblemSpec& spec, const ControlVector& z,
                           const Scenario& s);

// Per-scenario values in id order; entries computed independently and
// reduced in fixed index order regardless of thread count.
std::vector<double> scenario_values(const ProblemSpec& spec,
                                    const ControlVector& z,
                                    const SampleSet& sample, int threads = 1);

double evaluate_objective(const ProblemSpec& spec, const ControlVector& z,
                          const SampleSet& sample, int threads = 1);

struct ObjectiveEval {
  double value = 0.0;              // risk(values) + penalty
  std::vector<double> grad;        // subgradient of the full objective
  std::vector<double> values;      // per-scenario f values
};

// Value and subgradient of risk_override[f(. )] + (alpha/2)||z||^2. The
// override lets the optimizer swap in a smoothed surrogate while reporting
// the exact risk elsewhere.
ObjectiveEval evaluate_objective_with_grad(const ProblemSpec& spec,
                                           const RiskSpec& risk_override,
                                           const ControlVector& z,
                                           const SampleSet& sample,
                                           int threads = 1);

// (alpha/2) z^T M z and its gradient alpha M z.
double control_penalty(const ProblemSpec& spec, const std::vector<double>& z);

double mass_norm(const ProblemSpec& spec, const std::vector<double>& v);

}  // namespace rave
