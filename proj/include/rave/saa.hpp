#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rave/problems.hpp"

namespace rave {

struct OptimizerOptions {
  int max_iters = 300;
  double grad_tol = 1e-6;      // projected-gradient stationarity, mass norm
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int multistart = 1;
  double r_n = 1e-5;           // r_N-minimizer radius (10 * grad_tol)
  double eps_inner_rel = 1e-3; // AVaR inner smoothing, relative to value range
  int threads = 1;
  std::uint64_t start_seed = 12345;

  void validate() const;
};

struct StartRecord {
  std::vector<double> z;
  double value = 0.0;       // objective under the problem's own risk spec
  double stationarity = 0.0;
  int iters = 0;
  bool converged = false;
  bool descent_failed = false;
};

struct SolveResult {
  ControlVector z_star;
  double value = 0.0;          // m-hat*_N candidate (exact risk formula)
  double stationarity = 0.0;
  int iters = 0;
  bool converged = false;
  bool descent_failed = false;
  std::vector<StartRecord> starts;

  // All recorded starts whose value lies within r of the best one: the
  // finite proxy for the r-minimizer set.
  std::vector<std::vector<double>> solution_set(double r) const;
};

// Projected gradient with Armijo backtracking (Barzilai-Borwein initial
// steps) over the admissible box. AVaR risk is minimized through its
// Rockafellar-Uryasev form with the scalar variable eliminated exactly and
// SmoothedAVaR(beta, eps_inner) gradients; reported values always use the
// exact kinked formula.
SolveResult minimize_saa(const ProblemSpec& spec, const SampleSet& sample,
                         const OptimizerOptions& opts);

struct ReferenceSolution {
  SolveResult result;
  std::vector<std::vector<double>> set;  // near-optimal points within r_ref
  double r_ref = 0.0;
  std::uint64_t seed = 0;
  std::int64_t n_ref = 0;
};

// Anchor for the consistency studies: minimize_saa at N_ref with elevated
// multistart; stores every distinct start within r_ref of the best value as
// the reference solution-set proxy.
ReferenceSolution reference_solve(const ProblemSpec& spec, std::uint64_t seed,
                                  std::int64_t n_ref,
                                  const OptimizerOptions& opts);

// One-sided set deviation sup_{x in points} inf_{y in ref} ||x - y|| in the
// mass-weighted norm of the mesh.
double deviation(const std::vector<std::vector<double>>& points,
                 const std::vector<std::vector<double>>& ref,
                 const Mesh& mesh);

enum class EpsRule { None, InvSqrt, Fixed };

struct StudyOptions {
  std::vector<std::int64_t> schedule;
  int reps = 1;
  std::uint64_t seed = 0;
  bool common_random_numbers = false;
  EpsRule eps_rule = EpsRule::None;
  double eps_fixed = 0.0;
  std::int64_t n_ref = 0;  // 0: use the largest schedule entry
  int ref_multistart = 5;
  OptimizerOptions optimizer;

  void validate() const;
};

struct StudyRow {
  std::int64_t n = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double value = 0.0;        // cell optimal value (variant value if variant)
  double gap = 0.0;          // |value - reference value|
  double dist_to_ref = 0.0;  // deviation of the cell r_N-minimizer set
  double runtime_ms = 0.0;
  double exact_value = 0.0;  // exact-AVaR companion value (== value if plain)
  double eps = 0.0;          // per-cell epsilon for variant studies
};

struct ConvergenceTable {
  std::vector<StudyRow> rows;
  RiskSpec cell_risk;          // risk solved per cell
  RiskSpec anchor_risk;        // risk of the reference problem
  std::int64_t n_ref = 0;
  std::uint64_t ref_seed = 0;
  double ref_value = 0.0;
  double r_ref = 0.0;
  std::vector<std::vector<double>> ref_set;

  std::vector<std::int64_t> schedule() const;
  double median_gap(std::int64_t n) const;
  double median_dist(std::int64_t n) const;
  double iqr_gap(std::int64_t n) const;
};

using RowCallback = std::function<void(const StudyRow&)>;

// Empirical consistency run: for each (N, replication) draw a fresh
// recorded seed, solve the SAA problem, and measure the value gap and
// solution-set deviation against the reference anchor. With a Smoothed/Epi
// AVaR risk and an eps rule, each cell also solves the exact-AVaR companion
// on the same sample; candidate minimizers are pooled so the per-cell
// sandwich holds by construction, and gaps are measured against the
// exact-AVaR reference.
ConvergenceTable run_consistency_study(const ProblemSpec& spec,
                                       const StudyOptions& opts,
                                       const RowCallback& on_row = nullptr);

struct StudyAcceptance {
  double gap_factor_min = 3.0;
  int max_inversions = 1;
};

struct StudyVerdict {
  double first_gap_median = 0.0;
  double last_gap_median = 0.0;
  double gap_factor = 0.0;
  bool gap_factor_ok = false;
  int dist_inversions = 0;
  bool dist_monotone_ok = false;
  int gap_inversions = 0;
  bool sandwich_ok = true;
  double sandwich_violation = 0.0;
  bool variant_anchor_ok = true;
  double variant_combined_tol = 0.0;
  bool pass = false;
};

StudyVerdict judge_study(const ConvergenceTable& table,
                         const StudyAcceptance& acc);

// CSV with header n,rep,seed,value,gap,dist_to_ref,runtime_ms. Timing can
// be suppressed (written as 0) for byte-identical reruns.
void write_study_csv(std::ostream& out, const ConvergenceTable& table,
                     bool with_timing = true);

}  // namespace rave
