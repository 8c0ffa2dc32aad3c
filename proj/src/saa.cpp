#include "rave/saa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "rave/rng.hpp"

namespace rave {

namespace {

SymTridiag mass_of(const Mesh& mesh) {
  SymTridiag m;
  m.diag.assign(mesh.n_nodes, 0.0);
  m.off.assign(mesh.n_nodes - 1, 0.0);
  for (int e = 0; e < mesh.n_nodes - 1; ++e) {
    m.diag[e] += mesh.h / 3.0;
    m.diag[e + 1] += mesh.h / 3.0;
    m.off[e] += mesh.h / 6.0;
  }
  return m;
}

double mass_dist(const SymTridiag& mass, const std::vector<double>& a,
                 const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return std::sqrt(std::max(0.0, mass.quadform(d)));
}

// The risk actually differentiated by the optimizer. Exact AVaR swaps in
// its smoothed Rockafellar-Uryasev surrogate; everything else is already
// subdifferentiable as stated.
RiskSpec surrogate_risk(const RiskSpec& risk, const std::vector<double>& v0,
                        double eps_inner_rel) {
  if (risk.kind != RiskKind::AVaR || risk.beta == 0.0) {
    if (risk.kind == RiskKind::AVaR) return RiskSpec::expectation();
    return risk;
  }
  const auto [mn, mx] = std::minmax_element(v0.begin(), v0.end());
  const double range = *mx - *mn;
  const double eps =
      std::max(eps_inner_rel * range, 1e-9 * (1.0 + std::abs(*mx)));
  return RiskSpec::smoothed_avar(risk.beta, eps);
}

struct StartOutcome {
  StartRecord record;
  ControlVector z;
};

StartOutcome run_start(const ProblemSpec& spec, const SampleSet& sample,
                       const OptimizerOptions& opts, ControlVector z) {
  const SymTridiag mass = mass_of(spec.mesh);
  const std::size_t n = z.z.size();

  const auto v0 = scenario_values(spec, z, sample, opts.threads);
  const RiskSpec eff = surrogate_risk(spec.risk, v0, opts.eps_inner_rel);
  ObjectiveEval eval =
      evaluate_objective_with_grad(spec, eff, z, sample, opts.threads);

  double step = 1.0;
  bool descent_failed = false;
  bool converged = false;
  int iter = 0;
  double station = 0.0;

  std::vector<double> prev_z, prev_g;
  for (iter = 0; iter < opts.max_iters; ++iter) {
    // unit-step projected gradient residual in the mass norm
    std::vector<double> probe(n);
    for (std::size_t i = 0; i < n; ++i)
      probe[i] = std::clamp(z.z[i] - eval.grad[i], z.lo[i], z.hi[i]);
    station = mass_dist(mass, z.z, probe);
    if (station <= opts.grad_tol) {
      converged = true;
      break;
    }

    // Barzilai-Borwein trial step, Armijo backtracking along the arc
    if (!prev_z.empty()) {
      double sy = 0.0, ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dz = z.z[i] - prev_z[i];
        const double dg = eval.grad[i] - prev_g[i];
        sy += dz * dg;
        ss += dz * dz;
      }
      step = (sy > 1e-300) ? std::clamp(ss / sy, 1e-10, 1e10) : step * 2.0;
    }

    ControlVector trial = z;
    const double f_cur = eval.value;
    bool accepted = false;
    double s = step;
    while (s >= 1e-18) {
      for (std::size_t i = 0; i < n; ++i)
        trial.z[i] = std::clamp(z.z[i] - s * eval.grad[i], z.lo[i], z.hi[i]);
      double dir = 0.0;  // <grad, trial - z>
      for (std::size_t i = 0; i < n; ++i)
        dir += eval.grad[i] * (trial.z[i] - z.z[i]);
      if (dir >= 0.0) break;  // projection removed all descent
      const auto vals = scenario_values(spec, trial, sample, opts.threads);
      const double f_trial =
          eval_risk(eff, make_empirical(vals)) + control_penalty(spec, trial.z);
      if (f_trial <= f_cur + opts.armijo_c1 * dir) {
        accepted = true;
        break;
      }
      s *= opts.backtrack;
    }
    if (!accepted) {
      descent_failed = true;
      break;
    }

    prev_z = z.z;
    prev_g = eval.grad;
    z = trial;
    step = s;
    eval = evaluate_objective_with_grad(spec, eff, z, sample, opts.threads);
  }

  StartOutcome out;
  out.z = z;
  out.record.z = z.z;
  out.record.value = evaluate_objective(spec, z, sample, opts.threads);
  out.record.stationarity = station;
  out.record.iters = iter;
  out.record.converged = converged;
  out.record.descent_failed = descent_failed;
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

void OptimizerOptions::validate() const {
  if (!(grad_tol > 0.0) || !(r_n > 0.0) || !(armijo_c1 > 0.0) ||
      !(backtrack > 0.0 && backtrack < 1.0)) {
    fail(ErrorCode::InvalidSpec, "optimizer tolerances must be positive");
  }
  if (multistart < 1 || max_iters < 1) {
    fail(ErrorCode::InvalidSpec, "multistart and max_iters must be >= 1");
  }
}

std::vector<std::vector<double>> SolveResult::solution_set(double r) const {
  std::vector<std::vector<double>> set;
  for (const auto& s : starts) {
    if (s.value <= value + r) set.push_back(s.z);
  }
  return set;
}

SolveResult minimize_saa(const ProblemSpec& spec, const SampleSet& sample,
                         const OptimizerOptions& opts) {
  spec.validate();
  opts.validate();
  if (sample.size() == 0) fail(ErrorCode::EmptySample, "empty sample set");

  SolveResult best;
  best.value = std::numeric_limits<double>::infinity();

  for (int start = 0; start < opts.multistart; ++start) {
    ControlVector z0 = spec.initial_control();
    if (start > 0) {
      for (std::size_t i = 0; i < z0.z.size(); ++i) {
        z0.z[i] = rng::uniform(opts.start_seed, static_cast<std::uint64_t>(start),
                               i, z0.lo[i], z0.hi[i]);
      }
    }
    StartOutcome outcome = run_start(spec, sample, opts, std::move(z0));
    best.starts.push_back(outcome.record);
    if (outcome.record.value < best.value) {
      best.value = outcome.record.value;
      best.z_star = outcome.z;
      best.stationarity = outcome.record.stationarity;
      best.iters = outcome.record.iters;
      best.converged = outcome.record.converged;
      best.descent_failed = outcome.record.descent_failed;
    }
  }
  return best;
}

ReferenceSolution reference_solve(const ProblemSpec& spec, std::uint64_t seed,
                                  std::int64_t n_ref,
                                  const OptimizerOptions& opts) {
  OptimizerOptions ref_opts = opts;
  ref_opts.multistart = std::max(5, opts.multistart);
  const SampleSet sample = draw(spec.model, seed, n_ref);

  ReferenceSolution ref;
  ref.result = minimize_saa(spec, sample, ref_opts);
  ref.r_ref = opts.r_n;
  ref.set = ref.result.solution_set(ref.r_ref);
  ref.seed = seed;
  ref.n_ref = n_ref;
  return ref;
}

double deviation(const std::vector<std::vector<double>>& points,
                 const std::vector<std::vector<double>>& ref,
                 const Mesh& mesh) {
  if (points.empty() || ref.empty()) {
    fail(ErrorCode::EmptySet, "deviation needs nonempty sets");
  }
  const SymTridiag mass = mass_of(mesh);
  double dev = 0.0;
  for (const auto& x : points) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& y : ref) nearest = std::min(nearest, mass_dist(mass, x, y));
    dev = std::max(dev, nearest);
  }
  return dev;
}

void StudyOptions::validate() const {
  optimizer.validate();
  if (schedule.empty() || reps < 1) {
    fail(ErrorCode::InvalidSpec, "study needs a schedule and reps >= 1");
  }
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
    if (!(schedule[i] < schedule[i + 1])) {
      fail(ErrorCode::InvalidSpec, "schedule must be strictly increasing");
    }
  }
  if (schedule.front() < 1) fail(ErrorCode::InvalidSpec, "sample sizes must be >= 1");
  if (eps_rule == EpsRule::Fixed && !(eps_fixed > 0.0)) {
    fail(ErrorCode::InvalidSpec, "fixed eps rule needs eps_fixed > 0");
  }
}

ConvergenceTable run_consistency_study(const ProblemSpec& spec,
                                       const StudyOptions& opts,
                                       const RowCallback& on_row) {
  spec.validate();
  opts.validate();

  const bool variant =
      (spec.risk.kind == RiskKind::SmoothedAVaR ||
       spec.risk.kind == RiskKind::EpiAVaR) &&
      opts.eps_rule != EpsRule::None;

  ProblemSpec anchor_spec = spec;
  if (variant) anchor_spec.risk = RiskSpec::avar(spec.risk.beta);

  const std::int64_t n_ref =
      opts.n_ref > 0 ? opts.n_ref : opts.schedule.back();
  if (n_ref < opts.schedule.back()) {
    fail(ErrorCode::InvalidSpec, "n_ref must cover the schedule");
  }

  OptimizerOptions ref_opts = opts.optimizer;
  ref_opts.multistart = std::max(opts.ref_multistart, opts.optimizer.multistart);
  const std::uint64_t ref_seed = rng::derive_seed(opts.seed, 0x5eedu, 0x0fu);

  ConvergenceTable table;
  table.cell_risk = spec.risk;
  table.anchor_risk = anchor_spec.risk;
  table.n_ref = n_ref;
  table.ref_seed = ref_seed;

  const ReferenceSolution ref =
      reference_solve(anchor_spec, ref_seed, n_ref, ref_opts);
  table.ref_value = ref.result.value;
  table.r_ref = ref.r_ref;
  table.ref_set = ref.set;

  for (std::int64_t n : opts.schedule) {
    for (int rep = 0; rep < opts.reps; ++rep) {
      const std::uint64_t cell_seed =
          opts.common_random_numbers
              ? rng::derive_seed(opts.seed, 1000 + static_cast<std::uint64_t>(rep))
              : rng::derive_seed(opts.seed, static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(rep));
      const SampleSet sample = draw(spec.model, cell_seed, n);

      const auto t0 = std::chrono::steady_clock::now();
      StudyRow row;
      row.n = n;
      row.rep = rep;
      row.seed = cell_seed;

      if (variant) {
        ProblemSpec cell_spec = spec;
        switch (opts.eps_rule) {
          case EpsRule::InvSqrt:
            cell_spec.risk.eps = 1.0 / std::sqrt(static_cast<double>(n));
            break;
          case EpsRule::Fixed:
            cell_spec.risk.eps = opts.eps_fixed;
            break;
          case EpsRule::None:
            break;
        }
        row.eps = cell_spec.risk.eps;

        const SolveResult res_v = minimize_saa(cell_spec, sample, opts.optimizer);
        const SolveResult res_e = minimize_saa(anchor_spec, sample, opts.optimizer);

        // Pool candidates from both solves; evaluating both objectives on
        // one candidate set keeps the optimal-value sandwich exact.
        std::vector<const std::vector<double>*> pool;
        for (const auto& s : res_v.starts) pool.push_back(&s.z);
        for (const auto& s : res_e.starts) pool.push_back(&s.z);
        double best_v = std::numeric_limits<double>::infinity();
        double best_e = best_v;
        for (const auto* zp : pool) {
          const ControlVector cand{*zp, spec.lo, spec.hi};
          best_v = std::min(best_v, evaluate_objective(cell_spec, cand, sample,
                                                       opts.optimizer.threads));
          best_e = std::min(best_e, evaluate_objective(anchor_spec, cand, sample,
                                                       opts.optimizer.threads));
        }
        row.value = best_v;
        row.exact_value = best_e;
        row.dist_to_ref = deviation(
            res_v.solution_set(opts.optimizer.r_n), table.ref_set, spec.mesh);
      } else {
        const SolveResult res = minimize_saa(spec, sample, opts.optimizer);
        row.value = res.value;
        row.exact_value = res.value;
        row.dist_to_ref = deviation(res.solution_set(opts.optimizer.r_n),
                                    table.ref_set, spec.mesh);
      }
      row.gap = std::abs(row.value - table.ref_value);
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - t0)
              .count();

      table.rows.push_back(row);
      if (on_row) on_row(row);
    }
  }
  return table;
}

std::vector<std::int64_t> ConvergenceTable::schedule() const {
  std::vector<std::int64_t> ns;
  for (const auto& r : rows) {
    if (ns.empty() || ns.back() != r.n) ns.push_back(r.n);
  }
  return ns;
}

double ConvergenceTable::median_gap(std::int64_t n) const {
  std::vector<double> g;
  for (const auto& r : rows)
    if (r.n == n) g.push_back(r.gap);
  return median_of(std::move(g));
}

double ConvergenceTable::median_dist(std::int64_t n) const {
  std::vector<double> g;
  for (const auto& r : rows)
    if (r.n == n) g.push_back(r.dist_to_ref);
  return median_of(std::move(g));
}

double ConvergenceTable::iqr_gap(std::int64_t n) const {
  std::vector<double> g;
  for (const auto& r : rows)
    if (r.n == n) g.push_back(r.gap);
  if (g.size() < 2) return 0.0;
  std::sort(g.begin(), g.end());
  const auto q = [&](double p) {
    const double idx = p * (g.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, g.size() - 1);
    return g[lo] + (idx - lo) * (g[hi] - g[lo]);
  };
  return q(0.75) - q(0.25);
}

StudyVerdict judge_study(const ConvergenceTable& table,
                         const StudyAcceptance& acc) {
  StudyVerdict v;
  const auto ns = table.schedule();
  if (ns.empty()) return v;

  v.first_gap_median = table.median_gap(ns.front());
  v.last_gap_median = table.median_gap(ns.back());
  v.gap_factor = v.last_gap_median > 0.0
                     ? v.first_gap_median / v.last_gap_median
                     : std::numeric_limits<double>::infinity();
  v.gap_factor_ok = v.gap_factor >= acc.gap_factor_min;

  double prev_dist = std::numeric_limits<double>::infinity();
  double prev_gap = std::numeric_limits<double>::infinity();
  for (std::int64_t n : ns) {
    const double d = table.median_dist(n);
    if (d > prev_dist + 1e-15) ++v.dist_inversions;
    prev_dist = d;
    const double g = table.median_gap(n);
    if (g > prev_gap + 1e-15) ++v.gap_inversions;
    prev_gap = g;
  }
  v.dist_monotone_ok = v.dist_inversions <= acc.max_inversions;

  const bool variant = table.cell_risk.kind == RiskKind::SmoothedAVaR ||
                       table.cell_risk.kind == RiskKind::EpiAVaR;
  if (variant) {
    const double beta = table.cell_risk.beta;
    for (const auto& r : table.rows) {
      double lo_violation = 0.0, hi_violation = 0.0;
      if (table.cell_risk.kind == RiskKind::SmoothedAVaR) {
        const double width = std::log(2.0) * r.eps / (1.0 - beta);
        lo_violation = r.exact_value - r.value;          // value >= exact
        hi_violation = r.value - r.exact_value - width;  // value <= exact + w
      } else {
        const double width = r.eps * beta / (2.0 * (1.0 - beta));
        lo_violation = r.value - r.exact_value;          // value <= exact
        hi_violation = r.exact_value - r.value - width;  // exact <= value + w
      }
      const double excess = std::max(lo_violation, hi_violation);
      if (excess > 1e-9) {
        v.sandwich_ok = false;
        v.sandwich_violation = std::max(v.sandwich_violation, excess);
      }
    }

    // variant column must meet the exact anchor within sandwich width plus
    // the exact column's own statistical gap
    std::vector<double> var_gap, exact_gap;
    double width_last = 0.0;
    for (const auto& r : table.rows) {
      if (r.n != ns.back()) continue;
      var_gap.push_back(std::abs(r.value - table.ref_value));
      exact_gap.push_back(std::abs(r.exact_value - table.ref_value));
      width_last = table.cell_risk.kind == RiskKind::SmoothedAVaR
                       ? std::log(2.0) * r.eps / (1.0 - beta)
                       : r.eps * beta / (2.0 * (1.0 - beta));
    }
    v.variant_combined_tol = width_last + median_of(exact_gap) + 1e-9;
    v.variant_anchor_ok = median_of(var_gap) <= v.variant_combined_tol;
  }

  v.pass = v.gap_factor_ok && v.dist_monotone_ok && v.sandwich_ok &&
           v.variant_anchor_ok;
  return v;
}

void write_study_csv(std::ostream& out, const ConvergenceTable& table,
                     bool with_timing) {
  out << "n,rep,seed,value,gap,dist_to_ref,runtime_ms\n";
  char buf[128];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%lld,%d,%llu,%.17g,%.17g,%.17g,%.3f\n",
                  static_cast<long long>(r.n), r.rep,
                  static_cast<unsigned long long>(r.seed), r.value, r.gap,
                  r.dist_to_ref, with_timing ? r.runtime_ms : 0.0);
    out << buf;
  }
}

}  // namespace rave
