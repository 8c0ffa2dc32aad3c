#include "rave/problems.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace rave {

namespace {

SymTridiag mass_matrix(const Mesh& mesh) {
  const int n = mesh.n_nodes;
  SymTridiag m;
  m.diag.assign(n, 0.0);
  m.off.assign(n - 1, 0.0);
  for (int e = 0; e < n - 1; ++e) {
    m.diag[e] += mesh.h / 3.0;
    m.diag[e + 1] += mesh.h / 3.0;
    m.off[e] += mesh.h / 6.0;
  }
  return m;
}

// Static block partition; per-index work must be independent. The first
// thrown exception is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

ScenarioEval eval_scenario_impl(const ProblemSpec& spec,
                                const ControlVector& z, const Scenario& s,
                                bool want_grad) {
  const Mesh& mesh = spec.mesh;
  const std::size_t n = static_cast<std::size_t>(mesh.n_nodes);
  const auto a_nodes = realize_field(spec.model, s, mesh.nodes);

  ScenarioEval out;
  if (spec.kind == ProblemKind::SemilinearTracking) {
    const AssembledOps ops = assemble(mesh, a_nodes, scenario_r(spec.model, s));
    const double b = scenario_b(spec.model, s);

    const auto y_dual = ops.apply_mass(z.z);
    auto w = apply_B(ops, y_dual);
    for (double& wi : w) wi += b;  // constant-in-space source term
    const auto rhs = ops.apply_mass(w);

    const auto state = solve_semilinear(ops, rhs, spec.state_tol, spec.cubic_term);

    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = std::max(0.0, 1.0 - state.u[i]);
    out.value = 0.5 * ops.mass.quadform(v);

    if (want_grad) {
      SymTridiag jac = ops.stiffness_a;
      if (spec.cubic_term) {
        for (std::size_t i = 0; i < n; ++i)
          jac.diag[i] += 3.0 * ops.lumped_mass[i] * state.u[i] * state.u[i];
      }
      auto mv = ops.apply_mass(v);
      for (std::size_t i = 0; i < n; ++i) {
        // zero branch of the plus-function indicator at the kink
        if (!(1.0 - state.u[i] > 0.0)) mv[i] = 0.0;
        mv[i] = -mv[i];
      }
      TridiagLDLT fac(jac);
      const auto p = fac.solve(mv);
      out.grad = ops.apply_mass(apply_B(ops, ops.apply_mass(p)));
    }
  } else {
    const SymTridiag mass = mass_matrix(mesh);
    const auto force_full = mass.apply(z.z);
    const ObstacleProblem p =
        make_obstacle_problem(mesh, a_nodes, spec.psi, force_full);
    const auto rep = solve_vi(p, 1e-10);
    const auto u_full = extend_interior(mesh, rep.u);

    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = u_full[i] - spec.u_d[i];
    out.value = 0.5 * mass.quadform(d);

    if (want_grad) {
      const auto md = mass.apply(d);
      std::vector<double> rhs_int(md.begin() + 1, md.end() - 1);
      const auto adj = solve_inactive_system(p, rep.active_set, rhs_int);
      out.grad = mass.apply(extend_interior(mesh, adj));
    }
  }
  return out;
}

}  // namespace

void ControlVector::validate() const {
  if (z.size() != lo.size() || z.size() != hi.size()) {
    fail(ErrorCode::BadBounds, "control and bounds sizes differ");
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(lo[i] <= z[i] && z[i] <= hi[i])) {
      fail(ErrorCode::BadBounds, "control leaves the admissible box");
    }
  }
}

ControlVector project_feasible(const std::vector<double>& z,
                               const std::vector<double>& lo,
                               const std::vector<double>& hi) {
  if (lo.size() != hi.size() || z.size() != lo.size()) {
    fail(ErrorCode::BadBounds, "bound sizes differ");
  }
  ControlVector out;
  out.lo = lo;
  out.hi = hi;
  out.z.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(lo[i] <= hi[i])) fail(ErrorCode::BadBounds, "lo > hi");
    out.z[i] = std::clamp(z[i], lo[i], hi[i]);
  }
  return out;
}

void ProblemSpec::finalize() {
  const std::size_t n = static_cast<std::size_t>(mesh.n_nodes);
  if (lo.empty()) lo.assign(n, -1.0);
  if (hi.empty()) hi.assign(n, 1.0);
  if (kind == ProblemKind::ObstacleTracking) {
    if (u_d.empty()) {
      u_d.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        u_d[i] = 0.05 * std::sin(3.141592653589793 * mesh.nodes[i]);
    }
    if (psi.empty()) {
      psi.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = mesh.nodes[i] - 0.5;
        psi[i] = -0.02 - 0.1 * x * x;
      }
    }
  }
  validate();
}

void ProblemSpec::validate() const {
  model.validate();
  risk.validate();
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidSpec, "alpha must be > 0");
  const std::size_t n = static_cast<std::size_t>(mesh.n_nodes);
  if (lo.size() != n || hi.size() != n) {
    fail(ErrorCode::BadBounds, "bounds not sized to the mesh");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lo[i] <= hi[i])) fail(ErrorCode::BadBounds, "lo > hi");
  }
  if (kind == ProblemKind::ObstacleTracking) {
    if (u_d.size() != n || psi.size() != n) {
      fail(ErrorCode::InvalidSpec, "obstacle data not sized to the mesh");
    }
  }
}

ControlVector ProblemSpec::initial_control() const {
  return project_feasible(std::vector<double>(mesh.n_nodes, 0.0), lo, hi);
}

ScenarioEval eval_scenario(const ProblemSpec& spec, const ControlVector& z,
                           const Scenario& s) {
  z.validate();
  return eval_scenario_impl(spec, z, s, true);
}

std::vector<double> scenario_values(const ProblemSpec& spec,
                                    const ControlVector& z,
                                    const SampleSet& sample, int threads) {
  z.validate();
  std::vector<double> values(sample.size());
  parallel_for(sample.size(), threads, [&](std::size_t i) {
    values[i] = eval_scenario_impl(spec, z, sample.scenarios[i], false).value;
  });
  return values;
}

double evaluate_objective(const ProblemSpec& spec, const ControlVector& z,
                          const SampleSet& sample, int threads) {
  const auto values = scenario_values(spec, z, sample, threads);
  return eval_risk(spec.risk, make_empirical(values)) +
         control_penalty(spec, z.z);
}

ObjectiveEval evaluate_objective_with_grad(const ProblemSpec& spec,
                                           const RiskSpec& risk_override,
                                           const ControlVector& z,
                                           const SampleSet& sample,
                                           int threads) {
  z.validate();
  const std::size_t n = static_cast<std::size_t>(spec.mesh.n_nodes);
  const std::size_t count = sample.size();

  std::vector<ScenarioEval> evals(count);
  parallel_for(count, threads, [&](std::size_t i) {
    evals[i] = eval_scenario_impl(spec, z, sample.scenarios[i], true);
  });

  ObjectiveEval out;
  out.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) out.values[i] = evals[i].value;

  const auto weights = risk_gradient_weights(risk_override, out.values);
  out.grad.assign(n, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) out.grad[j] += w * evals[i].grad[j];
  }

  const SymTridiag mass = mass_matrix(spec.mesh);
  const auto mz = mass.apply(z.z);
  for (std::size_t j = 0; j < n; ++j) out.grad[j] += spec.alpha * mz[j];

  out.value = eval_risk(risk_override, make_empirical(out.values)) +
              control_penalty(spec, z.z);
  return out;
}

double control_penalty(const ProblemSpec& spec, const std::vector<double>& z) {
  const SymTridiag mass = mass_matrix(spec.mesh);
  return 0.5 * spec.alpha * mass.quadform(z);
}

double mass_norm(const ProblemSpec& spec, const std::vector<double>& v) {
  const SymTridiag mass = mass_matrix(spec.mesh);
  return std::sqrt(std::max(0.0, mass.quadform(v)));
}

}  // namespace rave
