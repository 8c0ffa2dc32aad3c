#include "rave/obstacle.hpp"

#include <algorithm>
#include <cmath>

namespace rave {

namespace {

// Solve op[I,I] x = rhs[I] for an inactive index set given as a sorted list.
// Rows separated by active nodes decouple; the compressed system stays
// tridiagonal with zero coupling across gaps.
std::vector<double> solve_reduced(const SymTridiag& op,
                                  const std::vector<int>& inactive,
                                  const std::vector<double>& rhs) {
  const std::size_t m = inactive.size();
  SymTridiag red;
  red.diag.resize(m);
  red.off.assign(m > 0 ? m - 1 : 0, 0.0);
  std::vector<double> b(m);
  for (std::size_t k = 0; k < m; ++k) {
    red.diag[k] = op.diag[inactive[k]];
    b[k] = rhs[inactive[k]];
    if (k + 1 < m && inactive[k + 1] == inactive[k] + 1) {
      red.off[k] = op.off[inactive[k]];
    }
  }
  TridiagLDLT fac(red);
  return fac.solve(b);
}

}  // namespace

ObstacleProblem make_obstacle_problem(const Mesh& mesh,
                                      const std::vector<double>& a_nodes,
                                      const std::vector<double>& psi_full,
                                      const std::vector<double>& force_full) {
  if (mesh.n_nodes < 3) {
    fail(ErrorCode::BadRange, "obstacle problem needs interior nodes");
  }
  if (!(psi_full.front() <= 0.0 && psi_full.back() <= 0.0)) {
    fail(ErrorCode::BadBounds, "obstacle boundary trace must be <= 0");
  }
  for (double v : psi_full) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "obstacle not finite");
  }

  const AssembledOps ops = assemble(mesh, a_nodes, 1.0);

  ObstacleProblem p;
  p.mesh = mesh;
  p.op.diag.assign(ops.stiffness_a.diag.begin() + 1,
                   ops.stiffness_a.diag.end() - 1);
  p.op.off.assign(ops.stiffness_a.off.begin() + 1,
                  ops.stiffness_a.off.end() - 1);
  p.gram_int.diag.assign(ops.gram.diag.begin() + 1, ops.gram.diag.end() - 1);
  p.gram_int.off.assign(ops.gram.off.begin() + 1, ops.gram.off.end() - 1);
  p.psi.assign(psi_full.begin() + 1, psi_full.end() - 1);
  p.force.assign(force_full.begin() + 1, force_full.end() - 1);
  return p;
}

VISolveReport solve_vi(const ObstacleProblem& p, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::BadRange, "tolerance must be > 0");
  const std::size_t n = p.n_interior();
  const int max_iters = 2 * static_cast<int>(n) + 20;

  std::vector<char> active(n, 0);
  std::vector<double> u(n, 0.0), lambda(n, 0.0);

  for (int iter = 1; iter <= max_iters; ++iter) {
    // assemble the equality system for the current set
    std::vector<int> inactive;
    inactive.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!active[i]) inactive.push_back(static_cast<int>(i));

    std::vector<double> rhs = p.force;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      // move known u = psi contributions to the right-hand side
      if (i > 0 && !active[i - 1]) rhs[i - 1] -= p.op.off[i - 1] * p.psi[i];
      if (i + 1 < n && !active[i + 1]) rhs[i + 1] -= p.op.off[i] * p.psi[i];
    }

    for (std::size_t i = 0; i < n; ++i) u[i] = active[i] ? p.psi[i] : 0.0;
    if (!inactive.empty()) {
      const auto ui = solve_reduced(p.op, inactive, rhs);
      for (std::size_t k = 0; k < inactive.size(); ++k)
        u[static_cast<std::size_t>(inactive[k])] = ui[k];
    }

    const std::vector<double> au = p.op.apply(u);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = au[i] - p.force[i];

    // next active set; ties u = psi classify as active
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = u[i] - p.psi[i];
      const bool next = (lambda[i] - gap > 0.0) || (gap <= 0.0 && lambda[i] >= 0.0);
      if (next != static_cast<bool>(active[i])) changed = true;
      active[i] = next ? 1 : 0;
    }

    if (!changed) {
      VISolveReport report;
      report.u = u;
      report.iterations = iter;
      double comp = 0.0;
      bool feasible = true;
      for (std::size_t i = 0; i < n; ++i) {
        const double gap = u[i] - p.psi[i];
        if (gap < -1e-12) feasible = false;
        comp = std::max(comp, std::abs(std::min(gap, lambda[i])));
        if (active[i]) report.active_set.push_back(static_cast<int>(i));
      }
      report.comp_residual = comp;
      if (!feasible || comp > tol) {
        fail(ErrorCode::NoConvergence,
             "active set stabilized without meeting the tolerance");
      }
      return report;
    }
  }
  fail(ErrorCode::NoConvergence, "active set did not stabilize");
}

std::vector<double> solve_inactive_system(
    const ObstacleProblem& p, const std::vector<int>& active_set,
    const std::vector<double>& rhs_interior) {
  const std::size_t n = p.n_interior();
  std::vector<char> active(n, 0);
  for (int i : active_set) active[static_cast<std::size_t>(i)] = 1;
  std::vector<int> inactive;
  inactive.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!active[i]) inactive.push_back(static_cast<int>(i));

  std::vector<double> x(n, 0.0);
  if (!inactive.empty()) {
    const auto xi = solve_reduced(p.op, inactive, rhs_interior);
    for (std::size_t k = 0; k < inactive.size(); ++k)
      x[static_cast<std::size_t>(inactive[k])] = xi[k];
  }
  return x;
}

double vi_solution_map_lipschitz_check(const ObstacleProblem& p,
                                       const std::vector<double>& force2) {
  const std::size_t n = p.n_interior();
  ObstacleProblem q = p;
  q.force = force2;

  const auto u1 = solve_vi(p).u;
  const auto u2 = solve_vi(q).u;

  std::vector<double> du(n), df(n);
  for (std::size_t i = 0; i < n; ++i) {
    du[i] = u2[i] - u1[i];
    df[i] = force2[i] - p.force[i];
  }
  TridiagLDLT gram_fac(p.gram_int);
  const auto gf = gram_fac.solve(df);
  double den2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) den2 += df[i] * gf[i];
  if (den2 <= 0.0) return 0.0;
  const double num = std::sqrt(std::max(0.0, p.gram_int.quadform(du)));
  return num / std::sqrt(den2);
}

std::vector<double> extend_interior(const Mesh& mesh,
                                    const std::vector<double>& interior) {
  std::vector<double> full(static_cast<std::size_t>(mesh.n_nodes), 0.0);
  std::copy(interior.begin(), interior.end(), full.begin() + 1);
  return full;
}

}  // namespace rave
