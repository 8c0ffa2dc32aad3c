#pragma once

#include <vector>

#include "rave/fem.hpp"

namespace rave {

// Obstacle problem on the interior nodes of a mesh (homogeneous Dirichlet):
//   find u >= psi :  <A u - force, v - u> >= 0  for all v >= psi,
// with A the a(xi)-weighted H^1 form restricted to the interior.
struct ObstacleProblem {
  Mesh mesh;
  SymTridiag op;        // interior rows/columns of the weighted form
  SymTridiag gram_int;  // interior H^1 Gram, for norms
  std::vector<double> psi;
  std::vector<double> force;

  std::size_t n_interior() const noexcept { return op.size(); }
};

// Builds the interior operator from nodal coefficients on the full mesh.
// psi_full and force are given on the full mesh; psi must have boundary
// trace <= 0 so that K_psi contains admissible extensions by zero. The
// force vector is the full-mesh load; interior entries are kept.
ObstacleProblem make_obstacle_problem(const Mesh& mesh,
                                      const std::vector<double>& a_nodes,
                                      const std::vector<double>& psi_full,
                                      const std::vector<double>& force_full);

struct VISolveReport {
  std::vector<double> u;            // interior values
  std::vector<int> active_set;     // interior indices with u = psi
  double comp_residual = 0.0;      // max |min(u - psi, A u - force)|
  int iterations = 0;
};

// Primal-dual active set iteration. On exit u >= psi - 1e-12, the
// multiplier lambda = A u - force is nonnegative up to tol on the active
// set, and min(u - psi, lambda) <= tol componentwise.
VISolveReport solve_vi(const ObstacleProblem& p, double tol = 1e-10);

// Solves op[I,I] x_I = rhs[I] on the complement of active_set and returns
// the interior vector extended by zeros on the active nodes (the adjoint
// system of the active-set generalized gradient).
std::vector<double> solve_inactive_system(const ObstacleProblem& p,
                                          const std::vector<int>& active_set,
                                          const std::vector<double>& rhs_interior);

// Ratio ||u2 - u1||_{H^1} / ||force2 - force1||_{H^-1} for the solves with
// the stored force and force2 (interior load vectors). Returns 0 when the
// forces coincide. The solution map contract bounds this by 1/kappa_min.
double vi_solution_map_lipschitz_check(const ObstacleProblem& p,
                                       const std::vector<double>& force2);

// Extends an interior vector by zeros at the two boundary nodes.
std::vector<double> extend_interior(const Mesh& mesh,
                                    const std::vector<double>& interior);

}  // namespace rave
