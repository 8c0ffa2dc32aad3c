#pragma once

#include <vector>

#include "rave/errors.hpp"
#include "rave/tridiag.hpp"

namespace rave {

// Uniform 1D mesh on [0,1] with piecewise-linear elements.
struct Mesh {
  int n_nodes = 2;
  double h = 1.0;
  std::vector<double> nodes;

  static Mesh uniform(int n_nodes);
  int n_elements() const noexcept { return n_nodes - 1; }
};

// P1 operators for one scenario on one mesh:
//   stiffness_a : int a(x) (u'v' + uv),  midpoint rule for a per element
//   mass        : int uv (consistent)
//   helmholtz_r : int r u'v' + uv
//   gram        : int u'v' + uv (the H^1 inner product, scenario-free)
// lumped_mass holds the mass row sums used by the nodal cubic term.
struct AssembledOps {
  Mesh mesh;
  SymTridiag stiffness_a;
  SymTridiag mass;
  SymTridiag helmholtz_r;
  SymTridiag gram;
  std::vector<double> lumped_mass;

  TridiagLDLT helmholtz_solver;
  TridiagLDLT gram_solver;

  std::vector<double> apply_mass(const std::vector<double>& x) const {
    return mass.apply(x);
  }
};

AssembledOps assemble(const Mesh& mesh, const std::vector<double>& a_nodes,
                      double r_value);

// w = B(xi) y: solve int r w'v + wv = <y, v> for all v, with y given as a
// load (dual) vector. Linear in y.
std::vector<double> apply_B(const AssembledOps& ops,
                            const std::vector<double>& y_dual);

struct StateSolveReport {
  std::vector<double> u;
  int newton_iters = 0;
  double final_residual = 0.0;
};

// Newton solve of  stiffness_a u + N(u) = rhs  with the mass-lumped nodal
// cubic N_i(u) = lumped_i u_i^3 (omitted when with_cubic is false). The
// Jacobian stiffness_a + 3 diag(lumped u^2) stays positive definite, and a
// backtracking line search keeps the residual strictly decreasing.
StateSolveReport solve_semilinear(const AssembledOps& ops,
                                  const std::vector<double>& rhs, double tol,
                                  bool with_cubic = true);

// Norms on nodal vectors / load vectors.
double l2_norm(const AssembledOps& ops, const std::vector<double>& u);
double h1_norm(const AssembledOps& ops, const std::vector<double>& u);
double dual_norm(const AssembledOps& ops, const std::vector<double>& f);

}  // namespace rave
