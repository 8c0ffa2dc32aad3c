#pragma once

// Shared helpers for gradient/optimizer checks: a strongly convex quadratic
// instance (linear state) plus its dense KKT oracle, built with Eigen,
// independent of the optimizer under test.

#include <Eigen/Dense>
#include <vector>

#include "rave/problems.hpp"
#include "rave/sampling.hpp"

namespace support {

// Semilinear benchmark with the cubic disabled so each state map is affine:
//   u_s(z) = L_s z + c_s,  L_s = K_s^{-1} M H_s^{-1} M,  c_s = b_s K_s^{-1} M 1.
// With states kept strictly below 1, the objective is the quadratic
//   J(z) = (1/2N) sum_s (1 - L_s z - c_s)^T M (1 - L_s z - c_s)
//        + (alpha/2) z^T M z.
struct ConvexInstance {
  rave::ProblemSpec spec;
  rave::SampleSet sample;
  Eigen::MatrixXd hessian;       // B = (1/N) sum L^T M L + alpha M
  Eigen::VectorXd linear_rhs;    // (1/N) sum L^T M (1 - c_s)
  Eigen::VectorXd z_star;        // unconstrained minimizer B z = rhs
  double state_bound = 0.0;      // sup over the box of max_i u_i (row-sum bound)
};

inline Eigen::MatrixXd dense_tridiag(const rave::SymTridiag& t) {
  const int n = static_cast<int>(t.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = t.diag[i];
  for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = t.off[i];
  return m;
}

inline ConvexInstance make_convex_instance(int n_nodes, int n_scenarios,
                                           double alpha,
                                           std::uint64_t seed = 313,
                                           double box_half_width = 0.5) {
  using namespace rave;
  ConvexInstance inst;
  inst.spec.kind = ProblemKind::SemilinearTracking;
  inst.spec.mesh = Mesh::uniform(n_nodes);
  inst.spec.model.b_min = 0.0;
  inst.spec.model.b_max = 0.1;
  inst.spec.alpha = alpha;
  inst.spec.risk = RiskSpec::expectation();
  inst.spec.cubic_term = false;
  inst.spec.lo.assign(n_nodes, -box_half_width);
  inst.spec.hi.assign(n_nodes, box_half_width);
  inst.spec.finalize();
  inst.sample = draw(inst.spec.model, seed, n_scenarios);

  const int n = n_nodes;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd bsum = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd mass;
  double bound = 0.0;

  for (const auto& s : inst.sample.scenarios) {
    const auto a = realize_field(inst.spec.model, s, inst.spec.mesh.nodes);
    const AssembledOps ops =
        assemble(inst.spec.mesh, a, scenario_r(inst.spec.model, s));
    const Eigen::MatrixXd K = dense_tridiag(ops.stiffness_a);
    const Eigen::MatrixXd H = dense_tridiag(ops.helmholtz_r);
    mass = dense_tridiag(ops.mass);

    const Eigen::MatrixXd L =
        K.ldlt().solve(mass * H.ldlt().solve(mass * eye));
    const Eigen::VectorXd c =
        scenario_b(inst.spec.model, s) *
        K.ldlt().solve(mass * Eigen::VectorXd::Ones(n));

    bsum += L.transpose() * mass * L;
    rhs += L.transpose() * mass * (Eigen::VectorXd::Ones(n) - c);

    // validity of the quadratic model over the whole admissible box
    const double row = L.cwiseAbs().rowwise().sum().maxCoeff();
    bound = std::max(bound, row * box_half_width + c.cwiseAbs().maxCoeff());
  }
  const double invn = 1.0 / static_cast<double>(n_scenarios);
  inst.hessian = invn * bsum + alpha * mass;
  inst.linear_rhs = invn * rhs;
  inst.z_star = inst.hessian.ldlt().solve(inst.linear_rhs);
  inst.state_bound = bound;
  return inst;
}

}  // namespace support
