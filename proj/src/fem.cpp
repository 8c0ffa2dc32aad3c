#include "rave/fem.hpp"

#include <cmath>

namespace rave {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Mesh Mesh::uniform(int n_nodes) {
  if (n_nodes < 2) fail(ErrorCode::BadRange, "mesh needs at least 2 nodes");
  Mesh m;
  m.n_nodes = n_nodes;
  m.h = 1.0 / (n_nodes - 1);
  m.nodes.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) m.nodes[i] = i * m.h;
  m.nodes.back() = 1.0;
  return m;
}

AssembledOps assemble(const Mesh& mesh, const std::vector<double>& a_nodes,
                      double r_value) {
  const int n = mesh.n_nodes;
  const double h = mesh.h;

  AssembledOps ops;
  ops.mesh = mesh;
  auto zero = [&] {
    SymTridiag t;
    t.diag.assign(n, 0.0);
    t.off.assign(n - 1, 0.0);
    return t;
  };
  ops.stiffness_a = zero();
  ops.mass = zero();
  ops.helmholtz_r = zero();
  ops.gram = zero();

  for (int e = 0; e < n - 1; ++e) {
    const double a_mid = 0.5 * (a_nodes[e] + a_nodes[e + 1]);
    const double k = 1.0 / h;      // element u'v' pattern: k*[1,-1;-1,1]
    const double m_d = h / 3.0;    // element uv pattern: [m_d, m_o; m_o, m_d]
    const double m_o = h / 6.0;

    ops.stiffness_a.diag[e] += a_mid * (k + m_d);
    ops.stiffness_a.diag[e + 1] += a_mid * (k + m_d);
    ops.stiffness_a.off[e] += a_mid * (-k + m_o);

    ops.mass.diag[e] += m_d;
    ops.mass.diag[e + 1] += m_d;
    ops.mass.off[e] += m_o;

    ops.helmholtz_r.diag[e] += r_value * k + m_d;
    ops.helmholtz_r.diag[e + 1] += r_value * k + m_d;
    ops.helmholtz_r.off[e] += -r_value * k + m_o;

    ops.gram.diag[e] += k + m_d;
    ops.gram.diag[e + 1] += k + m_d;
    ops.gram.off[e] += -k + m_o;
  }

  ops.lumped_mass.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    ops.lumped_mass[i] = ops.mass.diag[i];
    if (i > 0) ops.lumped_mass[i] += ops.mass.off[i - 1];
    if (i + 1 < n) ops.lumped_mass[i] += ops.mass.off[i];
  }

  ops.helmholtz_solver.factor(ops.helmholtz_r);
  ops.gram_solver.factor(ops.gram);
  return ops;
}

std::vector<double> apply_B(const AssembledOps& ops,
                            const std::vector<double>& y_dual) {
  return ops.helmholtz_solver.solve(y_dual);
}

StateSolveReport solve_semilinear(const AssembledOps& ops,
                                  const std::vector<double>& rhs, double tol,
                                  bool with_cubic) {
  if (!(tol > 0.0)) fail(ErrorCode::BadRange, "tolerance must be > 0");
  const std::size_t n = rhs.size();
  const int max_iters = 60;

  std::vector<double> u(n, 0.0);
  auto residual = [&](const std::vector<double>& w) {
    std::vector<double> r = ops.stiffness_a.apply(w);
    if (with_cubic) {
      for (std::size_t i = 0; i < n; ++i)
        r[i] += ops.lumped_mass[i] * w[i] * w[i] * w[i];
    }
    for (std::size_t i = 0; i < n; ++i) r[i] -= rhs[i];
    return r;
  };

  std::vector<double> res = residual(u);
  double res_norm = norm2(res);
  int iters = 0;
  while (res_norm > tol && iters < max_iters) {
    SymTridiag jac = ops.stiffness_a;
    if (with_cubic) {
      for (std::size_t i = 0; i < n; ++i)
        jac.diag[i] += 3.0 * ops.lumped_mass[i] * u[i] * u[i];
    }
    TridiagLDLT fac(jac);
    std::vector<double> neg = res;
    for (double& x : neg) x = -x;
    const std::vector<double> step = fac.solve(neg);

    double s = 1.0;
    std::vector<double> trial(n);
    std::vector<double> trial_res;
    double trial_norm = 0.0;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + s * step[i];
      trial_res = residual(trial);
      trial_norm = norm2(trial_res);
      if (trial_norm < res_norm || s < 1e-12) break;
      s *= 0.5;
    }
    if (trial_norm >= res_norm) {
      fail(ErrorCode::NoConvergence, "semilinear Newton stalled");
    }
    u = trial;
    res = std::move(trial_res);
    res_norm = trial_norm;
    ++iters;
  }
  if (res_norm > tol) {
    fail(ErrorCode::NoConvergence, "semilinear Newton hit iteration cap");
  }
  return {std::move(u), iters, res_norm};
}

double l2_norm(const AssembledOps& ops, const std::vector<double>& u) {
  return std::sqrt(std::max(0.0, ops.mass.quadform(u)));
}

double h1_norm(const AssembledOps& ops, const std::vector<double>& u) {
  return std::sqrt(std::max(0.0, ops.gram.quadform(u)));
}

double dual_norm(const AssembledOps& ops, const std::vector<double>& f) {
  const std::vector<double> g = ops.gram_solver.solve(f);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return std::sqrt(std::max(0.0, s));
}

}  // namespace rave
