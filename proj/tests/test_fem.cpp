#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "rave/fem.hpp"
#include "rave/rng.hpp"

using namespace rave;
using std::numbers::pi;

namespace {

Eigen::MatrixXd dense(const SymTridiag& t) {
  const int n = static_cast<int>(t.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = t.diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = t.off[i];
    m(i + 1, i) = t.off[i];
  }
  return m;
}

std::vector<double> random_vec(std::uint64_t seed, std::uint64_t id,
                               std::size_t n, double lo = -1.0,
                               double hi = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng::uniform(seed, id, i, lo, hi);
  return v;
}

// 3-point Gauss-Legendre load vector for int f(x) phi_i(x) dx.
std::vector<double> load_vector(const Mesh& mesh, double (*f)(double)) {
  static const double gp[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<double> rhs(mesh.n_nodes, 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double x0 = mesh.nodes[e], x1 = mesh.nodes[e + 1];
    const double hm = 0.5 * (x1 - x0);
    for (int g = 0; g < 3; ++g) {
      const double x = 0.5 * (x0 + x1) + hm * gp[g];
      const double w = hm * gw[g];
      const double lam = (x - x0) / (x1 - x0);
      rhs[e] += w * f(x) * (1.0 - lam);
      rhs[e + 1] += w * f(x) * lam;
    }
  }
  return rhs;
}

double manufactured_l2_error(int n_nodes) {
  const Mesh mesh = Mesh::uniform(n_nodes);
  const std::vector<double> a(n_nodes, 1.0);
  const AssembledOps ops = assemble(mesh, a, 1.0);
  auto f = [](double x) {
    const double c = std::cos(pi * x);
    return (pi * pi + 1.0) * c + c * c * c;
  };
  const auto rhs = load_vector(mesh, f);
  const auto report = solve_semilinear(ops, rhs, 1e-12);

  static const double gp[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double err2 = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double x0 = mesh.nodes[e], x1 = mesh.nodes[e + 1];
    const double hm = 0.5 * (x1 - x0);
    for (int g = 0; g < 3; ++g) {
      const double x = 0.5 * (x0 + x1) + hm * gp[g];
      const double lam = (x - x0) / (x1 - x0);
      const double uh = (1.0 - lam) * report.u[e] + lam * report.u[e + 1];
      const double diff = uh - std::cos(pi * x);
      err2 += hm * gw[g] * diff * diff;
    }
  }
  return std::sqrt(err2);
}

}  // namespace

TEST_CASE("hand assembly on the 2-element unit-coefficient mesh") {
  const Mesh mesh = Mesh::uniform(3);
  const double h = 0.5;
  const AssembledOps ops = assemble(mesh, {1.0, 1.0, 1.0}, 2.0);

  Eigen::MatrixXd expected(3, 3);
  expected << 1 / h, -1 / h, 0, -1 / h, 2 / h, -1 / h, 0, -1 / h, 1 / h;
  Eigen::MatrixXd mass_exp(3, 3);
  mass_exp << 2 * h / 6, h / 6, 0, h / 6, 4 * h / 6, h / 6, 0, h / 6, 2 * h / 6;

  CHECK((dense(ops.stiffness_a) - (expected + mass_exp)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK((dense(ops.mass) - mass_exp).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((dense(ops.helmholtz_r) - (2.0 * expected + mass_exp))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("mass matrix partitions unity") {
  const Mesh mesh = Mesh::uniform(17);
  const AssembledOps ops = assemble(mesh, std::vector<double>(17, 1.3), 1.0);
  double total = 0.0;
  for (int i = 0; i < 17; ++i) {
    double row = ops.mass.diag[i];
    if (i > 0) row += ops.mass.off[i - 1];
    if (i < 16) row += ops.mass.off[i];
    total += row;
    CHECK(row == doctest::Approx(ops.lumped_mass[i]).epsilon(1e-15));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tridiagonal LDL^T matches a dense solve") {
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + trial * 5;
    SymTridiag t;
    t.diag = random_vec(61, trial, n, 2.5, 4.0);
    t.off = random_vec(62, trial, n - 1, -1.0, 1.0);
    const auto rhs = random_vec(63, trial, n);

    TridiagLDLT fac(t);
    const auto x = fac.solve(rhs);

    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = rhs[i];
    const Eigen::VectorXd xd = dense(t).ldlt().solve(b);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(x[i] == doctest::Approx(xd[i]).scale(1).epsilon(1e-11));
  }

  SymTridiag bad;
  bad.diag = {1.0, -2.0};
  bad.off = {0.0};
  CHECK_THROWS_AS(TridiagLDLT{bad}, Error);
}

TEST_CASE("apply_B reproduces constants, zero, and linearity") {
  const Mesh mesh = Mesh::uniform(33);
  const AssembledOps ops =
      assemble(mesh, random_vec(64, 0, 33, 0.6, 1.9), 1.7);

  const std::vector<double> ones(33, 1.0);
  const auto w = apply_B(ops, ops.apply_mass(ones));
  for (double wi : w) CHECK(wi == doctest::Approx(1.0).epsilon(1e-12));

  const auto z = apply_B(ops, std::vector<double>(33, 0.0));
  for (double zi : z) CHECK(zi == 0.0);

  const auto y1 = random_vec(65, 1, 33);
  const auto y2 = random_vec(65, 2, 33);
  const double alpha = 0.731;
  std::vector<double> combo(33);
  for (int i = 0; i < 33; ++i) combo[i] = alpha * y1[i] + y2[i];
  const auto lhs = apply_B(ops, combo);
  const auto b1 = apply_B(ops, y1);
  const auto b2 = apply_B(ops, y2);
  for (int i = 0; i < 33; ++i)
    CHECK(lhs[i] == doctest::Approx(alpha * b1[i] + b2[i]).scale(1).epsilon(1e-12));
}

TEST_CASE("semilinear solve: zero rhs is immediate") {
  const Mesh mesh = Mesh::uniform(21);
  const AssembledOps ops = assemble(mesh, std::vector<double>(21, 1.0), 1.0);
  const auto report = solve_semilinear(ops, std::vector<double>(21, 0.0), 1e-12);
  for (double ui : report.u) CHECK(ui == 0.0);
  CHECK(report.newton_iters <= 1);
  CHECK(report.final_residual <= 1e-12);
}

TEST_CASE("manufactured solution converges at second order in L2") {
  const double e32 = manufactured_l2_error(33);
  const double e64 = manufactured_l2_error(65);
  const double e128 = manufactured_l2_error(129);
  const double r1 = e32 / e64;
  const double r2 = e64 / e128;
  CHECK(r1 >= 3.6);
  CHECK(r1 <= 4.4);
  CHECK(r2 >= 3.6);
  CHECK(r2 <= 4.4);
}

TEST_CASE("stability bound and Lipschitz solution map") {
  const double kappa_min = 0.5;
  const Mesh mesh = Mesh::uniform(41);

  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_vec(70, trial, 41, kappa_min, 2.0);
    const AssembledOps ops = assemble(mesh, a, 1.2);

    const auto rhs = random_vec(71, trial, 41, -2.0, 2.0);
    const auto rep = solve_semilinear(ops, rhs, 1e-12);
    CHECK(h1_norm(ops, rep.u) <=
          dual_norm(ops, rhs) / kappa_min + 1e-8);

    // two loads through the full B1 chain
    const auto y1 = random_vec(72, trial, 41, -1.0, 1.0);
    const auto y2 = random_vec(73, trial, 41, -1.0, 1.0);
    const auto rhs1 = ops.apply_mass(apply_B(ops, y1));
    const auto rhs2 = ops.apply_mass(apply_B(ops, y2));
    const auto u1 = solve_semilinear(ops, rhs1, 1e-12).u;
    const auto u2 = solve_semilinear(ops, rhs2, 1e-12).u;

    std::vector<double> du(41), drhs(41);
    for (int i = 0; i < 41; ++i) {
      du[i] = u2[i] - u1[i];
      drhs[i] = rhs2[i] - rhs1[i];
    }
    CHECK(h1_norm(ops, du) <= dual_norm(ops, drhs) / kappa_min + 1e-8);
  }
}

TEST_CASE("discrete norms approach analytic norms of smooth functions") {
  auto norms_err = [](int n_nodes) {
    const Mesh mesh = Mesh::uniform(n_nodes);
    const AssembledOps ops = assemble(mesh, std::vector<double>(n_nodes, 1.0), 1.0);
    std::vector<double> u(n_nodes);
    for (int i = 0; i < n_nodes; ++i) u[i] = mesh.nodes[i] * mesh.nodes[i];
    const double l2_exact = std::sqrt(1.0 / 5.0);
    const double h1_exact = std::sqrt(4.0 / 3.0 + 1.0 / 5.0);
    return std::make_pair(std::abs(l2_norm(ops, u) - l2_exact),
                          std::abs(h1_norm(ops, u) - h1_exact));
  };
  const auto [l2a, h1a] = norms_err(33);
  const auto [l2b, h1b] = norms_err(65);
  CHECK(l2a / l2b >= 3.0);  // ~O(h^2)
  CHECK(h1a / h1b >= 3.0);
  CHECK(l2a <= 1.0 / (32.0 * 32.0));
  CHECK(h1a <= 2.0 / (32.0 * 32.0));
}

TEST_CASE("newton residual decreases across accepted steps") {
  // large rhs so several Newton steps are needed
  const Mesh mesh = Mesh::uniform(33);
  const AssembledOps ops = assemble(mesh, std::vector<double>(33, 0.7), 1.0);
  std::vector<double> rhs = ops.apply_mass(std::vector<double>(33, 25.0));
  const auto rep = solve_semilinear(ops, rhs, 1e-11);
  CHECK(rep.newton_iters >= 3);
  CHECK(rep.final_residual <= 1e-11);
}
