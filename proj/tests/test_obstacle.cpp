#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rave/obstacle.hpp"
#include "rave/rng.hpp"

using namespace rave;

namespace {

std::vector<double> random_vec(std::uint64_t seed, std::uint64_t id,
                               std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng::uniform(seed, id, i, lo, hi);
  return v;
}

ObstacleProblem random_problem(std::uint64_t seed, std::uint64_t id,
                               int n_nodes, double kappa_min = 0.5,
                               double kappa_max = 2.0) {
  const Mesh mesh = Mesh::uniform(n_nodes);
  const auto a = random_vec(seed, id * 7 + 1, n_nodes, kappa_min, kappa_max);
  auto psi = random_vec(seed, id * 7 + 2, n_nodes, -0.4, 0.15);
  psi.front() = std::min(psi.front(), 0.0);
  psi.back() = std::min(psi.back(), 0.0);
  const auto force = random_vec(seed, id * 7 + 3, n_nodes, -2.0, 2.0);
  return make_obstacle_problem(mesh, a, psi, force);
}

std::vector<std::vector<double>> dense_of(const SymTridiag& t) {
  const std::size_t n = t.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = t.diag[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a[i][i + 1] = t.off[i];
    a[i + 1][i] = t.off[i];
  }
  return a;
}

}  // namespace

TEST_CASE("a far-away obstacle reduces the VI to the linear solve") {
  const Mesh mesh = Mesh::uniform(21);
  const std::vector<double> a(21, 1.0);
  const std::vector<double> psi(21, -1e6);
  const auto force = random_vec(5, 0, 21, -1.0, 1.0);
  const auto p = make_obstacle_problem(mesh, a, psi, force);

  const auto rep = solve_vi(p);
  CHECK(rep.active_set.empty());

  TridiagLDLT fac(p.op);
  const auto u_lin = fac.solve(p.force);
  for (std::size_t i = 0; i < p.n_interior(); ++i)
    CHECK(rep.u[i] == doctest::Approx(u_lin[i]).scale(1).epsilon(1e-12));
}

TEST_CASE("zero force with nonpositive obstacle gives the zero solution") {
  const Mesh mesh = Mesh::uniform(15);
  const std::vector<double> a(15, 1.3);
  auto psi = random_vec(6, 0, 15, -1.0, 0.0);
  const std::vector<double> force(15, 0.0);
  const auto p = make_obstacle_problem(mesh, a, psi, force);
  const auto rep = solve_vi(p);
  for (double ui : rep.u) CHECK(ui == doctest::Approx(0.0).scale(1).epsilon(1e-14));
  CHECK(rep.comp_residual <= 1e-12);
}

TEST_CASE("solve_vi matches the dense projected Gauss-Seidel oracle") {
  for (int trial = 0; trial < 40; ++trial) {
    const auto id = static_cast<std::uint64_t>(trial);
    const int n_nodes = 6 + static_cast<int>(rng::counter_hash(8, id, 0) % 26);
    const auto p = random_problem(8, id, n_nodes);
    REQUIRE(p.n_interior() <= 30);

    const auto rep = solve_vi(p, 1e-10);
    const auto u_ref =
        oracle::box_qp_gauss_seidel(dense_of(p.op), p.force, p.psi);

    for (std::size_t i = 0; i < p.n_interior(); ++i) {
      CHECK(std::abs(rep.u[i] - u_ref[i]) <= 1e-8);
      CHECK(rep.u[i] >= p.psi[i] - 1e-12);
    }
    CHECK(rep.comp_residual <= 1e-10);
  }
}

TEST_CASE("active set never grows when the force increases") {
  for (int trial = 0; trial < 25; ++trial) {
    const auto id = static_cast<std::uint64_t>(trial);
    const auto p1 = random_problem(9, id, 25);
    ObstacleProblem p2 = p1;
    const auto bump = random_vec(10, id, p1.n_interior(), 0.0, 1.0);
    for (std::size_t i = 0; i < p2.force.size(); ++i) p2.force[i] += bump[i];

    const auto r1 = solve_vi(p1);
    const auto r2 = solve_vi(p2);
    for (int i : r2.active_set) {
      CHECK(std::find(r1.active_set.begin(), r1.active_set.end(), i) !=
            r1.active_set.end());
    }
  }
}

TEST_CASE("vi solution map is 1/kappa_min-Lipschitz") {
  const double kappa_min = 0.5;
  SUBCASE("identical forces return zero") {
    const auto p = random_problem(11, 0, 19, kappa_min);
    CHECK(vi_solution_map_lipschitz_check(p, p.force) == 0.0);
  }

  SUBCASE("random pairs stay below the bound") {
    for (int trial = 0; trial < 100; ++trial) {
      const auto id = static_cast<std::uint64_t>(trial);
      const auto p = random_problem(12, id, 23, kappa_min);
      const auto f2 = random_vec(13, id, p.n_interior(), -2.0, 2.0);
      const double ratio = vi_solution_map_lipschitz_check(p, f2);
      CHECK(ratio <= 1.0 / kappa_min + 1e-6);
    }
  }

  SUBCASE("inactive case reduces to plain linear algebra") {
    const Mesh mesh = Mesh::uniform(17);
    const std::vector<double> a(17, 1.0);
    const std::vector<double> psi(17, -1e6);
    const auto force = random_vec(14, 0, 17, 0.5, 1.0);
    const auto p = make_obstacle_problem(mesh, a, psi, force);

    std::vector<double> f2 = p.force;
    for (double& x : f2) x *= 1.75;
    const double ratio = vi_solution_map_lipschitz_check(p, f2);

    // same ratio from the dense unconstrained solve
    const std::size_t m = p.n_interior();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m), G = A;
    for (std::size_t i = 0; i < m; ++i) {
      A(i, i) = p.op.diag[i];
      G(i, i) = p.gram_int.diag[i];
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
      A(i, i + 1) = A(i + 1, i) = p.op.off[i];
      G(i, i + 1) = G(i + 1, i) = p.gram_int.off[i];
    }
    Eigen::VectorXd df(m);
    for (std::size_t i = 0; i < m; ++i) df[i] = f2[i] - p.force[i];
    const Eigen::VectorXd du = A.ldlt().solve(df);
    const double num = std::sqrt(du.dot(G * du));
    const double den = std::sqrt(df.dot(G.ldlt().solve(df)));
    CHECK(ratio == doctest::Approx(num / den).epsilon(1e-9));
    CHECK(ratio <= 1.0 / 1.0 + 1e-9);  // a == 1 here
  }
}

TEST_CASE("builder rejects a positive boundary trace") {
  const Mesh mesh = Mesh::uniform(9);
  std::vector<double> psi(9, -0.1);
  psi.front() = 0.2;
  CHECK_THROWS_AS(make_obstacle_problem(mesh, std::vector<double>(9, 1.0), psi,
                                        std::vector<double>(9, 0.0)),
                  Error);
}
