#include "polykin/collision.hpp"

#include "polykin/rng.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace polykin;
using Eigen::VectorXd;

namespace {

CollisionOperator make_op(Model model, double kBT, int n_per_axis, int dims,
                          std::vector<double> zetas) {
  MaxwellianSpec spec{model, kBT};
  double vmax = VelocityGrid::min_vmax(kBT);
  std::vector<VelocityAxis> axes;
  for (int d = 0; d < dims; ++d) axes.emplace_back(n_per_axis, vmax);
  return CollisionOperator(VelocityGrid(spec, std::move(axes)),
                           std::move(zetas));
}

// Smooth perturbation of the Maxwellian with non-constant ratio f/M.
VectorXd perturbed_state(const CollisionOperator& op) {
  const auto& grid = op.grid();
  VectorXd f = op.maxwellian();
  if (grid.dims() == 1) {
    for (int i = 0; i < grid.axes[0].n; ++i) {
      double v = grid.axes[0].centers[i];
      f[i] *= 1.0 + 0.3 * std::sin(1.3 * v) + 0.1 * v;
    }
  } else {
    for (int i = 0; i < grid.axes[0].n; ++i) {
      for (int j = 0; j < grid.axes[1].n; ++j) {
        double v = grid.axes[0].centers[i];
        double w = grid.axes[1].centers[j];
        f[op.flat(i, j)] *= 1.0 + 0.25 * std::sin(v) * std::cos(0.7 * w) +
                            0.05 * v - 0.08 * w;
      }
    }
  }
  return f;
}

} // namespace

TEST_SUITE("collision") {

TEST_CASE("construction guards") {
  MaxwellianSpec spec{Model::dumbbell, 1.0};
  CHECK_THROWS_AS(VelocityAxis(7, 10.0), std::invalid_argument);
  CHECK_NOTHROW(VelocityAxis(8, 10.0));
  // Half-width below six thermal widths truncates the equilibrium.
  CHECK_THROWS_AS(VelocityGrid(spec, {VelocityAxis(16, 5.0)}),
                  std::invalid_argument);
  CHECK_NOTHROW(VelocityGrid(spec, {VelocityAxis(16, 6.0 * std::sqrt(2.0))}));
  // One friction coefficient per axis.
  VelocityGrid g(spec, {VelocityAxis(16, 9.0), VelocityAxis(16, 9.0)});
  CHECK_THROWS_AS(CollisionOperator(g, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(CollisionOperator(g, {1.0, -2.0}), std::invalid_argument);
  auto op = make_op(Model::dumbbell, 1.0, 16, 1, {1.0});
  CHECK_THROWS_AS(op.apply(VectorXd::Zero(5)), std::invalid_argument);
}

TEST_CASE("equilibrium spec values") {
  MaxwellianSpec dumb{Model::dumbbell, 0.8};
  MaxwellianSpec rod{Model::rod, 0.8};
  CHECK(dumb.variance() == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(rod.variance() == doctest::Approx(0.8).epsilon(1e-15));
  // Unnormalized density: value 1 at the origin for both models.
  CHECK(dumb.density(0.0) == 1.0);
  CHECK(rod.density(0.0) == 1.0);
  CHECK(dumb.density(2.0) == doctest::Approx(std::exp(-4.0 / 3.2)).epsilon(1e-14));
  CHECK(rod.density(2.0) == doctest::Approx(std::exp(-4.0 / 1.6)).epsilon(1e-14));
  CHECK(dumb.normalization1d() ==
        doctest::Approx(std::sqrt(2.0 * M_PI * 1.6)).epsilon(1e-14));
}

TEST_CASE("maxwellian is an exact discrete null state") {
  for (auto model : {Model::dumbbell, Model::rod}) {
    for (int dims : {1, 2}) {
      std::vector<double> zetas(dims, model == Model::rod ? 1.3 : 1.0);
      auto op = make_op(model, 0.9, 24, dims, zetas);
      VectorXd qm = op.apply(op.maxwellian());
      CHECK(qm.lpNorm<Eigen::Infinity>() <= 1e-13);
      CHECK(op.dissipation(op.maxwellian()) == doctest::Approx(0.0));
      // Constant multiples are equally stationary.
      VectorXd f2 = 2.0 * op.maxwellian();
      CHECK(op.apply(f2).lpNorm<Eigen::Infinity>() <= 1e-13);
    }
  }
}

TEST_CASE("conservation of mass under apply") {
  for (int dims : {1, 2}) {
    auto op = make_op(Model::dumbbell, 1.0, 32, dims, std::vector<double>(dims, 1.0));
    VectorXd f = perturbed_state(op);
    VectorXd qf = op.apply(f);
    double scale = qf.cwiseAbs().sum() * op.grid().cell_volume() + 1e-30;
    CHECK(std::abs(op.mass(qf)) <= 1e-12 * scale);
  }
}

TEST_CASE("dissipation sign and exact face-sum identity") {
  auto op = make_op(Model::dumbbell, 1.0, 64, 1, {1.0});
  const auto& ax = op.grid().axes[0];

  // f = (1 + 0.1 v) M: the ratio u = f/M has exactly constant slope, so the
  // summation-by-parts identity gives D = -(c/h^2) sum_faces Mf (du)^2 * h
  // with du = 0.1 h.  Reconstruct the face weights from the exposed bands.
  VectorXd f = op.maxwellian();
  for (int i = 0; i < ax.n; ++i) f[i] *= 1.0 + 0.1 * ax.centers[i];
  double d_quad = op.dissipation(f);
  CHECK(d_quad < 0.0);

  VectorXd lower, diag, upper;
  op.axis_bands(0, &lower, &diag, &upper);
  double c = 1.0 * op.grid().maxwell.variance() / (ax.h * ax.h);
  double face_sum = 0.0;
  for (int i = 0; i + 1 < ax.n; ++i) {
    double mface = upper[i] * op.maxwellian()[i + 1] / c;
    double du = 0.1 * ax.h;
    face_sum += mface * du * du;
  }
  double d_exact = -c * face_sum * ax.h;
  CHECK(d_quad == doctest::Approx(d_exact).epsilon(1e-12));

  // And the continuous limit -0.01 * zeta * var * int M as a sanity scale.
  double cont = -0.01 * 1.0 * op.grid().maxwell.variance() *
                op.grid().maxwell.normalization1d();
  CHECK(d_quad == doctest::Approx(cont).epsilon(1e-3));
}

TEST_CASE("dissipation nonpositive on random states, zero iff equilibrium ratio") {
  RandomStream rng(0xc011u, 7);
  for (int dims : {1, 2}) {
    auto op = make_op(Model::rod, 1.1, 16, dims, std::vector<double>(dims, 0.8));
    for (int rep = 0; rep < 10; ++rep) {
      VectorXd f = op.maxwellian();
      for (int i = 0; i < f.size(); ++i) f[i] *= 1.0 + 0.5 * (rng.uniform() - 0.5);
      double d = op.dissipation(f);
      double scale = f.cwiseQuotient(op.maxwellian()).squaredNorm() + 1.0;
      CHECK(d <= 1e-12 * scale);
      CHECK(d < 0.0); // random ratio is non-constant
    }
  }
}

TEST_CASE("self-adjointness in the M-weighted inner product") {
  for (int dims : {1, 2}) {
    auto op = make_op(Model::dumbbell, 0.7, 24, dims, std::vector<double>(dims, 1.4));
    RandomStream rng(0xad70u, dims);
    VectorXd f = op.maxwellian(), g = op.maxwellian();
    for (int i = 0; i < f.size(); ++i) {
      f[i] *= 1.0 + 0.4 * (rng.uniform() - 0.5);
      g[i] *= 1.0 + 0.4 * (rng.uniform() - 0.5);
    }
    double lhs = op.apply(f).cwiseProduct(g.cwiseQuotient(op.maxwellian())).sum();
    double rhs = op.apply(g).cwiseProduct(f.cwiseQuotient(op.maxwellian())).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("second-order consistency on a cubic state") {
  // Q(v^3 M) = zeta var M (6 v - 3 v^3 / var) exactly in the continuum.
  double zeta = 1.0, kBT = 1.0;
  auto error_at = [&](int n) {
    auto op = make_op(Model::dumbbell, kBT, n, 1, {zeta});
    const auto& ax = op.grid().axes[0];
    double var = op.grid().maxwell.variance();
    VectorXd f(ax.n), exact(ax.n);
    for (int i = 0; i < ax.n; ++i) {
      double v = ax.centers[i];
      double m = op.grid().maxwell.density(v);
      f[i] = v * v * v * m;
      exact[i] = zeta * var * m * (6.0 * v - 3.0 * v * v * v / var);
    }
    return (op.apply(f) - exact).lpNorm<Eigen::Infinity>();
  };
  double e1 = error_at(64), e2 = error_at(128), e3 = error_at(256);
  double order12 = std::log2(e1 / e2);
  double order23 = std::log2(e2 / e3);
  CHECK(order12 > 1.8);
  CHECK(order12 < 2.2);
  CHECK(order23 > 1.8);
  CHECK(order23 < 2.2);
}

TEST_CASE("first moment state relaxes at rate zeta") {
  // Q(v M) = -zeta v M in the continuum; the discretization matches to O(h^2).
  auto op = make_op(Model::rod, 1.0, 128, 1, {0.9});
  const auto& ax = op.grid().axes[0];
  VectorXd f(ax.n), expected(ax.n);
  for (int i = 0; i < ax.n; ++i) {
    double v = ax.centers[i];
    f[i] = v * op.grid().maxwell.density(v);
    expected[i] = -0.9 * f[i];
  }
  VectorXd qf = op.apply(f);
  double rel = (qf - expected).norm() / expected.norm();
  CHECK(rel < 2e-3);
}

TEST_CASE("cell problem solutions match the analytic closures") {
  // Mixed-friction rod plane (p, omega): distinct coefficients per axis catch
  // any axis/zeta mix-up.
  double kBT = 0.9, zeta_p = 0.7, zeta_q = 1.3;
  MaxwellianSpec spec{Model::rod, kBT};
  auto op = make_op(Model::rod, kBT, 64, 2, {zeta_p, zeta_q});
  auto cs = analytic_cell_solutions(spec, zeta_p, zeta_q);
  const auto& ax0 = op.grid().axes[0];
  const auto& ax1 = op.grid().axes[1];

  VectorXd g_a(op.size()), g_b(op.size()), a_exact(op.size()), b_exact(op.size());
  for (int i = 0; i < ax0.n; ++i) {
    for (int j = 0; j < ax1.n; ++j) {
      VectorXd p(1), q(1);
      p[0] = ax0.centers[i];
      q[0] = ax1.centers[j];
      double m = spec.density(p[0]) * spec.density(q[0]);
      g_a[op.flat(i, j)] = p[0] * m;
      g_b[op.flat(i, j)] = q[0] * m;
      a_exact[op.flat(i, j)] = cs.a(p, q)[0];
      b_exact[op.flat(i, j)] = cs.b(p, q)[0];
    }
  }

  VectorXd psi_a = op.solve_cell_problem(g_a);
  VectorXd psi_b = op.solve_cell_problem(g_b);
  CHECK((psi_a - a_exact).norm() / a_exact.norm() < 1e-4);
  CHECK((psi_b - b_exact).norm() / b_exact.norm() < 1e-4);
  CHECK((op.apply(psi_a) - g_a).norm() <= 1e-8 * g_a.norm());
  CHECK((op.apply(psi_b) - g_b).norm() <= 1e-8 * g_b.norm());
  CHECK(std::abs(op.mass(psi_a)) <= 1e-10);
  CHECK(std::abs(op.mass(psi_b)) <= 1e-10);

  // Odd symmetry: the p-driven solution carries no q moment and vice versa.
  double cross_a = 0.0, cross_b = 0.0, scale = 0.0;
  for (int i = 0; i < ax0.n; ++i) {
    for (int j = 0; j < ax1.n; ++j) {
      cross_a += psi_a[op.flat(i, j)] * ax1.centers[j];
      cross_b += psi_b[op.flat(i, j)] * ax0.centers[i];
      scale += std::abs(psi_a[op.flat(i, j)]);
    }
  }
  CHECK(std::abs(cross_a) <= 1e-10 * scale);
  CHECK(std::abs(cross_b) <= 1e-10 * scale);
}

TEST_CASE("analytic closure point values") {
  // First solution at p = (1,0,0), no angular part, unit friction and
  // temperature: (-exp(-1/4), 0, 0).
  MaxwellianSpec spec{Model::dumbbell, 1.0};
  auto cs = analytic_cell_solutions(spec, 1.0, 1.0);
  Eigen::VectorXd p(3), q(0);
  p << 1.0, 0.0, 0.0;
  VectorXd a = cs.a(p, q);
  CHECK(a[0] == doctest::Approx(-std::exp(-0.25)).epsilon(1e-14));
  CHECK(a[1] == 0.0);
  CHECK(a[2] == 0.0);
  // Scaled companions: c = -a / var, d = -b / var.
  VectorXd c = cs.c(p, q);
  CHECK(c[0] == doctest::Approx(std::exp(-0.25) / 2.0).epsilon(1e-14));
  // Rod closures use variance kBT.
  MaxwellianSpec rspec{Model::rod, 2.0};
  auto rcs = analytic_cell_solutions(rspec, 1.0, 4.0);
  Eigen::VectorXd w(2), none(0);
  w << 1.0, 1.0;
  VectorXd b = rcs.b(none, w);
  double mr = std::exp(-2.0 / (2.0 * 2.0));
  CHECK(b[0] == doctest::Approx(-mr / 4.0).epsilon(1e-14));
  VectorXd d = rcs.d(none, w);
  CHECK(d[0] == doctest::Approx(mr / (4.0 * 2.0)).epsilon(1e-14));
}

TEST_CASE("cell problem solvability guard and trivial input") {
  auto op = make_op(Model::dumbbell, 1.0, 16, 1, {1.0});
  CHECK_THROWS_AS(op.solve_cell_problem(op.maxwellian()), std::invalid_argument);
  VectorXd zero = VectorXd::Zero(op.size());
  CHECK(op.solve_cell_problem(zero).norm() <= 1e-12);
}

TEST_CASE("stationary solve recovers the maxwellian") {
  for (int dims : {1, 2}) {
    auto op = make_op(Model::rod, 0.8, 24, dims, std::vector<double>(dims, 1.1));
    VectorXd f = op.solve_stationary();
    double err = (f - op.maxwellian()).lpNorm<Eigen::Infinity>();
    CHECK(err <= 1e-10 * op.maxwellian().lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("axis bands reproduce the one-dimensional operator") {
  auto op = make_op(Model::dumbbell, 1.0, 32, 1, {1.2});
  VectorXd lower, diag, upper;
  op.axis_bands(0, &lower, &diag, &upper);
  VectorXd f = perturbed_state(op);
  int n = op.grid().axes[0].n;
  VectorXd manual(n);
  for (int i = 0; i < n; ++i) {
    double acc = diag[i] * f[i];
    if (i > 0) acc += lower[i] * f[i - 1];
    if (i + 1 < n) acc += upper[i] * f[i + 1];
    manual[i] = acc;
  }
  VectorXd qf = op.apply(f);
  CHECK((manual - qf).lpNorm<Eigen::Infinity>() <=
        1e-13 * qf.lpNorm<Eigen::Infinity>());
  CHECK_THROWS_AS(op.axis_bands(1, &lower, &diag, &upper), std::invalid_argument);
}

TEST_CASE("gaussian moment identities hold for random directions") {
  RandomStream rng(0x3a3au, 42);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Vector3d a(rng.gaussian(), rng.gaussian(), rng.gaussian());
    Eigen::Vector3d nr(rng.gaussian(), rng.gaussian(), rng.gaussian());
    if (nr.norm() < 1e-8) nr = Eigen::Vector3d::UnitZ();
    double kBT = 0.5 + rng.uniform();
    auto id = gaussian_moment_identity(a, UnitVector(nr), kBT);
    double s = 1.0 + id.rhs_p.norm() + id.rhs_omega.norm();
    CHECK((id.lhs_p - id.rhs_p).norm() <= 1e-8 * s);
    CHECK((id.lhs_omega - id.rhs_omega).norm() <= 1e-8 * s);
  }
  // Structured directions: A parallel and perpendicular to n.
  UnitVector n(Eigen::Vector3d(0.0, 0.0, 1.0));
  auto par = gaussian_moment_identity(Eigen::Vector3d(0, 0, 2), n, 1.0);
  CHECK(par.lhs_omega.norm() <= 1e-10 * (1.0 + par.rhs_p.norm())); // projected out
  auto perp = gaussian_moment_identity(Eigen::Vector3d(3, 0, 0), n, 1.0);
  CHECK((perp.lhs_omega - perp.lhs_p).norm() <= 1e-8 * perp.lhs_p.norm());
}

} // TEST_SUITE
