#include "doctest.h"

#include "polykin/fp_doi.hpp"

#include <cmath>

using namespace polykin;

TEST_SUITE("fp-doi") {

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(DoiSolver(1, DoiParams{}), std::invalid_argument);
  DoiParams bad;
  bad.zeta_r = 0.0;
  CHECK_THROWS_AS(DoiSolver(8, bad), std::invalid_argument);
  bad = DoiParams{};
  bad.external_potential = Eigen::VectorXd::Zero(7); // wrong coefficient count
  CHECK_THROWS_AS(DoiSolver(8, bad), std::invalid_argument);

  DoiSolver solver(8, DoiParams{});
  Eigen::VectorXd wrong = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(solver.advance(wrong, 1.0), std::invalid_argument);
  Eigen::VectorXd c = solver.uniform();
  CHECK_THROWS_AS(solver.advance(c, -1.0), std::invalid_argument);
}

TEST_CASE("uniform density is invariant") {
  SUBCASE("free rotational diffusion") {
    DoiSolver solver(12, DoiParams{});
    Eigen::VectorXd c = solver.uniform();
    const Eigen::VectorXd c0 = c;
    solver.advance(c, 2.0);
    CHECK((c - c0).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("rigid rotation flow") {
    DoiParams par;
    par.kappa = FlowField::planar_rotation(1.3).kappa;
    DoiSolver solver(12, par);
    Eigen::VectorXd c = solver.uniform();
    const Eigen::VectorXd c0 = c;
    solver.advance(c, 1.0, 0.01);
    CHECK((c - c0).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("harmonics decay at the rotational-diffusion rates") {
  DoiParams par;
  par.kBT = 0.9;
  par.zeta_r = 1.8; // Dr = 0.5
  const double dr = par.rotational_diffusion();
  DoiSolver solver(16, par);

  Eigen::VectorXd c = solver.uniform();
  const double a2 = 0.11, a4 = 0.05;
  c[SphericalHarmonics::index(2, 0)] = a2;
  c[SphericalHarmonics::index(4, 3)] = a4;
  const double t = 0.37;
  solver.advance(c, t);

  const double c2 = c[SphericalHarmonics::index(2, 0)];
  const double c4 = c[SphericalHarmonics::index(4, 3)];
  // headline tolerance of the decay example, and the spectral one at lmax=16
  CHECK(std::abs(c2 / (a2 * std::exp(-6.0 * dr * t)) - 1.0) < 1e-3);
  CHECK(std::abs(c2 - a2 * std::exp(-6.0 * dr * t)) < 1e-8);
  CHECK(std::abs(c4 - a4 * std::exp(-20.0 * dr * t)) < 1e-8);
  CHECK(solver.mass(c) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rigid rotation advects the harmonics exactly") {
  const double w = 1.5, t = 0.2;
  DoiParams par;
  par.zeta_r = 2.0; // Dr = 0.5
  par.kappa = FlowField::planar_rotation(w).kappa;
  const double dr = par.rotational_diffusion();
  DoiSolver solver(12, par);

  Eigen::VectorXd c = solver.uniform();
  struct Mode { int l, m; double a_cos, a_sin; };
  const Mode modes[] = {{1, 1, 0.08, -0.03}, {2, 2, 0.12, 0.05}};
  for (const Mode& md : modes) {
    c[SphericalHarmonics::index(md.l, md.m)] = md.a_cos;
    c[SphericalHarmonics::index(md.l, -md.m)] = md.a_sin;
  }
  solver.advance(c, t, 0.002);

  for (const Mode& md : modes) {
    CAPTURE(md.l);
    const double damp = std::exp(-md.l * (md.l + 1.0) * dr * t);
    const double alpha = md.m * w * t;
    const double want_cos =
        damp * (md.a_cos * std::cos(alpha) - md.a_sin * std::sin(alpha));
    const double want_sin =
        damp * (md.a_cos * std::sin(alpha) + md.a_sin * std::cos(alpha));
    CHECK(c[SphericalHarmonics::index(md.l, md.m)] ==
          doctest::Approx(want_cos).epsilon(1e-4));
    CHECK(c[SphericalHarmonics::index(md.l, -md.m)] ==
          doctest::Approx(want_sin).epsilon(1e-4));
  }
}

TEST_CASE("external potential drives the Gibbs steady state") {
  const double s = 1.2; // U = -s kBT P2(cos theta)
  DoiParams par;
  par.kBT = 0.8;
  par.external_potential = Eigen::VectorXd::Zero(17 * 17);
  par.external_potential[SphericalHarmonics::index(2, 0)] =
      -s * par.kBT * std::sqrt(4.0 * M_PI / 5.0);
  DoiSolver solver(16, par);

  Eigen::VectorXd c = solver.uniform();
  solver.advance(c, 5.0);
  CHECK(solver.mass(c) == doctest::Approx(1.0).epsilon(1e-14));

  const SphereQuadrature& g = solver.sht().grid();
  const Eigen::MatrixXd rho = solver.sht().synthesize(c);
  double z = 0.0;
  for (int i = 0; i < g.n_theta(); ++i) {
    const double ct = g.cos_theta(i);
    const double gibbs = std::exp(s * 0.5 * (3.0 * ct * ct - 1.0));
    for (int j = 0; j < g.n_phi(); ++j) z += g.weight(i, j) * gibbs;
  }
  double max_err = 0.0;
  for (int i = 0; i < g.n_theta(); ++i) {
    const double ct = g.cos_theta(i);
    const double gibbs = std::exp(s * 0.5 * (3.0 * ct * ct - 1.0)) / z;
    for (int j = 0; j < g.n_phi(); ++j)
      max_err = std::max(max_err, std::abs(rho(i, j) - gibbs));
  }
  CHECK(max_err < 1e-6);
  CHECK(solver.order_parameter(c) > 0.1);
  CHECK(solver.second_moment(c).trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(solver.fixed_point_residual(c) < 1e-6);
}

TEST_CASE("entropy decreases under free rotational diffusion") {
  DoiSolver solver(14, DoiParams{});
  // positive, smooth, non-equilibrium start
  const SphereQuadrature& g = solver.sht().grid();
  Eigen::MatrixXd rho0(g.n_theta(), g.n_phi());
  double z = 0.0;
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) {
      const Eigen::Vector3d n = g.node(i, j);
      rho0(i, j) = std::exp(1.5 * n[2] * n[2] + 0.7 * n[0]);
      z += g.weight(i, j) * rho0(i, j);
    }
  Eigen::VectorXd c = solver.sht().analyze(rho0 / z);

  double h_prev = solver.entropy(c);
  for (int chunk = 0; chunk < 25; ++chunk) {
    solver.advance(c, 0.05);
    const double h = solver.entropy(c);
    CHECK(h <= h_prev + 1e-12);
    h_prev = h;
  }
  // long-time limit is the uniform density with entropy -log(4 pi)
  solver.advance(c, 10.0);
  CHECK(solver.entropy(c) ==
        doctest::Approx(-std::log(4.0 * M_PI)).epsilon(1e-10));
}

TEST_CASE("excluded-volume sweep crosses the isotropic-nematic transition") {
  const double alphas[] = {6.0, 8.0, 8.5, 9.0, 9.5, 10.0, 11.0, 12.0};
  double s_prev = -1.0;
  double onset = 0.0;
  for (double alpha : alphas) {
    CAPTURE(alpha);
    DoiParams par;
    par.onsager_strength = alpha;
    DoiSolver solver(20, par);
    Eigen::VectorXd start = solver.uniform();
    start[SphericalHarmonics::index(2, 0)] = 0.45; // nematic-biased
    double residual = 0.0;
    int iterations = 0;
    const Eigen::VectorXd steady =
        solver.self_consistent_steady(start, 400, 0.7, &residual, &iterations);
    CHECK(residual < 1e-4);
    CHECK(solver.mass(steady) == doctest::Approx(1.0).epsilon(1e-12));
    const double s = solver.order_parameter(steady);
    CHECK(s >= s_prev - 1e-6); // order grows with concentration
    if (onset == 0.0 && s > 0.3) onset = alpha;
    s_prev = s;
  }
  CHECK(s_prev > 0.4);   // clearly nematic at the top of the sweep
  CHECK(onset > 6.0);    // and clearly isotropic at the bottom
  MESSAGE("isotropic-nematic onset observed near alpha = " << onset);
}

TEST_CASE("shear conserves mass and builds alignment") {
  DoiParams par;
  par.kappa = FlowField::shear(0.8).kappa;
  DoiSolver solver(12, par);
  Eigen::VectorXd c = solver.uniform();
  const double m0 = solver.mass(c);
  solver.advance(c, 0.8);
  CHECK(solver.mass(c) == m0); // the l=0 mode is never touched
  CHECK(solver.order_parameter(c) > 1e-3);
  const Eigen::VectorXd out = solve_doi_limit(c, 12, par, 0.0);
  CHECK((out - c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("periodic mode rejects a homogeneous velocity gradient") {
  DoiParams par;
  par.kappa = FlowField::shear(0.5).kappa;
  CHECK_THROWS_AS(PeriodicDoiSolver(16, 8, PeriodicFlowProfile{}, par),
                  std::invalid_argument);
}

TEST_CASE("periodic mode with zero amplitude matches the homogeneous solver") {
  PeriodicFlowProfile flow; // amplitude 0
  PeriodicDoiSolver periodic(16, 10, flow, DoiParams{});
  DoiSolver homogeneous(10, DoiParams{});

  Eigen::VectorXd c0 = homogeneous.uniform();
  c0[SphericalHarmonics::index(2, 1)] = 0.07;
  c0[SphericalHarmonics::index(3, -2)] = -0.04;

  Eigen::MatrixXd state(16, homogeneous.n_coeffs());
  for (int i = 0; i < 16; ++i) state.row(i) = c0.transpose() / flow.length;

  periodic.advance(state, 0.6);
  Eigen::VectorXd ref = c0;
  homogeneous.advance(ref, 0.6);
  for (int i = 0; i < 16; ++i)
    CHECK((state.row(i) * flow.length - ref.transpose()).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("periodic x marginal follows the closed advection-diffusion equation") {
  const int nx = 48, lmax = 8;
  PeriodicFlowProfile flow;
  flow.amplitude = 0.8;
  DoiParams par; // Dt = kBT / zeta_t = 1
  PeriodicDoiSolver solver(nx, lmax, flow, par);

  Eigen::MatrixXd state = solver.uniform();
  for (int i = 0; i < nx; ++i)
    state.row(i) *= 1.0 + 0.5 * std::sin(2.0 * M_PI * solver.x_center(i) /
                                         flow.length);
  const double mass0 = solver.mass(state);
  const double t_final = 0.4;
  solver.advance(state, t_final);
  CHECK(std::abs(solver.mass(state) - mass0) < 1e-12);

  // independent fine-grid reference for d_t m + d_x(u m) = Dt d_xx m
  // (nf a multiple of nx so fine cells tile coarse ones exactly)
  const int nf = 768;
  const double hx = flow.length / nf, d = par.translational_diffusion();
  Eigen::VectorXd m(nf), mn(nf);
  for (int i = 0; i < nf; ++i)
    m[i] = (1.0 + 0.5 * std::sin(2.0 * M_PI * (i + 0.5) * hx / flow.length)) /
           flow.length;
  const double dt = 0.2 * hx * hx / (2.0 * d);
  const long steps = static_cast<long>(std::ceil(t_final / dt));
  const double dtf = t_final / steps;
  for (long s = 0; s < steps; ++s) {
    for (int i = 0; i < nf; ++i) {
      const int ip = (i + 1) % nf, im = (i + nf - 1) % nf;
      const double flux_hi = flow.u((i + 1) * hx) * 0.5 * (m[i] + m[ip]);
      const double flux_lo = flow.u(i * hx) * 0.5 * (m[im] + m[i]);
      mn[i] = m[i] - dtf * (flux_hi - flux_lo) / hx +
              dtf * d * (m[ip] - 2.0 * m[i] + m[im]) / (hx * hx);
    }
    m.swap(mn);
  }
  const int ratio = nf / nx;
  const Eigen::VectorXd marginal = solver.x_marginal(state);
  double l1 = 0.0;
  for (int i = 0; i < nx; ++i)
    l1 += std::abs(marginal[i] - m.segment(i * ratio, ratio).mean()) *
          (flow.length / nx);
  CHECK(l1 < 5e-3);

  // the local velocity gradient tilts the orientation density
  double s_max = 0.0;
  for (int i = 0; i < nx; ++i)
    s_max = std::max(
        s_max, solver.local().order_parameter(state.row(i).transpose()));
  CHECK(s_max > 0.01);
}

} // TEST_SUITE
