#include "polykin/rod_sde.hpp"

#include "polykin/ensemble.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace polykin;
using Eigen::Vector3d;

namespace {

Vector3d random_unit(RandomStream& rng) {
  Vector3d v(rng.gaussian(), rng.gaussian(), rng.gaussian());
  while (v.norm() < 1e-8) v = Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
  return v.normalized();
}

double p2(double c) { return 0.5 * (3.0 * c * c - 1.0); }

} // namespace

TEST_SUITE("rod-sde") {

TEST_CASE("friction torque formula") {
  Eigen::Matrix3d zero = Eigen::Matrix3d::Zero();
  CHECK(friction_torque(Vector3d::UnitX(), Vector3d::Zero(), zero, 2.0).norm() == 0.0);

  // u = (0, gdot*x1, 0): the flow spins e1 toward e2, torque zeta_r*gdot*e3.
  double gdot = 0.9, zeta_r = 1.7;
  Eigen::Matrix3d kappa = Eigen::Matrix3d::Zero();
  kappa(1, 0) = gdot;
  Vector3d t = friction_torque(Vector3d::UnitX(), Vector3d::Zero(), kappa, zeta_r);
  CHECK(t[0] == doctest::Approx(0.0));
  CHECK(t[1] == doctest::Approx(0.0));
  CHECK(t[2] == doctest::Approx(zeta_r * gdot).epsilon(1e-14));

  // A co-rotating rod feels no frictional torque.
  RandomStream rng(21, 0);
  for (int rep = 0; rep < 5; ++rep) {
    Vector3d n = random_unit(rng);
    Eigen::Matrix3d k;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) k(i, j) = rng.gaussian();
    Vector3d omega = n.cross(k * n);
    CHECK(friction_torque(n, omega, k, 1.3).norm() <= 1e-14 * (1.0 + omega.norm()));
  }
}

TEST_CASE("noise-free spin-down: exact exponential decay on a great circle") {
  RodParams par;
  par.epsilon = 1.0;
  par.zeta_r = 0.8;
  par.zeta_t = 1.0;
  par.kBT = 0.0;

  RodState s;
  s.n = Vector3d::UnitX();
  s.omega = 0.7 * Vector3d::UnitZ(); // tangent at e1
  const Vector3d axis0 = s.omega.normalized();
  RandomStream rng(22, 0);
  const double dt = 0.01;
  for (int k = 1; k <= 1000; ++k) {
    step_inertial_rod(s, par, dt, rng);
    double expect = 0.7 * std::exp(-par.zeta_r * k * dt / par.mass());
    CHECK(std::abs(s.omega.norm() - expect) <= 1e-10 * expect + 1e-14);
    CHECK(std::abs(s.n.dot(axis0)) <= 1e-12); // stays on the great circle
    CHECK(std::abs(s.n.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("zero-dt step is the identity") {
  RodParams par;
  par.kBT = 1.3;
  RodState s; // n = e3 exactly
  s.p = Vector3d(0.4, -0.2, 0.1);
  s.omega = Vector3d(0.3, 0.5, 0.0); // tangent at e3
  RodState before = s;
  RandomStream rng(23, 0);
  step_inertial_rod(s, par, 0.0, rng);
  CHECK(s.x == before.x);
  CHECK(s.p == before.p);
  CHECK(s.n == before.n);
  CHECK(s.omega == before.omega);
}

TEST_CASE("constraints survive a million noisy steps") {
  RodParams par;
  par.epsilon = 0.5;
  par.zeta_t = 1.0;
  par.zeta_r = 1.0;
  par.kBT = 1.0;
  par.flow = FlowField::shear(0.5);
  par.potential = [](const Vector3d& n) { return 0.4 * p2(n[2]); };

  RodState s;
  s.n = Vector3d(1.0, 1.0, 0.5).normalized();
  s.omega = Vector3d(0.2, -0.2, 0.0);
  s.omega -= s.omega.dot(s.n) * s.n;
  RandomStream rng(24, 0);
  double worst_norm = 0.0, worst_tan = 0.0;
  for (long k = 0; k < 1000000; ++k) {
    step_inertial_rod(s, par, 0.01, rng);
    worst_norm = std::max(worst_norm, std::abs(s.n.norm() - 1.0));
    worst_tan = std::max(worst_tan, std::abs(s.omega.dot(s.n)));
  }
  CHECK(worst_norm < 1e-8);
  CHECK(worst_tan < 1e-8);
  CHECK(s.is_finite());
}

TEST_CASE("equilibrium equipartition: 3 translational and exactly 2 rotational degrees of freedom") {
  RodParams par;
  par.epsilon = 0.5;
  par.zeta_t = 1.0;
  par.zeta_r = 1.0;
  par.kBT = 0.7;

  const int N = 20000;
  auto ens = Ensemble<RodState>::create(N, 0x10d5u, [](RandomStream&) { return RodState{}; });
  auto step = [&](RodState& s, RandomStream& rng, double dt) {
    step_inertial_rod(s, par, dt, rng);
  };
  simulate_ensemble(ens, 0.025, 2.5, step);

  const double eps2 = par.epsilon * par.epsilon;
  double sq_p = 0.0, sq_w = 0.0, sq_wn = 0.0, nz2 = 0.0;
  for (const auto& s : ens.states) {
    sq_p += eps2 * s.p.squaredNorm();
    sq_w += eps2 * s.omega.squaredNorm();
    sq_wn += eps2 * std::pow(s.omega.dot(s.n), 2);
    nz2 += s.n[2] * s.n[2];
  }
  double var_p = sq_p / (3.0 * N);  // 3 components, variance kBT each
  double var_w = sq_w / (2.0 * N);  // exactly 2 tangent components
  CHECK(std::abs(var_p - par.kBT) < 4.0 * par.kBT * std::sqrt(2.0 / (3.0 * N)));
  CHECK(std::abs(var_w - par.kBT) < 4.0 * par.kBT / std::sqrt(N));
  CHECK(sq_wn / N <= 1e-16); // no variance along n
  CHECK(std::abs(nz2 / N - 1.0 / 3.0) < 0.015); // orientations isotropic
}

TEST_CASE("co-rotating initial data keeps the frictional torque near zero") {
  RodParams par;
  par.epsilon = 0.1;
  par.zeta_r = 1.0;
  par.kBT = 0.0;
  par.flow = FlowField::shear(0.5);

  RodState s;
  s.n = Vector3d(1.0, 1.0, 0.3).normalized();
  s.omega = s.n.cross(par.flow.kappa * s.n);
  RandomStream rng(25, 0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    step_inertial_rod(s, par, 1e-3, rng);
    worst = std::max(
        worst, friction_torque(s.n, s.omega, par.flow.kappa, par.zeta_r).norm());
  }
  CHECK(worst < 0.02 * par.zeta_r * 0.5);
}

TEST_CASE("overdamped orientation decorrelates at the rotational-diffusion rate") {
  RodParams par;
  par.zeta_r = 1.0;
  par.kBT = 1.0; // D_r = 1
  const double Dr = par.rotational_diffusion();

  const int N = 50000;
  auto ens = Ensemble<RodState>::create(N, 0xdecau, [](RandomStream&) { return RodState{}; });
  auto step = [&](RodState& s, RandomStream& rng, double dt) {
    step_overdamped_rod(s, par, dt, rng);
  };
  std::vector<double> times, values;
  std::vector<EnsembleObserver<RodState>> obs;
  for (double t = 0.10; t <= 0.351; t += 0.05) {
    obs.push_back({t, [&](const Ensemble<RodState>& e) {
                     double acc = 0.0;
                     for (const auto& s : e.states) acc += p2(s.n[2]);
                     times.push_back(e.time);
                     values.push_back(acc / e.size());
                   }});
  }
  simulate_ensemble(ens, 5e-3, 0.355, step, obs);

  REQUIRE(times.size() >= 4);
  // Least-squares slope of ln <P2> vs t; exact rate is -6 Dr.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double y = std::log(values[i]);
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
  }
  double m = static_cast<double>(times.size());
  double slope = (m * sty - st * sy) / (m * stt - st * st);
  CHECK(std::abs(-slope - 6.0 * Dr) < 0.05 * 6.0 * Dr);
}

TEST_CASE("overdamped rod with no noise and no flow is frozen") {
  RodParams par;
  par.kBT = 0.0;
  Vector3d x(1.0, 2.0, 3.0), n = Vector3d::UnitX();
  RandomStream rng(26, 0);
  for (int k = 0; k < 100; ++k) step_overdamped_rod(x, n, par, 0.01, rng);
  CHECK(x == Vector3d(1.0, 2.0, 3.0));
  CHECK(n == Vector3d::UnitX());
}

TEST_CASE("rod ensembles are bitwise reproducible across worker counts") {
  RodParams par;
  par.epsilon = 0.4;
  par.kBT = 0.8;
  par.flow = FlowField::shear(0.4);
  auto init = [](RandomStream& rng) {
    RodState s;
    s.n = random_unit(rng);
    return s;
  };
  auto step = [&](RodState& s, RandomStream& rng, double dt) {
    step_inertial_rod(s, par, dt, rng);
  };
  auto a = Ensemble<RodState>::create(64, 0xabcu, init);
  auto b = Ensemble<RodState>::create(64, 0xabcu, init);
  advance_ensemble(a, 30, 0.01, step, 1);
  advance_ensemble(b, 30, 0.01, step, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.states[i].n == b.states[i].n);
    CHECK(a.states[i].omega == b.states[i].omega);
    CHECK(a.states[i].p == b.states[i].p);
  }
}

} // TEST_SUITE
