#pragma once

// Langevin integrators for the elastic dumbbell, in the center-of-mass /
// end-to-end coordinates (x, n) with their velocities (p, q).
//
// Inertial first-order system (m = epsilon^2):
//   x' = p
//   n' = q
//   p' = -(zeta/m) (p - u(x))                + (sqrt(4 kBT zeta)/m) W1'
//   q' = -(zeta/m) (q - kappa n) - (2/m) F(n) + (sqrt(4 kBT zeta)/m) W2'
// Inertia-free reduction:
//   x' = u(x)                 + sqrt(4 kBT / zeta) W1'   [noise optional]
//   n' = kappa n - (2/zeta) F(n) + sqrt(4 kBT / zeta) W2'
//
// Noise amplitudes are always derived from (kBT, zeta); they are never free
// parameters.  The friction+noise part of the inertial system is an exact
// Ornstein-Uhlenbeck update, so the stiff rate zeta/m imposes no step-size
// restriction; dt is limited only by drift accuracy.  Per step and
// trajectory, Gaussian draws are consumed in a fixed documented order
// (p components, then q components; overdamped: x then n), which is part of
// the determinism contract.

#include "polykin/forces.hpp"
#include "polykin/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace polykin {

struct DumbbellParams {
  double epsilon = 1.0; // mass = epsilon^2
  double zeta = 1.0;
  double kBT = 1.0;
  Spring spring = Spring::make_hookean(1.0);
  FlowField flow{};
  // The overdamped x-equation keeps its spatial diffusion by default; the
  // flag zeroes it for runs where spatial spreading is not wanted.
  bool include_x_diffusion = true;

  double mass() const { return epsilon * epsilon; }
};

template <int D = 3>
struct DumbbellState {
  static_assert(D == 2 || D == 3, "dumbbell states are 2- or 3-dimensional");
  using Vec = Eigen::Matrix<double, D, 1>;
  Vec x = Vec::Zero();
  Vec n = Vec::Zero();
  Vec p = Vec::Zero();
  Vec q = Vec::Zero();

  bool is_finite() const {
    return x.allFinite() && n.allFinite() && p.allFinite() && q.allFinite();
  }
};

namespace detail {

inline bool extension_ok(const Spring& spring, double norm) {
  return norm < spring.max_extension() * (1.0 - 1e-9);
}

// One trial step of the Strang splitting: half transport, exact OU on (p, q)
// with targets frozen at the midpoint configuration, half transport.
// Returns false if a FENE extension bound is violated along the way.
template <int D>
bool try_step_inertial(DumbbellState<D>& s, const DumbbellParams& par,
                       double dt, RandomStream& rng) {
  using Vec = typename DumbbellState<D>::Vec;
  const auto kappa = par.flow.kappa.topLeftCorner<D, D>();
  const double m = par.mass();

  s.x += 0.5 * dt * s.p;
  s.n += 0.5 * dt * s.q;
  if (!extension_ok(par.spring, s.n.norm())) return false;

  const Vec target_p = kappa * s.x;
  const Vec target_q = kappa * s.n - (2.0 / par.zeta) * par.spring.force(s.n);
  // 1 - c via expm1 keeps the update exact at dt = 0 and accurate for tiny dt.
  const double em = -std::expm1(-par.zeta * dt / m);
  const double c = 1.0 - em;
  const double sigma = std::sqrt((2.0 * par.kBT / m) * em * (2.0 - em));
  for (int i = 0; i < D; ++i) {
    s.p[i] = s.p[i] * c + em * target_p[i] + sigma * rng.gaussian();
  }
  for (int i = 0; i < D; ++i) {
    s.q[i] = s.q[i] * c + em * target_q[i] + sigma * rng.gaussian();
  }

  s.x += 0.5 * dt * s.p;
  s.n += 0.5 * dt * s.q;
  return extension_ok(par.spring, s.n.norm());
}

template <int D>
bool try_step_overdamped(Eigen::Matrix<double, D, 1>& x,
                         Eigen::Matrix<double, D, 1>& n,
                         const DumbbellParams& par, double dt,
                         RandomStream& rng) {
  using Vec = Eigen::Matrix<double, D, 1>;
  const auto kappa = par.flow.kappa.topLeftCorner<D, D>();
  const double amp = std::sqrt(4.0 * par.kBT / par.zeta) * std::sqrt(dt);
  Vec gx, gn;
  for (int i = 0; i < D; ++i) gx[i] = rng.gaussian();
  for (int i = 0; i < D; ++i) gn[i] = rng.gaussian();
  const Vec drift_n = kappa * n - (2.0 / par.zeta) * par.spring.force(n);
  x += dt * (kappa * x) + (par.include_x_diffusion ? amp : 0.0) * gx;
  n += dt * drift_n + amp * gn;
  return extension_ok(par.spring, n.norm());
}

// Retry policy shared by both integrators: a rejected step is redone from the
// saved state as 2^k substeps with fresh noise, k <= 20.  The random stream
// only ever advances, so paths stay reproducible.
template <class State, class Attempt>
void step_with_extension_guard(State& s, double dt, Attempt attempt) {
  for (int depth = 0; depth <= 20; ++depth) {
    State saved = s;
    long pieces = 1L << depth;
    double h = dt / static_cast<double>(pieces);
    bool ok = true;
    for (long i = 0; i < pieces && ok; ++i) ok = attempt(s, h);
    if (ok) return;
    s = saved;
  }
  throw std::runtime_error(
      "dumbbell step: extension bound still violated after 20 step halvings "
      "(dt underflow)");
}

} // namespace detail

template <int D = 3>
void step_inertial(DumbbellState<D>& s, const DumbbellParams& par, double dt,
                   RandomStream& rng) {
  if (dt < 0.0) throw std::invalid_argument("step_inertial: dt must be >= 0");
  if (!detail::extension_ok(par.spring, s.n.norm())) {
    throw std::invalid_argument("step_inertial: |n| already at the extension bound");
  }
  detail::step_with_extension_guard(
      s, dt, [&](DumbbellState<D>& st, double h) {
        return detail::try_step_inertial(st, par, h, rng);
      });
}

template <int D = 3>
void step_overdamped(Eigen::Matrix<double, D, 1>& x,
                     Eigen::Matrix<double, D, 1>& n,
                     const DumbbellParams& par, double dt, RandomStream& rng) {
  if (dt < 0.0) throw std::invalid_argument("step_overdamped: dt must be >= 0");
  if (!detail::extension_ok(par.spring, n.norm())) {
    throw std::invalid_argument("step_overdamped: |n| already at the extension bound");
  }
  struct XN {
    Eigen::Matrix<double, D, 1> x, n;
  } s{x, n};
  detail::step_with_extension_guard(s, dt, [&](XN& st, double h) {
    return detail::try_step_overdamped<D>(st.x, st.n, par, h, rng);
  });
  x = s.x;
  n = s.n;
}

template <int D = 3>
void step_overdamped(DumbbellState<D>& s, const DumbbellParams& par, double dt,
                     RandomStream& rng) {
  step_overdamped<D>(s.x, s.n, par, dt, rng);
}

// Energy (m/2)|q|^2 + 2 U(n).  Along noise-free, flow-free inertial
// trajectories it decays at rate -zeta |q|^2: the spring force enters the
// q-equation as 2F/m, so the potential energy carries the matching factor
// of two.
template <int D = 3>
double relaxation_energy(const DumbbellState<D>& s, const DumbbellParams& par) {
  return 0.5 * par.mass() * s.q.squaredNorm() + 2.0 * par.spring.potential(s.n);
}

} // namespace polykin
