#pragma once

// Langevin integrators for the rigid rod: translational law in (x, p) and
// rotational law on the tangent bundle of the sphere,
//   n' = omega x n,     m omega' = -zeta_r (omega - n x (kappa n)) - R U + noise,
//   x' = p,             m p'     = -zeta_t (p - u(x))              + noise,
// with m = epsilon^2 and R the rotational gradient n x grad.  The geometric
// factor L^2/12 of the rod's moment of inertia is absorbed into zeta_r and U
// (the parameters below are the absorbed quantities; L is bookkeeping only).
//
// Noise amplitudes follow the same fluctuation-dissipation pattern as the
// dumbbell, but with stationary variance kBT per velocity component (not
// 2 kBT): translational sqrt(2 kBT zeta_t)/m per component, rotational
// sqrt(2 kBT zeta_r)/m per tangent component, realized by projecting an
// isotropic 3D Gaussian onto the tangent plane at n.  Gaussian draws per
// step: p components, then the raw rotational triple (overdamped: x, then
// the raw triple) - the order is part of the determinism contract.
//
// Constraints |n| = 1 and omega . n = 0 are maintained by renormalizing and
// reprojecting after every step (drift per step is O(dt^2)).

#include "polykin/forces.hpp"
#include "polykin/geometry.hpp"
#include "polykin/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace polykin {

struct RodParams {
  double epsilon = 1.0; // mass = epsilon^2
  double zeta_t = 1.0;
  double zeta_r = 1.0; // rotational friction with L^2/12 absorbed
  double kBT = 1.0;
  double L = 1.0; // rod length; not used by the absorbed-units dynamics
  FlowField flow{};
  // Orientation potential U(n); empty means U = 0.  Spatial dependence of U
  // is not supported (its x-force slot is identically zero here).
  std::function<double(const Eigen::Vector3d&)> potential;

  double mass() const { return epsilon * epsilon; }
  double rotational_diffusion() const { return kBT / zeta_r; }
  double translational_diffusion() const { return kBT / zeta_t; }
};

struct RodState {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Eigen::Vector3d n = Eigen::Vector3d::UnitZ(); // |n| = 1
  Eigen::Vector3d omega = Eigen::Vector3d::Zero(); // omega . n = 0

  bool is_finite() const {
    return x.allFinite() && p.allFinite() && n.allFinite() &&
           omega.allFinite();
  }
};

// T = -zeta_r (omega - n x (kappa n)).  With omega tangent the projector
// (Id - n n^T) on the omega term is redundant, so it is not applied.
inline Eigen::Vector3d friction_torque(const Eigen::Vector3d& n,
                                       const Eigen::Vector3d& omega,
                                       const Eigen::Matrix3d& kappa,
                                       double zeta_r) {
  return -zeta_r * (omega - n.cross(kappa * n));
}

namespace detail {

// Exact great-circle motion for n' = omega x n with omega frozen (omega is
// tangent, so the Rodrigues term along the axis vanishes).
inline void rotate_by_omega(Eigen::Vector3d& n, const Eigen::Vector3d& omega,
                            double dt) {
  double w = omega.norm();
  double angle = w * dt;
  if (angle == 0.0) return;
  Eigen::Vector3d axis = omega / w;
  n = std::cos(angle) * n + std::sin(angle) * axis.cross(n);
}

inline Eigen::Vector3d rod_potential_torque(const RodParams& par,
                                            const Eigen::Vector3d& n) {
  if (!par.potential) return Eigen::Vector3d::Zero();
  return rotational_gradient(par.potential, UnitVector(n));
}

} // namespace detail

// Strang splitting: half transport (x along p, n along the exact rotation),
// exact OU update of (p, omega) with frozen targets
//   p -> u(x),   omega -> n x (kappa n) - (1/zeta_r) R U(n),
// half transport, then renormalize n and reproject omega.
inline void step_inertial_rod(RodState& s, const RodParams& par, double dt,
                              RandomStream& rng) {
  if (dt < 0.0) throw std::invalid_argument("step_inertial_rod: dt must be >= 0");
  const double m = par.mass();
  const Eigen::Matrix3d& kappa = par.flow.kappa;

  s.x += 0.5 * dt * s.p;
  detail::rotate_by_omega(s.n, s.omega, 0.5 * dt);
  s.omega -= s.omega.dot(s.n) * s.n;

  const Eigen::Vector3d target_p = kappa * s.x;
  const Eigen::Vector3d target_w =
      s.n.cross(kappa * s.n) - detail::rod_potential_torque(par, s.n) / par.zeta_r;
  // 1 - c via expm1 keeps the update exact at dt = 0 and accurate for tiny dt.
  const double em_t = -std::expm1(-par.zeta_t * dt / m);
  const double em_r = -std::expm1(-par.zeta_r * dt / m);
  const double sig_t = std::sqrt((par.kBT / m) * em_t * (2.0 - em_t));
  const double sig_r = std::sqrt((par.kBT / m) * em_r * (2.0 - em_r));
  Eigen::Vector3d gp, gw;
  for (int i = 0; i < 3; ++i) gp[i] = rng.gaussian();
  for (int i = 0; i < 3; ++i) gw[i] = rng.gaussian();
  s.p = s.p * (1.0 - em_t) + em_t * target_p + sig_t * gp;
  Eigen::Vector3d gw_tan = gw - gw.dot(s.n) * s.n;
  s.omega = s.omega * (1.0 - em_r) + em_r * target_w + sig_r * gw_tan;

  s.x += 0.5 * dt * s.p;
  detail::rotate_by_omega(s.n, s.omega, 0.5 * dt);

  s.n.normalize();
  s.omega -= s.omega.dot(s.n) * s.n;
}

// Sphere-constrained Euler-Maruyama for the inertia-free rod: angular drift
// omega_d = n x (kappa n) - (1/zeta_r) R U, rotational diffusion
// D_r = kBT/zeta_r realized as a tangent-projected Gaussian increment
// followed by renormalization (which supplies the Ito curvature correction),
// translational diffusion D_t = kBT/zeta_t.
inline void step_overdamped_rod(Eigen::Vector3d& x, Eigen::Vector3d& n,
                                const RodParams& par, double dt,
                                RandomStream& rng) {
  if (dt < 0.0) throw std::invalid_argument("step_overdamped_rod: dt must be >= 0");
  const Eigen::Matrix3d& kappa = par.flow.kappa;
  Eigen::Vector3d gx, gn;
  for (int i = 0; i < 3; ++i) gx[i] = rng.gaussian();
  for (int i = 0; i < 3; ++i) gn[i] = rng.gaussian();

  x += dt * (kappa * x) +
       std::sqrt(2.0 * par.translational_diffusion() * dt) * gx;

  const Eigen::Vector3d omega_d =
      n.cross(kappa * n) - detail::rod_potential_torque(par, n) / par.zeta_r;
  Eigen::Vector3d gn_tan = gn - gn.dot(n) * n;
  n += dt * omega_d.cross(n) +
       std::sqrt(2.0 * par.rotational_diffusion() * dt) * gn_tan;
  n.normalize();
}

inline void step_overdamped_rod(RodState& s, const RodParams& par, double dt,
                                RandomStream& rng) {
  step_overdamped_rod(s.x, s.n, par, dt, rng);
}

} // namespace polykin
