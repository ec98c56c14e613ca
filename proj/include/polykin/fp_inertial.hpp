#pragma once

// Kinetic solver for the inertial dumbbell in scaled variables, reduced to
// one configuration dimension and spatially homogeneous: f = f(t, n, p, q)
// with connector n in (-R, R), center-of-mass velocity p, and connector
// velocity q, evolving by
//
//   d_t f + (1/eps) [ d_n(q f) + d_p(zeta u f)
//                     + d_q((zeta kappa n - 2 F(n)) f) ] = Q(f) / eps^2,
//   Q(f) = zeta d_p(p f + 2 kBT d_p f) + zeta d_q(q f + 2 kBT d_q f),
//
// whose eps -> 0 limit is the connector equation solved by FeneLimitSolver.
// The reduction keeps every structural ingredient of that limit (transport
// in n, spring drift, the OU collision operator and its Maxwellian) at a
// three-axis grid cost.
//
// Discretization: IMEX with the per-step sequence
//
//   q-collision(dt/2) -> transport(dt, explicit Heun) -> q-collision(dt/2)
//   -> p-collision(dt),
//
// all collision sub-steps implicit (backward Euler on the collision module's
// tridiagonal bands, which annihilate the Maxwellian exactly and conserve
// mass per column).  The q-collision is Strang-wrapped around the transport
// because the deviation feeding the hydrodynamic marginal is odd in q and a
// one-sided pairing leaves an O(h/eps) remainder there; the p-collision
// stays a single post-transport step because backward Euler is exact on the
// stiff steady balance, which reproduces the quasi-steady flux J1 = u rho
// exactly.  Transport faces along n use the linear two-point average
// (preserving the odd/even cancellation over the velocity axis as eps -> 0),
// while the q and p sweeps use minmod-limited upwinding; CFL dt is
// proportional to eps * h.  Transport fluxes are written in ratio form
// w = f / (rho_inf(n) M(p) M(q)) with exponentially fitted face velocities
//
//   q_fit(k) = -2 kBT [M(q_{k+1/2}) - M(q_{k-1/2})] / (h_q M(q_k)),
//   b_fit(i) = +2 kBT [rho_inf(n_{i+1/2}) - rho_inf(n_{i-1/2})] / (h_n rho_inf(n_i)),
//
// which converge to q and -2F(n) at second order while making the discrete
// transport divergence vanish identically on the equilibrium product
// rho_inf M (the n-flux and q-flux differences cancel cell by cell; the
// equilibrium weight is taken as zero on the outermost faces so the identity
// also holds in the wall cells).  Together with the collision stage this
// keeps the discrete equilibrium stationary to rounding and the total mass
// exact.  All boundaries are zero-flux.

#include "polykin/collision.hpp"
#include "polykin/fp_fene.hpp"
#include "polykin/forces.hpp"

#include <Eigen/Dense>

namespace polykin {

struct InertialReducedParams {
  Spring spring = Spring::make_hookean(1.0);
  double zeta = 1.0;
  double kBT = 1.0;
  double kappa = 0.0; // velocity gradient du/dx at the dumbbell (scalar, d=1)
  double u = 0.0;     // constant fluid velocity; drives the p drift
  double cfl = 0.4;
};

// Tensor grid (n, p, q): a d=1 BallGrid interval for the connector and one
// uniform VelocityAxis per velocity variable.  The velocity half-width must
// be at least 6 sqrt(2 kBT) (enforced by the collision module).
struct ReducedInertialGrid {
  BallGrid connector;
  VelocityAxis p, q;

  static ReducedInertialGrid make(int n_connector, double half_width,
                                  int n_velocity, double vmax) {
    return {BallGrid::interval(n_connector, half_width),
            VelocityAxis(n_velocity, vmax), VelocityAxis(n_velocity, vmax)};
  }

  int size() const { return connector.nr * p.n * q.n; }
  int flat(int i, int j, int k) const { return (i * p.n + j) * q.n + k; }
  double cell_volume() const { return connector.hr() * p.h * q.h; }
};

class ReducedInertialSolver {
 public:
  ReducedInertialSolver(ReducedInertialGrid grid, InertialReducedParams par,
                        double epsilon);

  const ReducedInertialGrid& grid() const { return grid_; }
  const InertialReducedParams& params() const { return par_; }
  double epsilon() const { return eps_; }

  // Normalized stationary product rho_inf(n) M(p, q); exactly invariant
  // under advance() with kappa = 0 and u = 0.
  Eigen::VectorXd equilibrium() const;
  double mass(const Eigen::VectorXd& f) const;

  // Advance by t_span.  dt_target = 0 uses the transport CFL limit; larger
  // requests are clipped to it.  Densities below -1e-12 (relative to the
  // maximum) abort with std::runtime_error.
  void advance(Eigen::VectorXd& f, double t_span, double dt_target = 0.0) const;

 private:
  void transport_tendency(const Eigen::VectorXd& w, Eigen::VectorXd& out) const;
  void check_positive(const Eigen::VectorXd& f) const;

  ReducedInertialGrid grid_;
  InertialReducedParams par_;
  double eps_;
  CollisionOperator collide_; // shares the (p, q) Maxwellian stencils
  Eigen::VectorXd lp_lo_, lp_di_, lp_up_; // p-axis collision bands
  Eigen::VectorXd lq_lo_, lq_di_, lq_up_; // q-axis collision bands
  Eigen::VectorXd rho_c_, rho_f_;         // e^{-U/kBT} centers / faces
  Eigen::VectorXd mp_c_, mp_f_;           // M(p) centers / faces
  Eigen::VectorXd mq_c_, mq_f_;           // M(q) centers / faces
  Eigen::VectorXd qfit_;  // fitted n-transport velocity per q cell
  Eigen::VectorXd drift_; // fitted spring drift plus zeta*kappa*n, per n cell
  Eigen::VectorXd equilibrium_; // unnormalized product at centers
};

Eigen::VectorXd solve_inertial_reduced(const Eigen::VectorXd& f0,
                                       const ReducedInertialGrid& grid,
                                       const InertialReducedParams& par,
                                       double epsilon, double t_final,
                                       double dt_target = 0.0);

// Scaled velocity moments: rho(n) = int f dp dq, J1(n) = (1/eps) int p f,
// J2(n) = (1/eps) int q f (midpoint sums on the velocity grid).
struct FluxMoments {
  Eigen::VectorXd rho, J1, J2;
};
FluxMoments flux_moments(const Eigen::VectorXd& f,
                         const ReducedInertialGrid& grid, double epsilon);

} // namespace polykin
