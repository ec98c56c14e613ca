#pragma once

// Deterministic solvers for the inertia-free dumbbell density on the
// connector domain,
//   d_t rho + div_n( (kappa n - (2/zeta) F(n)) rho ) = (2 kBT/zeta) Lap_n rho,
// spatially homogeneous by default, on
//   d=1: the interval (-R, R),
//   d=2: the polar disk |n| < R,
// with zero normal flux at |n| = R.  For a FENE spring R must equal the
// finite extensibility n0 (the drift is inward-singular there, so equilibrium
// mass vanishes at the wall); for Hookean springs R truncates the Gaussian
// at several thermal widths.
//
// The potential drift and the diffusion are discretized together in
// Gibbs-weighted flux form,
//   flux = D * rho_inf(face) * d/dn ( rho / rho_inf ),  rho_inf = e^{-U/kBT},
// so the discrete kappa=0 steady state is exactly the normalized Gibbs
// density (well-balanced; cell values are exact Gibbs cell averages, so the
// steady cell masses match the analytic ones).  Each step is a palindromic
// split: Crank-Nicolson diffusion half-steps around an explicit Heun
// advection step (limited second-order upwinding), second order in dt
// overall.  dt obeys the advective CFL limit and an accuracy cap
// cfl*h/sqrt(D) that keeps the temporal error at the order of the spatial
// truncation even when advection is absent.
//
// An optional one-dimensional periodic-in-x mode couples a prescribed shear
// profile u(x) = amplitude * sin(2 pi x / length) to the d=1 connector
// coordinate and exercises the div_x(u rho) and Lap_x rho terms.

#include "polykin/forces.hpp"

#include <Eigen/Dense>

namespace polykin {

// Tensor grid on the connector ball.  d=1 is a signed interval (the cheap
// companion used for inertial-limit sweeps); d=2 is radial x angular.
struct BallGrid {
  static BallGrid interval(int n_cells, double half_width);
  static BallGrid disk(int n_r, int n_phi, double radius);

  int dim = 1;
  int nr = 0;    // cells along the (signed, d=1) radial coordinate
  int nphi = 1;  // angular cells (d=2)
  double radius = 1.0;

  double hr() const { return dim == 1 ? 2.0 * radius / nr : radius / nr; }
  double hphi() const { return 2.0 * M_PI / nphi; }
  // d=1: signed coordinate of cell i; d=2: radius of ring i.
  double r_center(int i) const {
    return dim == 1 ? -radius + (i + 0.5) * hr() : (i + 0.5) * hr();
  }
  double r_face(int i) const {
    return dim == 1 ? -radius + i * hr() : i * hr();
  }
  double phi_center(int j) const { return (j + 0.5) * hphi(); }
  int size() const { return nr * nphi; }
  int flat(int i, int j = 0) const { return i * nphi + j; }
  // Exact cell measure (length / annular sector area).
  double cell_measure(int i) const {
    if (dim == 1) return hr();
    double ri = r_face(i), ro = r_face(i + 1);
    return 0.5 * (ro * ro - ri * ri) * hphi();
  }
};

struct FeneLimitParams {
  Spring spring = Spring::make_hookean(1.0);
  double zeta = 1.0;
  double kBT = 1.0;
  // Velocity gradient acting on the connector (d=2 uses the full block,
  // d=1 only kappa(0,0)).
  Eigen::Matrix2d kappa = Eigen::Matrix2d::Zero();
  double cfl = 0.4;

  double diffusion() const { return 2.0 * kBT / zeta; }
};

class FeneLimitSolver {
 public:
  FeneLimitSolver(BallGrid grid, FeneLimitParams par);

  const BallGrid& grid() const { return grid_; }
  const FeneLimitParams& params() const { return par_; }

  // Normalized kappa=0 steady state (pointwise Gibbs density).
  Eigen::VectorXd equilibrium() const;

  double mass(const Eigen::VectorXd& rho) const;

  // Advance by t_span.  dt_target <= 0 lets the advective CFL limit pick the
  // step (one implicit step if there is no advection).  Aborts if rho drops
  // below -1e-12 * max(1, |rho|_inf).
  void advance(Eigen::VectorXd& rho, double t_span, double dt_target = 0.0) const;

 private:
  void step(Eigen::VectorXd& rho, double dt) const;
  void advect(Eigen::VectorXd& rho, double dt) const;
  void diffuse_radial(Eigen::VectorXd& rho, double dt) const;
  void diffuse_angular(Eigen::VectorXd& rho, double dt) const;
  double cfl_dt() const;
  void check_positive(const Eigen::VectorXd& rho) const;

  BallGrid grid_;
  FeneLimitParams par_;
  Eigen::VectorXd gibbs_center_; // e^{-U/kBT} at cell centers (radial profile)
  Eigen::VectorXd gibbs_face_;   // at interior radial faces
};

// One-shot convenience wrapper around the class.
Eigen::VectorXd solve_fene_limit(const Eigen::VectorXd& rho0,
                                 const BallGrid& grid,
                                 const FeneLimitParams& par, double t_final,
                                 double dt_target = 0.0);

// Prescribed periodic shear profile u(x) = amplitude * sin(2 pi x / length).
struct PeriodicFlowProfile {
  double length = 2.0 * M_PI;
  double amplitude = 0.0;
  double u(double x) const {
    return amplitude * std::sin(2.0 * M_PI * x / length);
  }
  double du(double x) const {
    return amplitude * (2.0 * M_PI / length) *
           std::cos(2.0 * M_PI * x / length);
  }
};

// Periodic-in-x variant on (x, n) in [0, L) x (-R, R):
//   d_t rho + d_x(u rho) + d_n((u'(x) n - (2/zeta) F) rho)
//     = (2 kBT/zeta) (d_xx + d_nn) rho.
// Same well-balanced treatment in n; x handled by limited upwinding plus a
// periodic implicit diffusion solve.
class PeriodicFeneLimitSolver {
 public:
  PeriodicFeneLimitSolver(int n_x, BallGrid interval, PeriodicFlowProfile flow,
                          FeneLimitParams par);

  int nx() const { return nx_; }
  const BallGrid& connector_grid() const { return grid_; }
  double x_center(int i) const { return (i + 0.5) * flow_.length / nx_; }

  // rho is nx x nr (row: x cell, column: connector cell).
  Eigen::MatrixXd uniform_equilibrium() const; // x-uniform Gibbs density
  double mass(const Eigen::MatrixXd& rho) const;
  Eigen::VectorXd x_marginal(const Eigen::MatrixXd& rho) const;
  void advance(Eigen::MatrixXd& rho, double t_span, double dt_target = 0.0) const;

 private:
  void step(Eigen::MatrixXd& rho, double dt) const;
  double cfl_dt() const;

  int nx_;
  BallGrid grid_;
  PeriodicFlowProfile flow_;
  FeneLimitParams par_;
  Eigen::VectorXd gibbs_center_, gibbs_face_;
};

} // namespace polykin
