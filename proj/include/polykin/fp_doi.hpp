#pragma once

// Spectral solver for the inertia-free rod orientation density on the unit
// sphere,
//   d_t rho + R.( (n x (kappa n)) rho ) = Dr R.( R rho + rho R U / kBT ),
// with R the rotational gradient, Dr = kBT / zeta_r, and U either a fixed
// external potential or the Onsager excluded-volume mean field
//   U[rho](n) = strength * kBT * int |n x n'| rho(n') dn'.
//
// The state is the vector of real spherical-harmonic coefficients of rho.
// Purely diffusive advances use the exact per-mode decay e^{-l(l+1) Dr t}.
// With flow or a potential the full tendency -- advection and potential
// drift evaluated pseudo-spectrally on a quadrature grid that dealiases the
// quadratic products exactly, plus the diagonal diffusion term -- is
// integrated unsplit with a strong-stability-preserving third-order
// Runge-Kutta scheme, whose fixed points are exactly the zeros of the
// tendency: steady states carry no splitting or time-step bias.  The l=0
// mode is untouched, so mass is conserved to machine precision.
//
// An optional periodic-in-x mode advects the density with a prescribed
// profile u(x) = amplitude * sin(2 pi x / length) along x, couples the local
// velocity gradient u'(x) e1 (x) e1 into the rotational drift, and adds
// translational diffusion Dt = kBT / zeta_t; it exercises the div_x(u rho)
// and Lap_x terms dropped in the homogeneous form.

#include "polykin/forces.hpp"
#include "polykin/fp_fene.hpp" // PeriodicFlowProfile
#include "polykin/sht.hpp"

#include <Eigen/Dense>

#include <optional>

namespace polykin {

// The transform owns the Gauss-Legendre x uniform product grid; coefficient
// vectors up to lmax are the working representation of sphere densities.
using SphereGrid = SphericalHarmonics;

struct DoiParams {
  double kBT = 1.0;
  double zeta_r = 1.0; // rotational friction; Dr = kBT / zeta_r
  double zeta_t = 1.0; // translational friction (periodic-in-x mode only)
  Eigen::Matrix3d kappa = Eigen::Matrix3d::Zero();
  // Mean-field strength alpha in U = alpha kBT |n x n'| * rho (0 disables).
  double onsager_strength = 0.0;
  // Coefficients of a fixed external potential U(n) (energy units); empty
  // disables.
  Eigen::VectorXd external_potential;
  double cfl = 0.4;

  double rotational_diffusion() const { return kBT / zeta_r; }
  double translational_diffusion() const { return kBT / zeta_t; }
};

class DoiSolver {
 public:
  DoiSolver(int lmax, DoiParams par);

  const SphereGrid& sht() const { return sht_; }
  int lmax() const { return sht_.lmax(); }
  int n_coeffs() const { return sht_.n_coeffs(); }
  const DoiParams& params() const { return par_; }

  // Coefficients of the uniform density 1/(4 pi) (unit mass).
  Eigen::VectorXd uniform() const;
  double mass(const Eigen::VectorXd& coeffs) const;

  void advance(Eigen::VectorXd& coeffs, double t_span,
               double dt_target = 0.0) const;

  // Quadrature entropy int rho ln rho (density clipped at 1e-300).
  double entropy(const Eigen::VectorXd& coeffs) const;

  // Second orientation moment int (n (x) n) rho dn.
  Eigen::Matrix3d second_moment(const Eigen::VectorXd& coeffs) const;
  // Uniaxial order parameter S = (3 lambda_max(M2/mass) - 1) / 2.
  double order_parameter(const Eigen::VectorXd& coeffs) const;

  // Coefficients of U_total / kBT for the given density coefficients.
  Eigen::VectorXd potential_over_kBT(const Eigen::VectorXd& coeffs) const;

  // Damped fixed-point iteration for the self-consistent steady state
  // rho = exp(-U[rho]/kBT) / Z.  Returns the converged coefficients; the
  // optional outputs receive the final fixed-point residual (quadrature L1
  // distance between rho and the normalized Gibbs map) and iteration count.
  Eigen::VectorXd self_consistent_steady(const Eigen::VectorXd& start,
                                         int max_iter = 300,
                                         double mixing = 0.7,
                                         double* residual = nullptr,
                                         int* iterations = nullptr) const;
  double fixed_point_residual(const Eigen::VectorXd& coeffs) const;

  // Non-diffusive right-hand side (flow advection + potential drift) for an
  // explicitly supplied velocity gradient; used by the periodic-in-x driver
  // and handy for operator-level tests.
  Eigen::VectorXd rotational_tendency(const Eigen::VectorXd& coeffs,
                                      const Eigen::Matrix3d& kappa) const;
  // Stability bound of the explicit advection/potential stage for that
  // velocity gradient; advance() separately caps the step with the explicit
  // diffusion limit 2 / (Dr lmax (lmax+1)).
  double stable_dt(const Eigen::VectorXd& coeffs,
                   const Eigen::Matrix3d& kappa) const;

 private:
  Eigen::VectorXd tendency(const Eigen::VectorXd& coeffs) const;
  void diffuse(Eigen::VectorXd& coeffs, double t) const;

  SphericalHarmonics sht_;
  DoiParams par_;
  std::optional<OnsagerPotential> onsager_;
  bool has_potential_ = false;
  bool has_flow_ = false;
};

Eigen::VectorXd solve_doi_limit(const Eigen::VectorXd& rho0_coeffs, int lmax,
                                const DoiParams& par, double t_final,
                                double dt_target = 0.0);

// Periodic-in-x variant; the state is nx rows of coefficient vectors.
class PeriodicDoiSolver {
 public:
  PeriodicDoiSolver(int n_x, int lmax, PeriodicFlowProfile flow,
                    DoiParams par);

  int nx() const { return nx_; }
  const DoiSolver& local() const { return local_; }
  double x_center(int i) const { return (i + 0.5) * flow_.length / nx_; }

  Eigen::MatrixXd uniform() const; // unit total mass, uniform in x and n
  double mass(const Eigen::MatrixXd& state) const;
  Eigen::VectorXd x_marginal(const Eigen::MatrixXd& state) const;
  void advance(Eigen::MatrixXd& state, double t_span,
               double dt_target = 0.0) const;

 private:
  int nx_;
  PeriodicFlowProfile flow_;
  DoiSolver local_; // carries the transform and rotational parameters
};

} // namespace polykin
