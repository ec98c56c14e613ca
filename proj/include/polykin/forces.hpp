#pragma once

// Connector spring laws, linear background flows, and the Onsager
// excluded-volume interaction potential on the sphere.

#include "polykin/sht.hpp"

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace polykin {

// Spring law for the dumbbell connector.  The force is the potential
// gradient, F = grad U:
//   hookean:  F = H n,                      U = H |n|^2 / 2
//   fene:     F = H n / (1 - |n|^2/n0^2),   U = -(H n0^2 / 2) log(1 - |n|^2/n0^2)
// The FENE law is only defined for |n| < n0; the potential returns +inf
// outside and integrators must keep trajectories strictly inside the ball.
enum class SpringType { hookean, fene };

struct Spring {
  SpringType type = SpringType::hookean;
  double H = 1.0;
  double n0 = 1.0; // maximum extension; ignored for hookean

  static Spring make_hookean(double H) { return {SpringType::hookean, H, 0.0}; }
  static Spring make_fene(double H, double n0) {
    return {SpringType::fene, H, n0};
  }

  // Scalar stiffness factor so that F(n) = factor(|n|^2) * n.
  double factor(double n_sq) const {
    if (type == SpringType::hookean) return H;
    return H / (1.0 - n_sq / (n0 * n0));
  }

  template <typename Vec>
  Vec force(const Vec& n) const {
    return factor(n.squaredNorm()) * n;
  }

  template <typename Vec>
  double potential(const Vec& n) const {
    return radial_potential(n.norm());
  }

  double radial_potential(double r) const {
    if (type == SpringType::hookean) return 0.5 * H * r * r;
    double arg = 1.0 - (r * r) / (n0 * n0);
    if (arg <= 0.0) return std::numeric_limits<double>::infinity();
    return -0.5 * H * n0 * n0 * std::log(arg);
  }

  // True iff n lies in the admissible configuration domain.
  double max_extension() const {
    return type == SpringType::fene ? n0
                                    : std::numeric_limits<double>::infinity();
  }
};

// Linear background flow u(x) = kappa x, with kappa the velocity gradient
// (kappa_ij = du_i / dx_j).
struct FlowField {
  Eigen::Matrix3d kappa = Eigen::Matrix3d::Zero();

  Eigen::Vector3d velocity(const Eigen::Vector3d& x) const { return kappa * x; }

  static FlowField none() { return {}; }

  // Simple shear u = (rate * x2, 0, 0).
  static FlowField shear(double rate) {
    FlowField f;
    f.kappa(0, 1) = rate;
    return f;
  }

  // Uniaxial extension along x1, traceless.
  static FlowField uniaxial_extension(double rate) {
    FlowField f;
    f.kappa.diagonal() << rate, -0.5 * rate, -0.5 * rate;
    return f;
  }

  // Rigid rotation about x3: u = rate * (-x2, x1, 0).
  static FlowField planar_rotation(double rate) {
    FlowField f;
    f.kappa(0, 1) = -rate;
    f.kappa(1, 0) = rate;
    return f;
  }

  static FlowField from_name(const std::string& name, double rate);
};

// Onsager interaction U[rho](n) = strength * int |n x n'| rho(n') dS(n').
// The kernel |n x n'| depends only on n . n', so on spherical harmonics it
// acts diagonally: Uhat_{lm} = strength * lambda_l * rhohat_{lm} with
//   lambda_l = 2 pi int_{-1}^{1} sqrt(1 - t^2) P_l(t) dt,
// evaluated exactly by Gauss-Chebyshev (second kind) quadrature.  Only even
// l contribute; lambda_0 = pi^2, lambda_2 = -pi^2/8, and the sequence decays
// like l^{-4}.
class OnsagerPotential {
 public:
  OnsagerPotential(double strength, int lmax);

  double strength() const { return strength_; }
  const Eigen::VectorXd& multipliers() const { return lambda_; } // size lmax+1

  // Coefficients of U[rho] from coefficients of rho (same basis/order).
  Eigen::VectorXd apply(const Eigen::VectorXd& rho_coeffs) const;

  // Grid-space convenience: rho on the transform grid -> U on the grid.
  Eigen::MatrixXd evaluate(const SphericalHarmonics& sht,
                           const Eigen::MatrixXd& rho_grid) const;

 private:
  double strength_;
  Eigen::VectorXd lambda_;
};

} // namespace polykin
