#pragma once

// Real spherical-harmonic analysis on a Gauss-Legendre x uniform-phi grid.
//
// Basis: orthonormal real harmonics without the Condon-Shortley phase,
//   Y_{l,0}  = Pb_{l,0}(cos th)
//   Y_{l,m}  = sqrt(2) Pb_{l,m}(cos th) cos(m phi),  m > 0
//   Y_{l,-m} = sqrt(2) Pb_{l,m}(cos th) sin(m phi),  m > 0
// with Pb the fully normalized associated Legendre functions, so that
// int Y_i Y_j dS = delta_ij.  Coefficients are stored flat at l*l + l + m.
//
// The grid (lmax+2 colatitudes, 2*lmax+4 longitudes) makes analyze an exact
// inverse of synthesize for band-limited functions.

#include "polykin/quadrature.hpp"

#include <Eigen/Dense>
#include <vector>

namespace polykin {

class SphericalHarmonics {
 public:
  explicit SphericalHarmonics(int lmax);

  int lmax() const { return lmax_; }
  int n_coeffs() const { return (lmax_ + 1) * (lmax_ + 1); }
  const SphereQuadrature& grid() const { return grid_; }

  static int index(int l, int m) { return l * l + l + m; }

  // Grid values (theta major) -> coefficients, by quadrature.
  Eigen::VectorXd analyze(const Eigen::MatrixXd& values) const;

  // Coefficients -> grid values.
  Eigen::MatrixXd synthesize(const Eigen::VectorXd& coeffs) const;

  // Chart derivatives on the grid: d/dtheta and (1/sin th) d/dphi.
  void gradient_grid(const Eigen::VectorXd& coeffs, Eigen::MatrixXd* dtheta,
                     Eigen::MatrixXd* dphi_over_sin) const;

  // Multiply each coefficient by the sphere-laplacian eigenvalue -l(l+1).
  Eigen::VectorXd laplacian(const Eigen::VectorXd& coeffs) const;

  // Basis values at an arbitrary point (row vector of length n_coeffs).
  Eigen::VectorXd basis_at(double theta, double phi) const;

 private:
  int lmax_;
  SphereQuadrature grid_;
  int n_assoc_; // (lmax+1)(lmax+2)/2 packed (l,m>=0) pairs

  static int assoc_index(int l, int m) { return l * (l + 1) / 2 + m; }

  // Tables over colatitude nodes: value, d/dtheta, value/sin(theta).
  Eigen::MatrixXd plm_, dplm_, plm_over_sin_;
  // Tables over longitude nodes: cos(m phi), sin(m phi).
  Eigen::MatrixXd cosm_, sinm_;

  void eval_assoc(double theta, Eigen::VectorXd* p, Eigen::VectorXd* dp,
                  Eigen::VectorXd* p_over_sin) const;
};

} // namespace polykin
