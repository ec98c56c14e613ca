#pragma once

// Quadrature rules used across the library: Gauss-Legendre (ball and sphere
// grids), Gauss-Hermite (Gaussian moment identities), Gauss-Chebyshev of the
// second kind (Legendre-coefficient integrals of the interaction kernel),
// and the Gauss-Legendre x uniform-phi product rule on the unit sphere.

#include <Eigen/Dense>
#include <vector>

namespace polykin {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Nodes/weights on (-1,1) with weight 1; exact for polynomials of degree
// <= 2n-1.  Golub-Welsch via the symmetric tridiagonal Jacobi matrix.
QuadratureRule gauss_legendre(int n);

// Weight exp(-x^2) on the real line; exact for degree <= 2n-1.
QuadratureRule gauss_hermite(int n);

// Weight sqrt(1-t^2) on (-1,1); closed-form nodes/weights; exact for
// degree <= 2n-1.
QuadratureRule gauss_chebyshev_u(int n);

// Legendre polynomial values P_0..P_lmax at x (three-term recurrence).
Eigen::VectorXd legendre_values(int lmax, double x);

// Product quadrature on the unit sphere: Gauss-Legendre in cos(theta) times
// a uniform periodic rule in phi.  Weights sum to 4*pi.
class SphereQuadrature {
 public:
  SphereQuadrature(int n_theta, int n_phi);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  int size() const { return n_theta_ * n_phi_; }

  double theta(int i) const { return theta_[i]; }
  double cos_theta(int i) const { return cos_theta_[i]; }
  double sin_theta(int i) const { return sin_theta_[i]; }
  double phi(int j) const { return phi_[j]; }
  // Weight of node (i,j); separable: w_theta(i) * dphi.
  double weight(int i, int j) const { return w_theta_[i] * dphi_; }
  double w_theta(int i) const { return w_theta_[i]; }
  double dphi() const { return dphi_; }

  Eigen::Vector3d node(int i, int j) const {
    return {sin_theta_[i] * cos_phi_[j], sin_theta_[i] * sin_phi_[j],
            cos_theta_[i]};
  }

  // Integral of a grid function stored row-major (theta major, phi minor).
  double integrate(const Eigen::MatrixXd& values) const;

 private:
  int n_theta_, n_phi_;
  double dphi_;
  std::vector<double> theta_, cos_theta_, sin_theta_, w_theta_;
  std::vector<double> phi_, cos_phi_, sin_phi_;
};

} // namespace polykin
