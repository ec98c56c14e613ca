#include "polykin/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace polykin {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;

// Eigen-decomposition of the symmetric tridiagonal Jacobi matrix with given
// off-diagonal entries; diagonal is zero for both Legendre and Hermite.
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n - 1; ++k) {
    J(k, k + 1) = offdiag[k];
    J(k + 1, k) = offdiag[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}
} // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Eigen::VectorXd b(n - 1);
  for (int k = 1; k < n; ++k)
    b[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(b, 2.0);
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  Eigen::VectorXd b(n - 1);
  for (int k = 1; k < n; ++k)
    b[k - 1] = std::sqrt(0.5 * k);
  return golub_welsch(b, std::sqrt(kPi));
}

QuadratureRule gauss_chebyshev_u(int n) {
  if (n < 1) throw std::invalid_argument("gauss_chebyshev_u: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 1; k <= n; ++k) {
    double a = k * kPi / (n + 1.0);
    rule.nodes[k - 1] = std::cos(a);
    double s = std::sin(a);
    rule.weights[k - 1] = kPi / (n + 1.0) * s * s;
  }
  return rule;
}

Eigen::VectorXd legendre_values(int lmax, double x) {
  Eigen::VectorXd P(lmax + 1);
  P[0] = 1.0;
  if (lmax >= 1) P[1] = x;
  for (int l = 2; l <= lmax; ++l)
    P[l] = ((2 * l - 1) * x * P[l - 1] - (l - 1) * P[l - 2]) / l;
  return P;
}

SphereQuadrature::SphereQuadrature(int n_theta, int n_phi)
    : n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta < 1 || n_phi < 1)
    throw std::invalid_argument("SphereQuadrature: grid sizes must be >= 1");
  QuadratureRule gl = gauss_legendre(n_theta);
  theta_.resize(n_theta);
  cos_theta_.resize(n_theta);
  sin_theta_.resize(n_theta);
  w_theta_.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    // Descending theta (ascending cos theta keeps GL order natural).
    double x = gl.nodes[i];
    cos_theta_[i] = x;
    theta_[i] = std::acos(x);
    sin_theta_[i] = std::sqrt(1.0 - x * x);
    w_theta_[i] = gl.weights[i];
  }
  dphi_ = 2.0 * kPi / n_phi;
  phi_.resize(n_phi);
  cos_phi_.resize(n_phi);
  sin_phi_.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) {
    phi_[j] = j * dphi_;
    cos_phi_[j] = std::cos(phi_[j]);
    sin_phi_[j] = std::sin(phi_[j]);
  }
}

double SphereQuadrature::integrate(const Eigen::MatrixXd& values) const {
  double total = 0.0;
  for (int i = 0; i < n_theta_; ++i) {
    double row = 0.0;
    for (int j = 0; j < n_phi_; ++j) row += values(i, j);
    total += w_theta_[i] * row;
  }
  return total * dphi_;
}

} // namespace polykin
