#include "polykin/forces.hpp"

#include "polykin/quadrature.hpp"

#include <cmath>

namespace polykin {

FlowField FlowField::from_name(const std::string& name, double rate) {
  if (name == "none") return none();
  if (name == "shear") return shear(rate);
  if (name == "extension") return uniaxial_extension(rate);
  if (name == "rotation") return planar_rotation(rate);
  throw std::invalid_argument("FlowField: unknown flow preset '" + name + "'");
}

OnsagerPotential::OnsagerPotential(double strength, int lmax)
    : strength_(strength), lambda_(lmax + 1) {
  // lambda_l = 2 pi int sqrt(1-t^2) P_l(t) dt; the Chebyshev-U rule has
  // exactly the sqrt(1-t^2) weight, so the integrand is the polynomial P_l
  // and the rule is exact once 2n-1 >= lmax.
  QuadratureRule q = gauss_chebyshev_u(lmax + 8);
  lambda_.setZero();
  for (int i = 0; i < q.nodes.size(); ++i) {
    Eigen::VectorXd p = legendre_values(lmax, q.nodes[i]);
    lambda_ += (2.0 * M_PI * q.weights[i]) * p;
  }
  // Odd-l multipliers vanish by symmetry of the kernel; snap the quadrature
  // zeros so the operator preserves parity exactly.
  for (int l = 1; l <= lmax; l += 2) lambda_[l] = 0.0;
}

Eigen::VectorXd OnsagerPotential::apply(const Eigen::VectorXd& rho_coeffs) const {
  int lmax = static_cast<int>(lambda_.size()) - 1;
  Eigen::VectorXd out(rho_coeffs.size());
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) {
      int idx = SphericalHarmonics::index(l, m);
      out[idx] = strength_ * lambda_[l] * rho_coeffs[idx];
    }
  return out;
}

Eigen::MatrixXd OnsagerPotential::evaluate(const SphericalHarmonics& sht,
                                           const Eigen::MatrixXd& rho_grid) const {
  if (sht.lmax() + 1 != lambda_.size())
    throw std::invalid_argument("OnsagerPotential: lmax mismatch with transform");
  return sht.synthesize(apply(sht.analyze(rho_grid)));
}

} // namespace polykin
