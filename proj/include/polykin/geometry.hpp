#pragma once

// Orientation-space geometry: the unit sphere, its tangent bundle, the
// spherical chart basis, the rotational gradient R = n x grad_n, and
// finite-difference residual checks for the chain-rule identities that the
// rod model's change of variables relies on.

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace polykin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;
// Scalar function of two vector arguments (configuration, velocity).
using ScalarField2 = std::function<double(const Vec3&, const Vec3&)>;

// A vector on the unit sphere; normalized on construction.
class UnitVector {
 public:
  explicit UnitVector(const Vec3& v) {
    double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw std::invalid_argument("UnitVector: cannot normalize zero/non-finite vector");
    v_ = v / norm;
  }
  UnitVector(double x, double y, double z) : UnitVector(Vec3(x, y, z)) {}

  const Vec3& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

 private:
  Vec3 v_;
};

// Tangent vector at a base point; components are projected onto the tangent
// plane on construction, so components . base = 0 holds by construction.
struct TangentVector {
  TangentVector(const UnitVector& base_in, const Vec3& v)
      : base(base_in),
        components(v - (v.dot(base_in.vec())) * base_in.vec()) {}

  UnitVector base;
  Vec3 components;
};

// Spherical coordinates, theta in [0, pi], phi in [0, 2*pi).
struct SphCoord {
  double theta;
  double phi;
};

struct SphBasis {
  Vec3 n;
  Vec3 e_theta;
  Vec3 e_phi;
  bool degenerate; // true within 1e-14 of a pole; basis fixed by convention
};

SphCoord sph_from_unit(const UnitVector& n);
UnitVector unit_from_sph(const SphCoord& c);

// Orthonormal chart frame {n, e_theta, e_phi}.  At the poles (sin(theta)
// < 1e-14) the frame is completed by the phi-as-given convention and the
// degenerate flag is set.
SphBasis spherical_basis(const SphCoord& c);

// (Id - n n^T) v.
inline Vec3 tangent_project(const Vec3& v, const UnitVector& n) {
  return v - v.dot(n.vec()) * n.vec();
}

// Rotation K with K e3 = n.  Continuous in n away from -e3; at n = -e3 the
// convention is the half-turn about e1, diag(1,-1,-1).
Mat3 rotate_to_pole(const UnitVector& n);

// R f = n x grad_n f by central differences in the (theta, phi) chart.
// Near the poles (sin(theta) < 1e-6) the field is evaluated in a chart
// rotated so the evaluation point sits on the equator.
Vec3 rotational_gradient(const ScalarField& f, const UnitVector& n,
                         double h = 1e-5);

// Surface divergence of a tangent field:
//   div A = (1/sin th) d_theta(sin th A_theta) + (1/sin th) d_phi A_phi,
// by central differences.  Near-pole coordinates use a rotated chart.
double sphere_divergence(const VectorField& A, const SphCoord& c,
                         double h = 1e-5);

// Rotational divergence R . A = (1/sin th) d_theta(sin th A_phi)
//                             - (1/sin th) d_phi A_theta.
double rotational_divergence(const VectorField& A, const SphCoord& c,
                             double h = 1e-5);

// Ambient central-difference gradient of f at x.
Vec3 gradient_fd(const ScalarField& f, const Vec3& x, double h = 1e-5);

// Chain rule through a fixed cross product: with x = a x y and
// g~(y) = g(a x y), returns the residuals of
//   grad_y g~ = -a x grad_x g      (chain)   and   a . grad_y g~ = 0 (orth).
struct CrossChainResiduals {
  double chain;
  double orthogonality;
};
CrossChainResiduals cross_chain_residuals(const Vec3& a, const ScalarField& g,
                                          const Vec3& y, double h = 1e-5);

// Change of variables (n, ndot) -> (n, omega) with ndot = omega x n.
// For F(n, w) = f(n, w x n), returns residuals of
//   grad_n F = grad_m f - w x grad_ndot f   and   grad_w F = n x grad_ndot f,
// all gradients by ambient central differences.
struct BundleChainResiduals {
  double configuration; // first identity
  double velocity;      // second identity
};
BundleChainResiduals bundle_chain_residuals(const ScalarField2& f,
                                            const Vec3& n, const Vec3& omega,
                                            double h = 1e-5);

// Residual of (n x grad) . g = -grad . (n x g) at ambient point n
// (both sides by central differences).
double rotational_divergence_identity_residual(const VectorField& g,
                                               const Vec3& n, double h = 1e-5);

} // namespace polykin
