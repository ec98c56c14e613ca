#include "polykin/geometry.hpp"

#include <cmath>

namespace polykin {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPoleTol = 1e-6; // switch to a rotated chart below this

// Rotation with R e1 = e3 (quarter turn about the y axis).
Mat3 equator_to_pole() {
  Mat3 r;
  r << 0, 0, -1,
       0, 1,  0,
       1, 0,  0;
  return r;
}

Vec3 rotational_gradient_chart(const ScalarField& f, const SphCoord& c,
                               double h) {
  SphBasis b = spherical_basis(c);
  auto at = [&](double th, double ph) {
    return f(unit_from_sph({th, ph}).vec());
  };
  double dth = (at(c.theta + h, c.phi) - at(c.theta - h, c.phi)) / (2.0 * h);
  double dph = (at(c.theta, c.phi + h) - at(c.theta, c.phi - h)) / (2.0 * h);
  return b.e_phi * dth - b.e_theta * (dph / std::sin(c.theta));
}

// Chart components of a vector field at (theta, phi).
void chart_components(const VectorField& A, double th, double ph,
                      double* a_theta, double* a_phi) {
  SphBasis b = spherical_basis({th, ph});
  Vec3 v = A(b.n);
  *a_theta = v.dot(b.e_theta);
  *a_phi = v.dot(b.e_phi);
}

double sphere_divergence_chart(const VectorField& A, const SphCoord& c,
                               double h) {
  double atp, app, atm, apm, at0, ap0;
  chart_components(A, c.theta + h, c.phi, &atp, &app);
  chart_components(A, c.theta - h, c.phi, &atm, &apm);
  double dth = (std::sin(c.theta + h) * atp - std::sin(c.theta - h) * atm) /
               (2.0 * h);
  chart_components(A, c.theta, c.phi + h, &at0, &ap0);
  chart_components(A, c.theta, c.phi - h, &atm, &apm);
  double dph = (ap0 - apm) / (2.0 * h);
  return (dth + dph) / std::sin(c.theta);
}

double rotational_divergence_chart(const VectorField& A, const SphCoord& c,
                                   double h) {
  double atp, app, atm, apm, at0, ap0;
  chart_components(A, c.theta + h, c.phi, &atp, &app);
  chart_components(A, c.theta - h, c.phi, &atm, &apm);
  double dth = (std::sin(c.theta + h) * app - std::sin(c.theta - h) * apm) /
               (2.0 * h);
  chart_components(A, c.theta, c.phi + h, &at0, &ap0);
  chart_components(A, c.theta, c.phi - h, &atm, &apm);
  double dph = (at0 - atm) / (2.0 * h);
  return (dth - dph) / std::sin(c.theta);
}

} // namespace

SphCoord sph_from_unit(const UnitVector& n) {
  // atan2 form keeps full precision at the poles, where acos(z) loses half
  // the significant digits.
  double theta = std::atan2(std::hypot(n.x(), n.y()), n.z());
  double phi = std::atan2(n.y(), n.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  return {theta, phi};
}

UnitVector unit_from_sph(const SphCoord& c) {
  double st = std::sin(c.theta);
  return UnitVector(st * std::cos(c.phi), st * std::sin(c.phi),
                    std::cos(c.theta));
}

SphBasis spherical_basis(const SphCoord& c) {
  double st = std::sin(c.theta), ct = std::cos(c.theta);
  double sp = std::sin(c.phi), cp = std::cos(c.phi);
  SphBasis b;
  b.n = Vec3(st * cp, st * sp, ct);
  b.e_theta = Vec3(ct * cp, ct * sp, -st);
  b.e_phi = Vec3(-sp, cp, 0.0);
  b.degenerate = std::abs(st) < 1e-14;
  return b;
}

Mat3 rotate_to_pole(const UnitVector& n) {
  if (n.x() == 0.0 && n.y() == 0.0) {
    if (n.z() > 0.0) return Mat3::Identity();
    Mat3 r = Mat3::Identity(); // antipode convention: half turn about e1
    r(1, 1) = -1.0;
    r(2, 2) = -1.0;
    return r;
  }
  // Rodrigues with unit axis u = (e3 x n)/s, sin = s, cos = c.  This form
  // stays orthogonal to rounding for n arbitrarily close to either pole,
  // unlike the unnormalized variant with its 1/(1+c) factor.
  double c = n.z();
  Vec3 v = Vec3::UnitZ().cross(n.vec());
  double s = v.norm();
  Vec3 u = v / s;
  Mat3 ux;
  ux << 0, -u.z(), u.y(),
        u.z(), 0, -u.x(),
       -u.y(), u.x(), 0;
  return Mat3::Identity() + s * ux + (1.0 - c) * (ux * ux);
}

Vec3 rotational_gradient(const ScalarField& f, const UnitVector& n, double h) {
  SphCoord c = sph_from_unit(n);
  if (std::sin(c.theta) < kPoleTol) {
    Mat3 k = rotate_to_pole(n) * equator_to_pole(); // k e1 = n
    ScalarField g = [&](const Vec3& y) { return f(k * y); };
    Vec3 r = rotational_gradient_chart(g, {kPi / 2.0, 0.0}, h);
    return k * r;
  }
  return rotational_gradient_chart(f, c, h);
}

double sphere_divergence(const VectorField& A, const SphCoord& c, double h) {
  if (std::sin(c.theta) < kPoleTol) {
    UnitVector n = unit_from_sph(c);
    Mat3 k = rotate_to_pole(n) * equator_to_pole();
    VectorField rotated = [&](const Vec3& y) {
      return Vec3(k.transpose() * A(k * y));
    };
    return sphere_divergence_chart(rotated, {kPi / 2.0, 0.0}, h);
  }
  return sphere_divergence_chart(A, c, h);
}

double rotational_divergence(const VectorField& A, const SphCoord& c,
                             double h) {
  if (std::sin(c.theta) < kPoleTol) {
    UnitVector n = unit_from_sph(c);
    Mat3 k = rotate_to_pole(n) * equator_to_pole();
    VectorField rotated = [&](const Vec3& y) {
      return Vec3(k.transpose() * A(k * y));
    };
    return rotational_divergence_chart(rotated, {kPi / 2.0, 0.0}, h);
  }
  return rotational_divergence_chart(A, c, h);
}

Vec3 gradient_fd(const ScalarField& f, const Vec3& x, double h) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

CrossChainResiduals cross_chain_residuals(const Vec3& a, const ScalarField& g,
                                          const Vec3& y, double h) {
  ScalarField composed = [&](const Vec3& yy) { return g(a.cross(yy)); };
  Vec3 grad_y = gradient_fd(composed, y, h);
  Vec3 grad_x = gradient_fd(g, a.cross(y), h);
  CrossChainResiduals r;
  r.chain = (grad_y + a.cross(grad_x)).norm();
  r.orthogonality = std::abs(a.dot(grad_y));
  return r;
}

BundleChainResiduals bundle_chain_residuals(const ScalarField2& f,
                                            const Vec3& n, const Vec3& omega,
                                            double h) {
  Vec3 ndot = omega.cross(n);
  ScalarField in_n = [&](const Vec3& y) { return f(y, omega.cross(y)); };
  ScalarField in_omega = [&](const Vec3& w) { return f(n, w.cross(n)); };
  ScalarField first_arg = [&](const Vec3& y) { return f(y, ndot); };
  ScalarField second_arg = [&](const Vec3& v) { return f(n, v); };

  Vec3 grad_n_full = gradient_fd(in_n, n, h);
  Vec3 grad_w_full = gradient_fd(in_omega, omega, h);
  Vec3 grad_m = gradient_fd(first_arg, n, h);
  Vec3 grad_ndot = gradient_fd(second_arg, ndot, h);

  BundleChainResiduals r;
  r.configuration = (grad_n_full - (grad_m - omega.cross(grad_ndot))).norm();
  r.velocity = (grad_w_full - n.cross(grad_ndot)).norm();
  return r;
}

double rotational_divergence_identity_residual(const VectorField& g,
                                               const Vec3& n, double h) {
  // lhs = sum_k (n x grad g_k)_k
  double lhs = 0.0;
  for (int k = 0; k < 3; ++k) {
    ScalarField gk = [&](const Vec3& x) { return g(x)[k]; };
    lhs += n.cross(gradient_fd(gk, n, h))[k];
  }
  // rhs = -div(x x g(x)), divergence through the explicit x as well
  double rhs = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec3 xp = n, xm = n;
    xp[i] += h;
    xm[i] -= h;
    rhs -= (xp.cross(g(xp))[i] - xm.cross(g(xm))[i]) / (2.0 * h);
  }
  return std::abs(lhs - rhs);
}

} // namespace polykin
