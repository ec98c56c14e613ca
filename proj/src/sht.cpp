#include "polykin/sht.hpp"

#include <cmath>

namespace polykin {

SphericalHarmonics::SphericalHarmonics(int lmax)
    : lmax_(lmax),
      grid_(lmax + 2, 2 * lmax + 4),
      n_assoc_((lmax + 1) * (lmax + 2) / 2) {
  int nt = grid_.n_theta();
  int np = grid_.n_phi();
  plm_.resize(nt, n_assoc_);
  dplm_.resize(nt, n_assoc_);
  plm_over_sin_.resize(nt, n_assoc_);
  Eigen::VectorXd p(n_assoc_), dp(n_assoc_), q(n_assoc_);
  for (int i = 0; i < nt; ++i) {
    eval_assoc(grid_.theta(i), &p, &dp, &q);
    plm_.row(i) = p;
    dplm_.row(i) = dp;
    plm_over_sin_.row(i) = q;
  }
  cosm_.resize(np, lmax + 1);
  sinm_.resize(np, lmax + 1);
  for (int j = 0; j < np; ++j)
    for (int m = 0; m <= lmax; ++m) {
      cosm_(j, m) = std::cos(m * grid_.phi(j));
      sinm_(j, m) = std::sin(m * grid_.phi(j));
    }
}

// Fully normalized associated Legendre values, theta-derivatives, and
// values/sin(theta), by the standard stable three-term recurrences.
void SphericalHarmonics::eval_assoc(double theta, Eigen::VectorXd* p,
                                    Eigen::VectorXd* dp,
                                    Eigen::VectorXd* p_over_sin) const {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::VectorXd& P = *p;
  Eigen::VectorXd& D = *dp;
  Eigen::VectorXd& Q = *p_over_sin;
  P.setZero(n_assoc_);
  D.setZero(n_assoc_);
  Q.setZero(n_assoc_);

  P[assoc_index(0, 0)] = std::sqrt(1.0 / (4.0 * M_PI));
  // Diagonal (m,m) and the q = P/sin companions.
  for (int m = 1; m <= lmax_; ++m) {
    double f = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    int im = assoc_index(m, m), prev = assoc_index(m - 1, m - 1);
    P[im] = f * s * P[prev];
    D[im] = f * (c * P[prev] + s * D[prev]);
    Q[im] = f * P[prev]; // P_mm / sin = f * P_{m-1,m-1}
  }
  // First off-diagonal (m+1, m).
  for (int m = 0; m < lmax_; ++m) {
    double g = std::sqrt(2.0 * m + 3.0);
    int i0 = assoc_index(m, m), i1 = assoc_index(m + 1, m);
    P[i1] = g * c * P[i0];
    D[i1] = g * (-s * P[i0] + c * D[i0]);
    Q[i1] = g * c * Q[i0];
  }
  // General (l, m), l >= m + 2.
  for (int m = 0; m <= lmax_; ++m)
    for (int l = m + 2; l <= lmax_; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                           (4.0 * double(l - 1) * (l - 1) - 1.0));
      int il = assoc_index(l, m), i1 = assoc_index(l - 1, m),
          i2 = assoc_index(l - 2, m);
      P[il] = a * (c * P[i1] - b * P[i2]);
      D[il] = a * (-s * P[i1] + c * D[i1] - b * D[i2]);
      Q[il] = a * (c * Q[i1] - b * Q[i2]);
    }
  // q is only consumed for m >= 1; zero the m = 0 slots to avoid any
  // accidental use of P/sin at the poles.
  for (int l = 0; l <= lmax_; ++l) Q[assoc_index(l, 0)] = 0.0;
}

Eigen::VectorXd SphericalHarmonics::analyze(const Eigen::MatrixXd& values) const {
  const int nt = grid_.n_theta(), np = grid_.n_phi();
  const double sqrt2 = std::sqrt(2.0);
  // Longitudinal Fourier sums: C(i,m), S(i,m) include the dphi weight.
  Eigen::MatrixXd C = values * cosm_ * grid_.dphi();
  Eigen::MatrixXd S = values * sinm_ * grid_.dphi();
  (void)np;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_coeffs());
  for (int l = 0; l <= lmax_; ++l)
    for (int m = 0; m <= l; ++m) {
      int ia = assoc_index(l, m);
      double sc = 0, ss = 0;
      for (int i = 0; i < nt; ++i) {
        double wp = grid_.w_theta(i) * plm_(i, ia);
        sc += wp * C(i, m);
        ss += wp * S(i, m);
      }
      if (m == 0) {
        out[index(l, 0)] = sc;
      } else {
        out[index(l, m)] = sqrt2 * sc;
        out[index(l, -m)] = sqrt2 * ss;
      }
    }
  return out;
}

Eigen::MatrixXd SphericalHarmonics::synthesize(const Eigen::VectorXd& coeffs) const {
  const int nt = grid_.n_theta(), np = grid_.n_phi();
  const double sqrt2 = std::sqrt(2.0);
  // Gc(i,m), Gs(i,m): latitudinal sums per azimuthal order.
  Eigen::MatrixXd Gc = Eigen::MatrixXd::Zero(nt, lmax_ + 1);
  Eigen::MatrixXd Gs = Eigen::MatrixXd::Zero(nt, lmax_ + 1);
  for (int m = 0; m <= lmax_; ++m)
    for (int l = m; l <= lmax_; ++l) {
      int ia = assoc_index(l, m);
      double cc = (m == 0) ? coeffs[index(l, 0)] : sqrt2 * coeffs[index(l, m)];
      double cs = (m == 0) ? 0.0 : sqrt2 * coeffs[index(l, -m)];
      for (int i = 0; i < nt; ++i) {
        Gc(i, m) += plm_(i, ia) * cc;
        Gs(i, m) += plm_(i, ia) * cs;
      }
    }
  Eigen::MatrixXd vals(nt, np);
  vals = Gc * cosm_.transpose() + Gs * sinm_.transpose();
  return vals;
}

void SphericalHarmonics::gradient_grid(const Eigen::VectorXd& coeffs,
                                       Eigen::MatrixXd* dtheta,
                                       Eigen::MatrixXd* dphi_over_sin) const {
  const int nt = grid_.n_theta(), np = grid_.n_phi();
  const double sqrt2 = std::sqrt(2.0);
  Eigen::MatrixXd Dc = Eigen::MatrixXd::Zero(nt, lmax_ + 1);
  Eigen::MatrixXd Ds = Eigen::MatrixXd::Zero(nt, lmax_ + 1);
  Eigen::MatrixXd Qc = Eigen::MatrixXd::Zero(nt, lmax_ + 1);
  Eigen::MatrixXd Qs = Eigen::MatrixXd::Zero(nt, lmax_ + 1);
  for (int m = 0; m <= lmax_; ++m)
    for (int l = m; l <= lmax_; ++l) {
      int ia = assoc_index(l, m);
      double cc = (m == 0) ? coeffs[index(l, 0)] : sqrt2 * coeffs[index(l, m)];
      double cs = (m == 0) ? 0.0 : sqrt2 * coeffs[index(l, -m)];
      for (int i = 0; i < nt; ++i) {
        Dc(i, m) += dplm_(i, ia) * cc;
        Ds(i, m) += dplm_(i, ia) * cs;
        Qc(i, m) += plm_over_sin_(i, ia) * cc;
        Qs(i, m) += plm_over_sin_(i, ia) * cs;
      }
    }
  if (dtheta) *dtheta = Dc * cosm_.transpose() + Ds * sinm_.transpose();
  if (dphi_over_sin) {
    // d/dphi hits the azimuthal factors: cos -> -m sin, sin -> m cos.
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nt, np);
    for (int m = 1; m <= lmax_; ++m)
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < nt; ++i)
          out(i, j) += m * (-Qc(i, m) * sinm_(j, m) + Qs(i, m) * cosm_(j, m));
    *dphi_over_sin = out;
  }
}

Eigen::VectorXd SphericalHarmonics::laplacian(const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd out(coeffs.size());
  for (int l = 0; l <= lmax_; ++l)
    for (int m = -l; m <= l; ++m)
      out[index(l, m)] = -double(l) * (l + 1) * coeffs[index(l, m)];
  return out;
}

Eigen::VectorXd SphericalHarmonics::basis_at(double theta, double phi) const {
  Eigen::VectorXd p(n_assoc_), dp(n_assoc_), q(n_assoc_);
  eval_assoc(theta, &p, &dp, &q);
  const double sqrt2 = std::sqrt(2.0);
  Eigen::VectorXd y(n_coeffs());
  for (int l = 0; l <= lmax_; ++l) {
    y[index(l, 0)] = p[assoc_index(l, 0)];
    for (int m = 1; m <= l; ++m) {
      double base = sqrt2 * p[assoc_index(l, m)];
      y[index(l, m)] = base * std::cos(m * phi);
      y[index(l, -m)] = base * std::sin(m * phi);
    }
  }
  return y;
}

} // namespace polykin
