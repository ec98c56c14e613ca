#pragma once

// In-place Thomas solves for the banded systems produced by the implicit
// diffusion / collision stages.  Not a public interface.

#include <Eigen/Dense>

#include <stdexcept>

namespace polykin::detail {

// Solves the tridiagonal system with sub-diagonal `a` (a[0] unused), diagonal
// `b`, super-diagonal `c` (c[n-1] unused) for right-hand side `x`, leaving the
// solution in `x`.  Scratch must have size n.
inline void solve_tridiagonal(const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c, Eigen::VectorXd& x,
                              Eigen::VectorXd& scratch) {
  const int n = static_cast<int>(b.size());
  double piv = b[0];
  if (piv == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
  x[0] /= piv;
  for (int i = 1; i < n; ++i) {
    scratch[i] = c[i - 1] / piv;
    piv = b[i] - a[i] * scratch[i];
    if (piv == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
    x[i] = (x[i] - a[i] * x[i - 1]) / piv;
  }
  for (int i = n - 2; i >= 0; --i) x[i] -= scratch[i + 1] * x[i + 1];
}

// Periodic (cyclic) tridiagonal solve via the Sherman-Morrison correction:
// `a[0]` couples unknown 0 to n-1 and `c[n-1]` couples n-1 to 0.  Requires
// n >= 3.
inline void solve_cyclic_tridiagonal(const Eigen::VectorXd& a,
                                     const Eigen::VectorXd& b,
                                     const Eigen::VectorXd& c,
                                     Eigen::VectorXd& x) {
  const int n = static_cast<int>(b.size());
  if (n < 3)
    throw std::invalid_argument("cyclic tridiagonal solve requires n >= 3");
  const double alpha = a[0];  // coupling (0, n-1)
  const double beta = c[n - 1];  // coupling (n-1, 0)
  const double gamma = -b[0];

  Eigen::VectorXd bb = b;
  bb[0] -= gamma;
  bb[n - 1] -= alpha * beta / gamma;

  Eigen::VectorXd scratch(n);
  solve_tridiagonal(a, bb, c, x, scratch);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u[0] = gamma;
  u[n - 1] = beta;
  solve_tridiagonal(a, bb, c, u, scratch);

  const double denom = 1.0 + u[0] + alpha * u[n - 1] / gamma;
  if (denom == 0.0)
    throw std::runtime_error("cyclic tridiagonal solve: singular correction");
  const double factor = (x[0] + alpha * x[n - 1] / gamma) / denom;
  x -= factor * u;
}

} // namespace polykin::detail
