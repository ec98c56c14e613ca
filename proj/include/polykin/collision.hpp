#pragma once

// Velocity-space collision operators for both polymer models, their Gaussian
// equilibria, entropy dissipation, moment identities, and the cell problems
// Q(psi) = g.
//
// The continuous operators are Fokker-Planck generators in conservative form,
//   dumbbell: Q(f) = 2 zeta kBT grad_{p,q} . ( M grad_{p,q} (f/M) ),
//             M = exp(-(p^2+q^2)/(4 kBT))            (variance 2 kBT / axis)
//   rod:      Q(f) = zeta_t kBT grad_p . (M grad_p (f/M))
//             + zeta_r kBT grad_w . (M grad_w (f/M)),
//             M = exp(-(p^2+w^2)/(2 kBT))            (variance kBT / axis)
// The factor-two asymmetry between the equilibria is intentional and follows
// from the different noise amplitudes of the two models; M is kept
// unnormalized exactly in this form, with the normalization exposed
// separately.
//
// Discretization: tensor-product uniform grids, flux differences of
// M-weighted face gradients of u = f/M.  Face weights carry an h^2/24
// curvature correction (midpoint deconvolution), which keeps the scheme
// second-order consistent while making conservation, self-adjointness in the
// M-weighted inner product, the sign of the dissipation, and Q(M) = 0 exact
// at the discrete level.

#include "polykin/geometry.hpp"

#include <Eigen/Dense>
#include <vector>

namespace polykin {

enum class Model { dumbbell, rod };

struct MaxwellianSpec {
  Model model = Model::dumbbell;
  double kBT = 1.0;

  // Per-axis Gaussian variance of the equilibrium.
  double variance() const { return model == Model::dumbbell ? 2.0 * kBT : kBT; }
  // Unnormalized per-axis density exp(-v^2 / (2 var)).
  double density(double v) const {
    return std::exp(-v * v / (2.0 * variance()));
  }
  double density_second_derivative(double v) const {
    double s2 = variance();
    return density(v) * (v * v / (s2 * s2) - 1.0 / s2);
  }
  // Closed-form per-axis normalization, C = int exp(-v^2/(2 var)) dv.
  double normalization1d() const {
    return std::sqrt(2.0 * M_PI * variance());
  }
};

// Uniform cells on [-vmax, vmax].  Fewer than 8 points per axis is refused.
struct VelocityAxis {
  VelocityAxis(int n_cells, double vmax);
  int n;
  double vmax;
  double h;
  Eigen::VectorXd centers;
  double face(int i) const { return -vmax + i * h; } // i = 0..n
};

// Tensor product of one or two materialized axes (the rod omega plane is
// parameterized in the tangent plane at fixed n via rotate_to_pole, so two
// axes cover every certification setting).
struct VelocityGrid {
  VelocityGrid(const MaxwellianSpec& spec, std::vector<VelocityAxis> axs);
  MaxwellianSpec maxwell;
  std::vector<VelocityAxis> axes;

  int dims() const { return static_cast<int>(axes.size()); }
  int size() const;
  double cell_volume() const; // product of spacings

  // Minimum admissible half-width: 6 thermal widths of the *dumbbell*
  // Maxwellian; truncated Gaussian mass deficit < 1e-8 for both models.
  static double min_vmax(double kBT) { return 6.0 * std::sqrt(2.0 * kBT); }
};

class CollisionOperator {
 public:
  // One friction coefficient per axis: dumbbell (zeta, zeta); rod p-axes
  // zeta_t, omega-axes zeta_r.
  CollisionOperator(VelocityGrid grid, std::vector<double> zetas);

  const VelocityGrid& grid() const { return grid_; }
  int size() const { return grid_.size(); }

  // Equilibrium values on the grid (unnormalized product Maxwellian).
  const Eigen::VectorXd& maxwellian() const { return M_; }

  // Discrete integral sum f * cell_volume.
  double mass(const Eigen::VectorXd& f) const;

  // Q f.  Conservative: mass(apply(f)) telescopes to 0 exactly.
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

  // D(f) = <Q f, f/M> * cell_volume; <= 0 up to rounding, and = 0 iff f/M
  // is grid-constant.
  double dissipation(const Eigen::VectorXd& f) const;

  // Solve Q psi = g subject to mass(psi) = 0 (augmented symmetric system in
  // u = psi/M with a zero-mean Lagrange multiplier).  Requires mass(g) = 0
  // within 1e-10 * (1 + L1 norm of g); throws otherwise.
  Eigen::VectorXd solve_cell_problem(const Eigen::VectorXd& g) const;

  // Solve Q f = 0 with mass(f) = mass(M); recovers the Maxwellian.
  Eigen::VectorXd solve_stationary() const;

  // Tridiagonal bands of the per-axis operator acting on f along one axis
  // (other-axis Maxwellian factors divided out), for reuse by implicit
  // steppers: (lower, diag, upper), size n of that axis.
  void axis_bands(int axis, Eigen::VectorXd* lower, Eigen::VectorXd* diag,
                  Eigen::VectorXd* upper) const;

  // Flattened index, axis-0 major.
  int flat(int i, int j = 0) const {
    return grid_.dims() == 1 ? i : i * grid_.axes[1].n + j;
  }

 private:
  VelocityGrid grid_;
  std::vector<double> zetas_;
  std::vector<Eigen::VectorXd> M_axis_;     // center values per axis
  std::vector<Eigen::VectorXd> Mface_axis_; // interior deconvolved faces, n-1
  Eigen::VectorXd M_;                       // full grid values
};

// Closures for the analytic cell solutions.  With the unnormalized M as
// above, the first cell problem Q(a_i) = p_i M has a = -p M / zeta_p, the
// second Q(b_i) = q_i M (or omega_i M) has b = -q M / zeta_q, and
//   c = -a / variance,  d = -b / variance
// (variance = 2 kBT for the dumbbell, kBT for the rod).
struct CellSolutions {
  using Closure = std::function<Eigen::VectorXd(const Eigen::VectorXd& p,
                                                const Eigen::VectorXd& q)>;
  Closure a, b, c, d;
};
CellSolutions analytic_cell_solutions(const MaxwellianSpec& spec,
                                      double zeta_p, double zeta_q);

// Both Gaussian moment identities for the rod equilibrium, each side
// integrated against the full (p, omega) Maxwellian:
//   int M (p . A) p     = kBT A (Id)          * int M
//   int M (w . A) w     = kBT (Id - n n^T) A  * int M
// Left sides by Gauss-Hermite quadrature (the omega integral is taken over
// the tangent plane at n, parameterized through rotate_to_pole); right sides
// in closed form.
struct MomentIdentity {
  Eigen::Vector3d lhs_p, rhs_p, lhs_omega, rhs_omega;
};
MomentIdentity gaussian_moment_identity(const Eigen::Vector3d& A,
                                        const UnitVector& n, double kBT);

} // namespace polykin
