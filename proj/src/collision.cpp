#include "polykin/collision.hpp"

#include "polykin/quadrature.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace polykin {

VelocityAxis::VelocityAxis(int n_cells, double vmax_) : n(n_cells), vmax(vmax_) {
  if (n < 8) {
    throw std::invalid_argument(
        "VelocityAxis: at least 8 cells per axis are required, got " +
        std::to_string(n));
  }
  if (!(vmax > 0.0)) {
    throw std::invalid_argument("VelocityAxis: vmax must be positive");
  }
  h = 2.0 * vmax / n;
  centers.resize(n);
  for (int i = 0; i < n; ++i) centers[i] = -vmax + (i + 0.5) * h;
}

VelocityGrid::VelocityGrid(const MaxwellianSpec& spec,
                           std::vector<VelocityAxis> axs)
    : maxwell(spec), axes(std::move(axs)) {
  if (axes.empty() || axes.size() > 2) {
    throw std::invalid_argument("VelocityGrid: one or two axes supported");
  }
  double need = min_vmax(maxwell.kBT);
  for (const auto& ax : axes) {
    if (ax.vmax < need * (1.0 - 1e-12)) {
      throw std::invalid_argument(
          "VelocityGrid: vmax = " + std::to_string(ax.vmax) +
          " truncates the equilibrium; need at least 6*sqrt(2 kBT) = " +
          std::to_string(need));
    }
  }
}

int VelocityGrid::size() const {
  int s = 1;
  for (const auto& ax : axes) s *= ax.n;
  return s;
}

double VelocityGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& ax : axes) v *= ax.h;
  return v;
}

namespace {

// Face weight with midpoint deconvolution: the scheme compares cell averages,
// so the face density is corrected by -h^2/24 * M''.  On coarse grids the
// correction can overshoot in the deep tail where M is already negligible; a
// floor keeps every face weight positive so the sign structure (dissipation,
// M-weighted symmetry) stays exact.
double face_weight(const MaxwellianSpec& spec, double v, double h) {
  double m = spec.density(v);
  double s2 = spec.variance();
  double factor = 1.0 - h * h / 24.0 * (v * v / (s2 * s2) - 1.0 / s2);
  return m * std::max(factor, 0.05);
}

} // namespace

CollisionOperator::CollisionOperator(VelocityGrid grid,
                                     std::vector<double> zetas)
    : grid_(std::move(grid)), zetas_(std::move(zetas)) {
  if (zetas_.size() != grid_.axes.size()) {
    throw std::invalid_argument(
        "CollisionOperator: need one friction coefficient per axis");
  }
  for (double z : zetas_) {
    if (!(z > 0.0)) {
      throw std::invalid_argument(
          "CollisionOperator: friction coefficients must be positive");
    }
  }
  const auto& spec = grid_.maxwell;
  for (const auto& ax : grid_.axes) {
    Eigen::VectorXd m(ax.n), mf(ax.n - 1);
    for (int i = 0; i < ax.n; ++i) m[i] = spec.density(ax.centers[i]);
    for (int i = 0; i + 1 < ax.n; ++i) {
      mf[i] = face_weight(spec, ax.face(i + 1), ax.h);
    }
    M_axis_.push_back(std::move(m));
    Mface_axis_.push_back(std::move(mf));
  }
  M_.resize(grid_.size());
  if (grid_.dims() == 1) {
    M_ = M_axis_[0];
  } else {
    int n0 = grid_.axes[0].n, n1 = grid_.axes[1].n;
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j < n1; ++j) M_[i * n1 + j] = M_axis_[0][i] * M_axis_[1][j];
  }
}

double CollisionOperator::mass(const Eigen::VectorXd& f) const {
  return f.sum() * grid_.cell_volume();
}

Eigen::VectorXd CollisionOperator::apply(const Eigen::VectorXd& f) const {
  if (f.size() != grid_.size()) {
    throw std::invalid_argument("CollisionOperator::apply: size mismatch");
  }
  Eigen::VectorXd u = f.cwiseQuotient(M_);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  if (grid_.dims() == 1) {
    const auto& ax = grid_.axes[0];
    const auto& mf = Mface_axis_[0];
    double c = zetas_[0] * grid_.maxwell.variance() / (ax.h * ax.h);
    for (int i = 0; i < ax.n; ++i) {
      double flux_hi = (i + 1 < ax.n) ? mf[i] * (u[i + 1] - u[i]) : 0.0;
      double flux_lo = (i > 0) ? mf[i - 1] * (u[i] - u[i - 1]) : 0.0;
      out[i] = c * (flux_hi - flux_lo);
    }
    return out;
  }
  int n0 = grid_.axes[0].n, n1 = grid_.axes[1].n;
  double c0 = zetas_[0] * grid_.maxwell.variance() /
              (grid_.axes[0].h * grid_.axes[0].h);
  double c1 = zetas_[1] * grid_.maxwell.variance() /
              (grid_.axes[1].h * grid_.axes[1].h);
  const auto& mf0 = Mface_axis_[0];
  const auto& mf1 = Mface_axis_[1];
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      int k = i * n1 + j;
      double acc = 0.0;
      if (i + 1 < n0) acc += c0 * mf0[i] * M_axis_[1][j] * (u[k + n1] - u[k]);
      if (i > 0) acc -= c0 * mf0[i - 1] * M_axis_[1][j] * (u[k] - u[k - n1]);
      if (j + 1 < n1) acc += c1 * M_axis_[0][i] * mf1[j] * (u[k + 1] - u[k]);
      if (j > 0) acc -= c1 * M_axis_[0][i] * mf1[j - 1] * (u[k] - u[k - 1]);
      out[k] = acc;
    }
  }
  return out;
}

double CollisionOperator::dissipation(const Eigen::VectorXd& f) const {
  Eigen::VectorXd qf = apply(f);
  return qf.cwiseProduct(f.cwiseQuotient(M_)).sum() * grid_.cell_volume();
}

namespace {

// Symmetric u-space matrix B with Q f = B (f/M), plus the discrete
// Maxwellian mass vector m_i = M_i * vol, assembled for the constrained
// solves.  B 1 = 0 and B = B^T exactly by construction.
struct USpaceSystem {
  Eigen::SparseMatrix<double> aug; // [[B, m], [m^T, 0]]
  Eigen::VectorXd mvec;
};

USpaceSystem build_uspace_system(const VelocityGrid& grid,
                                 const std::vector<double>& zetas,
                                 const std::vector<Eigen::VectorXd>& M_axis,
                                 const std::vector<Eigen::VectorXd>& Mface_axis,
                                 const Eigen::VectorXd& M) {
  int n = grid.size();
  double vol = grid.cell_volume();
  std::vector<Eigen::Triplet<double>> trip;
  auto add_pair = [&](int a, int b, double w) {
    trip.emplace_back(a, b, w);
    trip.emplace_back(b, a, w);
    trip.emplace_back(a, a, -w);
    trip.emplace_back(b, b, -w);
  };
  if (grid.dims() == 1) {
    const auto& ax = grid.axes[0];
    double c = zetas[0] * grid.maxwell.variance() / (ax.h * ax.h);
    for (int i = 0; i + 1 < ax.n; ++i) add_pair(i, i + 1, c * Mface_axis[0][i]);
  } else {
    int n0 = grid.axes[0].n, n1 = grid.axes[1].n;
    double c0 =
        zetas[0] * grid.maxwell.variance() / (grid.axes[0].h * grid.axes[0].h);
    double c1 =
        zetas[1] * grid.maxwell.variance() / (grid.axes[1].h * grid.axes[1].h);
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n1; ++j) {
        int k = i * n1 + j;
        if (i + 1 < n0)
          add_pair(k, k + n1, c0 * Mface_axis[0][i] * M_axis[1][j]);
        if (j + 1 < n1)
          add_pair(k, k + 1, c1 * M_axis[0][i] * Mface_axis[1][j]);
      }
    }
  }
  USpaceSystem sys;
  sys.mvec = M * vol;
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, n, sys.mvec[i]);
    trip.emplace_back(n, i, sys.mvec[i]);
  }
  sys.aug.resize(n + 1, n + 1);
  sys.aug.setFromTriplets(trip.begin(), trip.end());
  sys.aug.makeCompressed();
  return sys;
}

Eigen::VectorXd solve_constrained(const USpaceSystem& sys,
                                  const Eigen::VectorXd& rhs_top,
                                  double rhs_constraint) {
  int n = static_cast<int>(rhs_top.size());
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = rhs_top;
  rhs[n] = rhs_constraint;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(sys.aug);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("CollisionOperator: factorization failed");
  }
  Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("CollisionOperator: solve failed");
  }
  return sol.head(n);
}

} // namespace

Eigen::VectorXd CollisionOperator::solve_cell_problem(
    const Eigen::VectorXd& g) const {
  if (g.size() != grid_.size()) {
    throw std::invalid_argument(
        "CollisionOperator::solve_cell_problem: size mismatch");
  }
  double scale = 1.0 + g.cwiseAbs().sum() * grid_.cell_volume();
  if (std::abs(mass(g)) > 1e-10 * scale) {
    throw std::invalid_argument(
        "CollisionOperator::solve_cell_problem: right-hand side must have "
        "zero mean (solvability), got mean mass " +
        std::to_string(mass(g)));
  }
  USpaceSystem sys =
      build_uspace_system(grid_, zetas_, M_axis_, Mface_axis_, M_);
  Eigen::VectorXd u = solve_constrained(sys, g, 0.0);
  return M_.cwiseProduct(u);
}

Eigen::VectorXd CollisionOperator::solve_stationary() const {
  USpaceSystem sys =
      build_uspace_system(grid_, zetas_, M_axis_, Mface_axis_, M_);
  Eigen::VectorXd u = solve_constrained(
      sys, Eigen::VectorXd::Zero(grid_.size()), mass(M_));
  return M_.cwiseProduct(u);
}

void CollisionOperator::axis_bands(int axis, Eigen::VectorXd* lower,
                                   Eigen::VectorXd* diag,
                                   Eigen::VectorXd* upper) const {
  if (axis < 0 || axis >= grid_.dims()) {
    throw std::invalid_argument("CollisionOperator::axis_bands: bad axis");
  }
  const auto& ax = grid_.axes[axis];
  const auto& m = M_axis_[axis];
  const auto& mf = Mface_axis_[axis];
  double c = zetas_[axis] * grid_.maxwell.variance() / (ax.h * ax.h);
  lower->setZero(ax.n);
  diag->setZero(ax.n);
  upper->setZero(ax.n);
  for (int i = 0; i < ax.n; ++i) {
    double hi = (i + 1 < ax.n) ? mf[i] : 0.0;
    double lo = (i > 0) ? mf[i - 1] : 0.0;
    (*diag)[i] = -c * (hi + lo) / m[i];
    if (i + 1 < ax.n) (*upper)[i] = c * hi / m[i + 1];
    if (i > 0) (*lower)[i] = c * lo / m[i - 1];
  }
}

CellSolutions analytic_cell_solutions(const MaxwellianSpec& spec,
                                      double zeta_p, double zeta_q) {
  double s2 = spec.variance();
  auto density = [spec](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    double s2 = spec.variance();
    return std::exp(-(p.squaredNorm() + q.squaredNorm()) / (2.0 * s2));
  };
  CellSolutions cs;
  cs.a = [density, zeta_p](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    return Eigen::VectorXd(-p * density(p, q) / zeta_p);
  };
  cs.b = [density, zeta_q](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    return Eigen::VectorXd(-q * density(p, q) / zeta_q);
  };
  cs.c = [density, zeta_p, s2](const Eigen::VectorXd& p,
                               const Eigen::VectorXd& q) {
    return Eigen::VectorXd(p * density(p, q) / (zeta_p * s2));
  };
  cs.d = [density, zeta_q, s2](const Eigen::VectorXd& p,
                               const Eigen::VectorXd& q) {
    return Eigen::VectorXd(q * density(p, q) / (zeta_q * s2));
  };
  return cs;
}

MomentIdentity gaussian_moment_identity(const Eigen::Vector3d& A,
                                        const UnitVector& n, double kBT) {
  QuadratureRule gh = gauss_hermite(12);
  int nq = static_cast<int>(gh.nodes.size());
  double s = std::sqrt(2.0 * kBT); // substitution v = s x maps onto exp(-x^2)

  // Translational part: int over R^3 of exp(-|p|^2/(2 kBT)) (p.A) p dp.
  Eigen::Vector3d lhs_p_part = Eigen::Vector3d::Zero();
  for (int i = 0; i < nq; ++i) {
    for (int j = 0; j < nq; ++j) {
      for (int k = 0; k < nq; ++k) {
        Eigen::Vector3d p(s * gh.nodes[i], s * gh.nodes[j], s * gh.nodes[k]);
        double w = gh.weights[i] * gh.weights[j] * gh.weights[k];
        lhs_p_part += w * (p.dot(A)) * p;
      }
    }
  }
  lhs_p_part *= s * s * s;
  double mass_p = std::pow(s * std::sqrt(M_PI), 3); // int exp(-|p|^2/(2kBT))

  // Rotational part over the tangent plane at n: omega = K (w1, w2, 0)^T
  // with K = rotate_to_pole(n), so K maps (e1, e2) to a tangent frame.
  Eigen::Matrix3d K = rotate_to_pole(n);
  Eigen::Vector3d lhs_w_part = Eigen::Vector3d::Zero();
  double mass_w = 0.0;
  for (int i = 0; i < nq; ++i) {
    for (int j = 0; j < nq; ++j) {
      Eigen::Vector3d omega =
          K * Eigen::Vector3d(s * gh.nodes[i], s * gh.nodes[j], 0.0);
      double w = gh.weights[i] * gh.weights[j];
      lhs_w_part += w * (omega.dot(A)) * omega;
      mass_w += w;
    }
  }
  lhs_w_part *= s * s;
  mass_w *= s * s;

  Eigen::Matrix3d tangent_proj =
      Eigen::Matrix3d::Identity() - n.vec() * n.vec().transpose();
  MomentIdentity out;
  out.lhs_p = lhs_p_part * mass_w;
  out.lhs_omega = lhs_w_part * mass_p;
  double total_mass = mass_p * (2.0 * M_PI * kBT);
  out.rhs_p = kBT * A * total_mass;
  out.rhs_omega = kBT * (tangent_proj * A) * total_mass;
  return out;
}

} // namespace polykin
