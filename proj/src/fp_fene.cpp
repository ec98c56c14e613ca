#include "polykin/fp_fene.hpp"

#include "polykin/detail/tridiag.hpp"
#include "polykin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polykin {

namespace {

// Exact (16-point Gauss) cell averages of the Gibbs factor e^{-U/kBT} with
// respect to the cell measure: weight 1 on intervals, weight r on annuli.
// Using averages rather than midpoint values makes the discrete steady state
// carry the exact analytic cell masses, so its normalization agrees with the
// continuum one to quadrature precision instead of O(h^2).
Eigen::VectorXd gibbs_cell_averages(const BallGrid& grid, const Spring& spring,
                                    double kBT) {
  const QuadratureRule gl = gauss_legendre(16);
  Eigen::VectorXd avg(grid.nr);
  for (int i = 0; i < grid.nr; ++i) {
    const double lo = grid.r_face(i), hi = grid.r_face(i + 1);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double num = 0.0, den = 0.0;
    for (int q = 0; q < gl.nodes.size(); ++q) {
      const double r = mid + half * gl.nodes[q];
      const double w =
          gl.weights[q] * (grid.dim == 2 ? std::abs(r) : 1.0);
      num += w * std::exp(-spring.radial_potential(std::abs(r)) / kBT);
      den += w;
    }
    avg[i] = num / den;
  }
  return avg;
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Limited cell slopes for second-order upwinding; one-sided cells get zero
// slope so reconstructed face values stay within the data range.
void minmod_slopes(const double* rho, int n, double* slope) {
  slope[0] = 0.0;
  slope[n - 1] = 0.0;
  for (int i = 1; i + 1 < n; ++i)
    slope[i] = minmod(rho[i + 1] - rho[i], rho[i] - rho[i - 1]);
}

void minmod_slopes_periodic(const double* rho, int n, double* slope) {
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n, im = (i + n - 1) % n;
    slope[i] = minmod(rho[ip] - rho[i], rho[i] - rho[im]);
  }
}

double upwind_face(double vel, double rho_lo, double slope_lo, double rho_hi,
                   double slope_hi) {
  return vel >= 0.0 ? vel * (rho_lo + 0.5 * slope_lo)
                    : vel * (rho_hi - 0.5 * slope_hi);
}

} // namespace

BallGrid BallGrid::interval(int n_cells, double half_width) {
  if (n_cells < 8)
    throw std::invalid_argument("BallGrid::interval: need at least 8 cells");
  if (!(half_width > 0.0))
    throw std::invalid_argument("BallGrid::interval: half_width must be > 0");
  BallGrid g;
  g.dim = 1;
  g.nr = n_cells;
  g.nphi = 1;
  g.radius = half_width;
  return g;
}

BallGrid BallGrid::disk(int n_r, int n_phi, double radius) {
  if (n_r < 8 || n_phi < 8)
    throw std::invalid_argument("BallGrid::disk: need at least 8x8 cells");
  if (!(radius > 0.0))
    throw std::invalid_argument("BallGrid::disk: radius must be > 0");
  BallGrid g;
  g.dim = 2;
  g.nr = n_r;
  g.nphi = n_phi;
  g.radius = radius;
  return g;
}

FeneLimitSolver::FeneLimitSolver(BallGrid grid, FeneLimitParams par)
    : grid_(grid), par_(par) {
  if (!(par_.zeta > 0.0) || !(par_.kBT > 0.0))
    throw std::invalid_argument("FeneLimitSolver: zeta and kBT must be > 0");
  if (!(par_.cfl > 0.0) || par_.cfl > 0.9)
    throw std::invalid_argument("FeneLimitSolver: cfl must lie in (0, 0.9]");
  if (par_.spring.type == SpringType::fene) {
    const double n0 = par_.spring.max_extension();
    if (std::abs(grid_.radius - n0) > 1e-12 * n0)
      throw std::invalid_argument(
          "FeneLimitSolver: grid radius must equal the FENE extensibility");
  }
  gibbs_center_ = gibbs_cell_averages(grid_, par_.spring, par_.kBT);
  gibbs_face_.resize(grid_.nr - 1);
  for (int i = 0; i + 1 < grid_.nr; ++i)
    gibbs_face_[i] = std::exp(
        -par_.spring.radial_potential(std::abs(grid_.r_face(i + 1))) /
        par_.kBT);
}

Eigen::VectorXd FeneLimitSolver::equilibrium() const {
  Eigen::VectorXd rho(grid_.size());
  double z = 0.0;
  for (int i = 0; i < grid_.nr; ++i)
    for (int j = 0; j < grid_.nphi; ++j) {
      rho[grid_.flat(i, j)] = gibbs_center_[i];
      z += gibbs_center_[i] * grid_.cell_measure(i);
    }
  return rho / z;
}

double FeneLimitSolver::mass(const Eigen::VectorXd& rho) const {
  double m = 0.0;
  for (int i = 0; i < grid_.nr; ++i)
    for (int j = 0; j < grid_.nphi; ++j)
      m += rho[grid_.flat(i, j)] * grid_.cell_measure(i);
  return m;
}

double FeneLimitSolver::cfl_dt() const {
  // Advective stability plus a diffusion accuracy rate sqrt(D)/h: the
  // Crank-Nicolson half-steps are unconditionally stable, but capping dt at
  // cfl*h/sqrt(D) keeps their O(dt^2) error at the same order as the O(h^2)
  // spatial truncation, so refining the grid refines the answer.
  double max_rate = std::sqrt(par_.diffusion()) / grid_.hr();
  if (grid_.dim == 2)
    max_rate = std::max(max_rate, std::sqrt(par_.diffusion()) /
                                      (grid_.radius * grid_.hphi()));
  if (grid_.dim == 1) {
    const double k = par_.kappa(0, 0);
    for (int i = 1; i < grid_.nr; ++i)
      max_rate =
          std::max(max_rate, std::abs(k * grid_.r_face(i)) / grid_.hr());
  } else {
    for (int j = 0; j < grid_.nphi; ++j) {
      const double phi = grid_.phi_center(j);
      const Eigen::Vector2d nh(std::cos(phi), std::sin(phi));
      const double ar = nh.dot(par_.kappa * nh);
      max_rate =
          std::max(max_rate, std::abs(ar) * grid_.radius / grid_.hr());
    }
    for (int j = 0; j < grid_.nphi; ++j) {
      const double phi = (j + 1.0) * grid_.hphi();
      const Eigen::Vector2d nh(std::cos(phi), std::sin(phi));
      const Eigen::Vector2d ephi(-std::sin(phi), std::cos(phi));
      const double aphi = ephi.dot(par_.kappa * nh);
      // angular rate |a_phi| / (r hphi) with a_phi growing like r cancels r.
      max_rate = std::max(max_rate, std::abs(aphi) / grid_.hphi());
    }
  }
  return par_.cfl / max_rate;
}

void FeneLimitSolver::advect(Eigen::VectorXd& rho, double dt) const {
  const int nr = grid_.nr, nphi = grid_.nphi;
  auto tendency = [&](const Eigen::VectorXd& r, Eigen::VectorXd& out) {
    out.setZero();
    if (grid_.dim == 1) {
      const double k = par_.kappa(0, 0), h = grid_.hr();
      Eigen::VectorXd slope(nr);
      minmod_slopes(r.data(), nr, slope.data());
      double flux_lo = 0.0; // zero flux at the domain wall
      for (int i = 0; i < nr; ++i) {
        double flux_hi = 0.0;
        if (i + 1 < nr)
          flux_hi = upwind_face(k * grid_.r_face(i + 1), r[i], slope[i],
                                r[i + 1], slope[i + 1]);
        out[i] = -(flux_hi - flux_lo) / h;
        flux_lo = flux_hi;
      }
      return;
    }
    const double hr = grid_.hr(), hphi = grid_.hphi();
    // radial sweep, one column per angle
    Eigen::VectorXd col(nr), slope(nr);
    for (int j = 0; j < nphi; ++j) {
      const double phi = grid_.phi_center(j);
      const Eigen::Vector2d nh(std::cos(phi), std::sin(phi));
      const double drift = nh.dot(par_.kappa * nh); // a_r = drift * r
      for (int i = 0; i < nr; ++i) col[i] = r[grid_.flat(i, j)];
      minmod_slopes(col.data(), nr, slope.data());
      double flux_lo = 0.0; // r = 0 face has zero measure
      for (int i = 0; i < nr; ++i) {
        double flux_hi = 0.0;
        if (i + 1 < nr) {
          const double rf = grid_.r_face(i + 1);
          flux_hi = upwind_face(drift * rf, col[i], slope[i], col[i + 1],
                                slope[i + 1]) *
                    rf * hphi; // times face length
        }
        out[grid_.flat(i, j)] -= (flux_hi - flux_lo) / grid_.cell_measure(i);
        flux_lo = flux_hi;
      }
    }
    // angular sweep, one ring per radius
    Eigen::VectorXd ring(nphi), rslope(nphi), flux(nphi);
    for (int i = 0; i < nr; ++i) {
      const double rc = grid_.r_center(i);
      for (int j = 0; j < nphi; ++j) ring[j] = r[grid_.flat(i, j)];
      minmod_slopes_periodic(ring.data(), nphi, rslope.data());
      for (int j = 0; j < nphi; ++j) { // face between ring[j] and ring[j+1]
        const double phi = (j + 1.0) * hphi;
        const Eigen::Vector2d nh(std::cos(phi), std::sin(phi));
        const Eigen::Vector2d ephi(-std::sin(phi), std::cos(phi));
        const double aphi = rc * ephi.dot(par_.kappa * nh);
        const int jp = (j + 1) % nphi;
        flux[j] = upwind_face(aphi, ring[j], rslope[j], ring[jp], rslope[jp]) *
                  hr; // times face length
      }
      for (int j = 0; j < nphi; ++j) {
        const int jm = (j + nphi - 1) % nphi;
        out[grid_.flat(i, j)] -= (flux[j] - flux[jm]) / grid_.cell_measure(i);
      }
    }
  };

  Eigen::VectorXd t1(rho.size()), stage(rho.size()), t2(rho.size());
  tendency(rho, t1);
  stage = rho + dt * t1;
  tendency(stage, t2);
  rho = 0.5 * rho + 0.5 * (stage + dt * t2);
}

void FeneLimitSolver::diffuse_radial(Eigen::VectorXd& rho, double dt) const {
  // Crank-Nicolson on the Gibbs-weighted flux form: with W the (positive
  // semi-definite) face-transmission matrix acting on rho/gibbs,
  //   (Area + W/2) rho_new = (Area - W/2) rho_old.
  // Both sides share the kernel rho = gibbs, so the discrete Gibbs state is
  // an exact fixed point, and both sides have matching column sums, so mass
  // is conserved to rounding.
  // A line whose Crank-Nicolson update rings negative (stiff near-wall
  // transients) is redone with backward Euler: first order but an M-matrix
  // solve, so positive data stays positive.  Smooth lines keep second order.
  const int nr = grid_.nr, nphi = grid_.nphi;
  const double d = par_.diffusion(), hr = grid_.hr();
  Eigen::VectorXd a(nr), b(nr), c(nr), x(nr), scratch(nr);
  Eigen::VectorXd abe(nr), bbe(nr), cbe(nr);
  // Face transmission coefficients dt * D * gibbs(face) * face_length / hr.
  Eigen::VectorXd w(nr - 1);
  for (int i = 0; i + 1 < nr; ++i) {
    const double face_len = grid_.dim == 1 ? 1.0 : grid_.r_face(i + 1) * grid_.hphi();
    w[i] = dt * d * gibbs_face_[i] * face_len / hr;
  }
  for (int i = 0; i < nr; ++i) {
    const double area = grid_.cell_measure(i);
    const double wlo = i > 0 ? w[i - 1] : 0.0;
    const double whi = i + 1 < nr ? w[i] : 0.0;
    a[i] = i > 0 ? -0.5 * wlo / gibbs_center_[i - 1] : 0.0;
    b[i] = area + 0.5 * (wlo + whi) / gibbs_center_[i];
    c[i] = i + 1 < nr ? -0.5 * whi / gibbs_center_[i + 1] : 0.0;
    abe[i] = 2.0 * a[i];
    bbe[i] = area + (wlo + whi) / gibbs_center_[i];
    cbe[i] = 2.0 * c[i];
  }
  for (int j = 0; j < nphi; ++j) {
    for (int i = 0; i < nr; ++i) {
      const double ratio = rho[grid_.flat(i, j)] / gibbs_center_[i];
      double rhs = rho[grid_.flat(i, j)] * grid_.cell_measure(i);
      if (i > 0)
        rhs += 0.5 * w[i - 1] *
               (rho[grid_.flat(i - 1, j)] / gibbs_center_[i - 1] - ratio);
      if (i + 1 < nr)
        rhs += 0.5 * w[i] *
               (rho[grid_.flat(i + 1, j)] / gibbs_center_[i + 1] - ratio);
      x[i] = rhs;
    }
    detail::solve_tridiagonal(a, b, c, x, scratch);
    if (x.minCoeff() < 0.0) {
      for (int i = 0; i < nr; ++i)
        x[i] = rho[grid_.flat(i, j)] * grid_.cell_measure(i);
      detail::solve_tridiagonal(abe, bbe, cbe, x, scratch);
    }
    for (int i = 0; i < nr; ++i) rho[grid_.flat(i, j)] = x[i];
  }
}

void FeneLimitSolver::diffuse_angular(Eigen::VectorXd& rho, double dt) const {
  // Crank-Nicolson ring by ring: (I + (k/2) L)x = (I - (k/2) L) rho with L
  // the periodic second-difference matrix.
  // Rings driven negative by the explicit half fall back to backward Euler.
  const int nr = grid_.nr, nphi = grid_.nphi;
  const double d = par_.diffusion(), hphi = grid_.hphi();
  Eigen::VectorXd a(nphi), b(nphi), c(nphi), x(nphi);
  for (int i = 0; i < nr; ++i) {
    const double rc = grid_.r_center(i);
    const double k = 0.5 * dt * d / (rc * rc * hphi * hphi);
    a.setConstant(-k);
    c.setConstant(-k);
    b.setConstant(1.0 + 2.0 * k);
    for (int j = 0; j < nphi; ++j) {
      const int jm = (j + nphi - 1) % nphi, jp = (j + 1) % nphi;
      x[j] = rho[grid_.flat(i, j)] +
             k * (rho[grid_.flat(i, jm)] - 2.0 * rho[grid_.flat(i, j)] +
                  rho[grid_.flat(i, jp)]);
    }
    detail::solve_cyclic_tridiagonal(a, b, c, x);
    if (x.minCoeff() < 0.0) {
      a.setConstant(-2.0 * k);
      c.setConstant(-2.0 * k);
      b.setConstant(1.0 + 4.0 * k);
      for (int j = 0; j < nphi; ++j) x[j] = rho[grid_.flat(i, j)];
      detail::solve_cyclic_tridiagonal(a, b, c, x);
    }
    for (int j = 0; j < nphi; ++j) rho[grid_.flat(i, j)] = x[j];
  }
}

void FeneLimitSolver::check_positive(const Eigen::VectorXd& rho) const {
  const double floor = -1e-12 * std::max(1.0, rho.cwiseAbs().maxCoeff());
  if (rho.minCoeff() < floor)
    throw std::runtime_error(
        "FeneLimitSolver: density dropped below the negativity tolerance");
}

void FeneLimitSolver::step(Eigen::VectorXd& rho, double dt) const {
  // Palindromic (Strang) splitting keeps the step second order in dt; the
  // advective sub-step is explicit Heun, the diffusive half-steps are
  // Crank-Nicolson.
  diffuse_radial(rho, 0.5 * dt);
  if (grid_.dim == 2) diffuse_angular(rho, 0.5 * dt);
  if (!par_.kappa.isZero(0.0)) advect(rho, dt);
  if (grid_.dim == 2) diffuse_angular(rho, 0.5 * dt);
  diffuse_radial(rho, 0.5 * dt);
  check_positive(rho);
}

void FeneLimitSolver::advance(Eigen::VectorXd& rho, double t_span,
                              double dt_target) const {
  if (rho.size() != grid_.size())
    throw std::invalid_argument("FeneLimitSolver::advance: size mismatch");
  if (t_span < 0.0)
    throw std::invalid_argument("FeneLimitSolver::advance: negative span");
  if (t_span == 0.0) return;
  const double limit = cfl_dt(); // advective stability + diffusion accuracy
  const double dt0 = dt_target > 0.0 ? std::min(dt_target, limit) : limit;
  const long n_steps =
      std::max<long>(1, static_cast<long>(std::ceil(t_span / dt0 - 1e-9)));
  const double dt = t_span / n_steps;
  for (long s = 0; s < n_steps; ++s) step(rho, dt);
}

Eigen::VectorXd solve_fene_limit(const Eigen::VectorXd& rho0,
                                 const BallGrid& grid,
                                 const FeneLimitParams& par, double t_final,
                                 double dt_target) {
  FeneLimitSolver solver(grid, par);
  Eigen::VectorXd rho = rho0;
  solver.advance(rho, t_final, dt_target);
  return rho;
}

PeriodicFeneLimitSolver::PeriodicFeneLimitSolver(int n_x, BallGrid interval,
                                                 PeriodicFlowProfile flow,
                                                 FeneLimitParams par)
    : nx_(n_x), grid_(interval), flow_(flow), par_(par) {
  if (nx_ < 8)
    throw std::invalid_argument(
        "PeriodicFeneLimitSolver: need at least 8 cells in x");
  if (grid_.dim != 1)
    throw std::invalid_argument(
        "PeriodicFeneLimitSolver: connector grid must be one-dimensional");
  if (!(flow_.length > 0.0))
    throw std::invalid_argument(
        "PeriodicFeneLimitSolver: period length must be > 0");
  FeneLimitSolver probe(grid_, par_); // runs the shared parameter checks
  gibbs_center_ = gibbs_cell_averages(grid_, par_.spring, par_.kBT);
  gibbs_face_.resize(grid_.nr - 1);
  for (int i = 0; i + 1 < grid_.nr; ++i)
    gibbs_face_[i] = std::exp(
        -par_.spring.radial_potential(std::abs(grid_.r_face(i + 1))) /
        par_.kBT);
}

Eigen::MatrixXd PeriodicFeneLimitSolver::uniform_equilibrium() const {
  const double hn = grid_.hr();
  const double zn = gibbs_center_.sum() * hn;
  Eigen::MatrixXd rho(nx_, grid_.nr);
  for (int i = 0; i < nx_; ++i)
    rho.row(i) = gibbs_center_.transpose() / (zn * flow_.length);
  return rho;
}

double PeriodicFeneLimitSolver::mass(const Eigen::MatrixXd& rho) const {
  return rho.sum() * (flow_.length / nx_) * grid_.hr();
}

Eigen::VectorXd PeriodicFeneLimitSolver::x_marginal(
    const Eigen::MatrixXd& rho) const {
  return rho.rowwise().sum() * grid_.hr();
}

double PeriodicFeneLimitSolver::cfl_dt() const {
  const double hx = flow_.length / nx_, hn = grid_.hr();
  // Diffusion accuracy rate (see FeneLimitSolver::cfl_dt) on both axes.
  double max_rate =
      std::sqrt(par_.diffusion()) / std::min(hn, hx);
  for (int i = 0; i < nx_; ++i) {
    const double xf = i * hx;
    max_rate = std::max(max_rate, std::abs(flow_.u(xf)) / hx);
    const double du = std::abs(flow_.du(x_center(i)));
    max_rate = std::max(max_rate, du * grid_.radius / hn);
  }
  return par_.cfl / max_rate;
}

void PeriodicFeneLimitSolver::step(Eigen::MatrixXd& rho, double dt) const {
  const int nn = grid_.nr;
  const double hx = flow_.length / nx_, hn = grid_.hr();

  auto tendency = [&](const Eigen::MatrixXd& r, Eigen::MatrixXd& out) {
    out.setZero();
    // transport in x, one periodic column per connector cell
    Eigen::VectorXd col(nx_), slope(nx_), flux(nx_);
    for (int k = 0; k < nn; ++k) {
      col = r.col(k);
      minmod_slopes_periodic(col.data(), nx_, slope.data());
      for (int i = 0; i < nx_; ++i) { // face between cells i and i+1
        const double vel = flow_.u((i + 1.0) * hx);
        const int ip = (i + 1) % nx_;
        flux[i] = upwind_face(vel, col[i], slope[i], col[ip], slope[ip]);
      }
      for (int i = 0; i < nx_; ++i) {
        const int im = (i + nx_ - 1) % nx_;
        out(i, k) -= (flux[i] - flux[im]) / hx;
      }
    }
    // transport in n, one bounded row per x cell
    Eigen::VectorXd row(nn), nslope(nn);
    for (int i = 0; i < nx_; ++i) {
      const double du = flow_.du(x_center(i));
      row = r.row(i);
      minmod_slopes(row.data(), nn, nslope.data());
      double flux_lo = 0.0;
      for (int k = 0; k < nn; ++k) {
        double flux_hi = 0.0;
        if (k + 1 < nn)
          flux_hi = upwind_face(du * grid_.r_face(k + 1), row[k], nslope[k],
                                row[k + 1], nslope[k + 1]);
        out(i, k) -= (flux_hi - flux_lo) / hn;
        flux_lo = flux_hi;
      }
    }
  };

  const double d = par_.diffusion();
  // Crank-Nicolson half-steps (cf. FeneLimitSolver::diffuse_radial); lines
  // that ring negative fall back to backward Euler, which is M-matrix
  // positive.
  auto diffuse_n = [&](double tau) {
    Eigen::VectorXd a(nn), b(nn), c(nn), x(nn), scratch(nn);
    Eigen::VectorXd abe(nn), bbe(nn), cbe(nn);
    const double lam = 0.5 * tau * d / (hn * hn);
    for (int k = 0; k < nn; ++k) {
      const double wlo = k > 0 ? lam * gibbs_face_[k - 1] : 0.0;
      const double whi = k + 1 < nn ? lam * gibbs_face_[k] : 0.0;
      a[k] = k > 0 ? -wlo / gibbs_center_[k - 1] : 0.0;
      b[k] = 1.0 + (wlo + whi) / gibbs_center_[k];
      c[k] = k + 1 < nn ? -whi / gibbs_center_[k + 1] : 0.0;
      abe[k] = 2.0 * a[k];
      bbe[k] = 1.0 + 2.0 * (wlo + whi) / gibbs_center_[k];
      cbe[k] = 2.0 * c[k];
    }
    for (int i = 0; i < nx_; ++i) {
      for (int k = 0; k < nn; ++k) {
        const double ratio = rho(i, k) / gibbs_center_[k];
        double rhs = rho(i, k);
        if (k > 0)
          rhs += lam * gibbs_face_[k - 1] *
                 (rho(i, k - 1) / gibbs_center_[k - 1] - ratio);
        if (k + 1 < nn)
          rhs += lam * gibbs_face_[k] *
                 (rho(i, k + 1) / gibbs_center_[k + 1] - ratio);
        x[k] = rhs;
      }
      detail::solve_tridiagonal(a, b, c, x, scratch);
      if (x.minCoeff() < 0.0) {
        x = rho.row(i);
        detail::solve_tridiagonal(abe, bbe, cbe, x, scratch);
      }
      rho.row(i) = x;
    }
  };
  auto diffuse_x = [&](double tau) {
    const double k = 0.5 * tau * d / (hx * hx);
    Eigen::VectorXd a = Eigen::VectorXd::Constant(nx_, -k);
    Eigen::VectorXd c = Eigen::VectorXd::Constant(nx_, -k);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(nx_, 1.0 + 2.0 * k);
    Eigen::VectorXd abe = Eigen::VectorXd::Constant(nx_, -2.0 * k);
    Eigen::VectorXd cbe = Eigen::VectorXd::Constant(nx_, -2.0 * k);
    Eigen::VectorXd bbe = Eigen::VectorXd::Constant(nx_, 1.0 + 4.0 * k);
    Eigen::VectorXd x(nx_);
    for (int kk = 0; kk < nn; ++kk) {
      for (int i = 0; i < nx_; ++i) {
        const int im = (i + nx_ - 1) % nx_, ip = (i + 1) % nx_;
        x[i] = rho(i, kk) +
               k * (rho(im, kk) - 2.0 * rho(i, kk) + rho(ip, kk));
      }
      detail::solve_cyclic_tridiagonal(a, b, c, x);
      if (x.minCoeff() < 0.0) {
        x = rho.col(kk);
        detail::solve_cyclic_tridiagonal(abe, bbe, cbe, x);
      }
      rho.col(kk) = x;
    }
  };

  // Palindromic split: n(dt/2) x(dt/2) advect(dt) x(dt/2) n(dt/2).
  diffuse_n(0.5 * dt);
  diffuse_x(0.5 * dt);
  if (flow_.amplitude != 0.0) {
    Eigen::MatrixXd t1(nx_, nn), t2(nx_, nn), stage(nx_, nn);
    tendency(rho, t1);
    stage = rho + dt * t1;
    tendency(stage, t2);
    rho = 0.5 * rho + 0.5 * (stage + dt * t2);
  }
  diffuse_x(0.5 * dt);
  diffuse_n(0.5 * dt);

  const double floor = -1e-12 * std::max(1.0, rho.cwiseAbs().maxCoeff());
  if (rho.minCoeff() < floor)
    throw std::runtime_error(
        "PeriodicFeneLimitSolver: density dropped below the negativity "
        "tolerance");
}

void PeriodicFeneLimitSolver::advance(Eigen::MatrixXd& rho, double t_span,
                                      double dt_target) const {
  if (rho.rows() != nx_ || rho.cols() != grid_.nr)
    throw std::invalid_argument(
        "PeriodicFeneLimitSolver::advance: size mismatch");
  if (t_span < 0.0)
    throw std::invalid_argument(
        "PeriodicFeneLimitSolver::advance: negative span");
  if (t_span == 0.0) return;
  const double limit = cfl_dt();
  const double dt0 = dt_target > 0.0 ? std::min(dt_target, limit) : limit;
  const long n_steps =
      std::max<long>(1, static_cast<long>(std::ceil(t_span / dt0 - 1e-9)));
  const double dt = t_span / n_steps;
  for (long s = 0; s < n_steps; ++s) step(rho, dt);
}

} // namespace polykin
