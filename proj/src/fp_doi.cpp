#include "polykin/fp_doi.hpp"

#include "polykin/detail/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polykin {

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

} // namespace

DoiSolver::DoiSolver(int lmax, DoiParams par) : sht_(lmax), par_(par) {
  if (lmax < 2)
    throw std::invalid_argument("DoiSolver: need lmax >= 2");
  if (!(par_.kBT > 0.0) || !(par_.zeta_r > 0.0) || !(par_.zeta_t > 0.0))
    throw std::invalid_argument("DoiSolver: kBT and frictions must be > 0");
  if (!(par_.cfl > 0.0) || par_.cfl > 0.9)
    throw std::invalid_argument("DoiSolver: cfl must lie in (0, 0.9]");
  if (par_.external_potential.size() != 0 &&
      par_.external_potential.size() != sht_.n_coeffs())
    throw std::invalid_argument(
        "DoiSolver: external potential must have (lmax+1)^2 coefficients");
  if (par_.onsager_strength != 0.0)
    onsager_.emplace(par_.onsager_strength, lmax);
  has_potential_ =
      onsager_.has_value() || par_.external_potential.size() != 0;
  has_flow_ = !par_.kappa.isZero(0.0);
}

Eigen::VectorXd DoiSolver::uniform() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sht_.n_coeffs());
  c[0] = 1.0 / std::sqrt(4.0 * M_PI);
  return c;
}

double DoiSolver::mass(const Eigen::VectorXd& coeffs) const {
  return std::sqrt(4.0 * M_PI) * coeffs[0];
}

Eigen::VectorXd DoiSolver::potential_over_kBT(
    const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd uc = Eigen::VectorXd::Zero(sht_.n_coeffs());
  if (onsager_) uc += onsager_->apply(coeffs);
  if (par_.external_potential.size() != 0)
    uc += par_.external_potential / par_.kBT;
  return uc;
}

Eigen::VectorXd DoiSolver::rotational_tendency(
    const Eigen::VectorXd& coeffs, const Eigen::Matrix3d& kappa) const {
  const SphereQuadrature& g = sht_.grid();
  Eigen::MatrixXd rho = sht_.synthesize(coeffs);
  Eigen::MatrixXd dth, dphos;
  sht_.gradient_grid(coeffs, &dth, &dphos);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rho.rows(), rho.cols());

  if (!kappa.isZero(0.0)) {
    const double trace = kappa.trace();
    for (int i = 0; i < g.n_theta(); ++i) {
      const double ct = g.cos_theta(i), st = g.sin_theta(i);
      for (int j = 0; j < g.n_phi(); ++j) {
        const double cp = std::cos(g.phi(j)), sp = std::sin(g.phi(j));
        const Eigen::Vector3d n(st * cp, st * sp, ct);
        const Eigen::Vector3d eth(ct * cp, ct * sp, -st);
        const Eigen::Vector3d eph(-sp, cp, 0.0);
        const Eigen::Vector3d kn = kappa * n;
        const Eigen::Vector3d omega = n.cross(kn);
        const double divergence = trace - 3.0 * n.dot(kn);
        // R.(omega rho) = omega . R rho + rho div, with
        // R rho = e_phi d_theta rho - e_theta (1/sin) d_phi rho.
        out(i, j) -= omega.dot(eph) * dth(i, j) -
                     omega.dot(eth) * dphos(i, j) + rho(i, j) * divergence;
      }
    }
  }

  if (has_potential_) {
    const double dr = par_.rotational_diffusion();
    const Eigen::VectorXd uc = potential_over_kBT(coeffs);
    Eigen::MatrixXd uth, uphos;
    sht_.gradient_grid(uc, &uth, &uphos);
    const Eigen::MatrixXd lap = sht_.synthesize(sht_.laplacian(uc));
    out += dr * (dth.cwiseProduct(uth) + dphos.cwiseProduct(uphos) +
                 rho.cwiseProduct(lap));
  }

  Eigen::VectorXd tc = sht_.analyze(out);
  tc[0] = 0.0; // the divergence-form terms carry no mass
  return tc;
}

Eigen::VectorXd DoiSolver::tendency(const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd out = rotational_tendency(coeffs, par_.kappa);
  const double dr = par_.rotational_diffusion();
  for (int l = 1; l <= sht_.lmax(); ++l)
    out.segment(l * l, 2 * l + 1) -=
        dr * l * (l + 1.0) * coeffs.segment(l * l, 2 * l + 1);
  return out;
}

void DoiSolver::diffuse(Eigen::VectorXd& coeffs, double t) const {
  const double dr = par_.rotational_diffusion();
  for (int l = 1; l <= sht_.lmax(); ++l)
    coeffs.segment(l * l, 2 * l + 1) *= std::exp(-dr * l * (l + 1.0) * t);
}

double DoiSolver::stable_dt(const Eigen::VectorXd& coeffs,
                            const Eigen::Matrix3d& kappa) const {
  const SphereQuadrature& g = sht_.grid();
  double rate = 0.0;
  if (!kappa.isZero(0.0)) {
    double max_omega = 0.0, max_div = 0.0;
    const double trace = kappa.trace();
    for (int i = 0; i < g.n_theta(); ++i)
      for (int j = 0; j < g.n_phi(); ++j) {
        const Eigen::Vector3d n = g.node(i, j);
        const Eigen::Vector3d kn = kappa * n;
        max_omega = std::max(max_omega, n.cross(kn).norm());
        max_div = std::max(max_div, std::abs(trace - 3.0 * n.dot(kn)));
      }
    rate += max_omega * (sht_.lmax() + 1.0) + max_div;
  }
  if (has_potential_) {
    const Eigen::VectorXd uc = potential_over_kBT(coeffs);
    Eigen::MatrixXd uth, uphos;
    sht_.gradient_grid(uc, &uth, &uphos);
    const Eigen::MatrixXd lap = sht_.synthesize(sht_.laplacian(uc));
    const double grad = std::max(uth.cwiseAbs().maxCoeff(),
                                 uphos.cwiseAbs().maxCoeff());
    rate += par_.rotational_diffusion() *
            (grad * (sht_.lmax() + 1.0) + lap.cwiseAbs().maxCoeff());
  }
  return rate > 0.0 ? par_.cfl / rate
                    : std::numeric_limits<double>::infinity();
}

void DoiSolver::advance(Eigen::VectorXd& coeffs, double t_span,
                        double dt_target) const {
  if (coeffs.size() != sht_.n_coeffs())
    throw std::invalid_argument("DoiSolver::advance: size mismatch");
  if (t_span < 0.0)
    throw std::invalid_argument("DoiSolver::advance: negative span");
  if (t_span == 0.0) return;
  if (!has_flow_ && !has_potential_) {
    diffuse(coeffs, t_span); // pure rotational diffusion is exact per mode
    return;
  }
  // One explicit SSP-RK3 over the whole tendency (drift plus diffusion):
  // an explicit Runge-Kutta map has exactly the fixed points of the
  // tendency, so steady states carry no time-discretization bias.
  const int lmax = sht_.lmax();
  const double diff_rate = par_.rotational_diffusion() * lmax * (lmax + 1.0);
  double limit = std::min(stable_dt(coeffs, par_.kappa), 2.0 / diff_rate);
  double dt = dt_target > 0.0 ? std::min(dt_target, limit) : limit;
  if (!std::isfinite(dt)) dt = t_span;
  const long n_steps =
      std::max<long>(1, static_cast<long>(std::ceil(t_span / dt - 1e-9)));
  dt = t_span / n_steps;
  Eigen::VectorXd u1(coeffs.size()), u2(coeffs.size());
  const double mass_coeff = coeffs[0]; // pinned: nothing moves mass
  for (long s = 0; s < n_steps; ++s) {
    u1 = coeffs + dt * tendency(coeffs);
    u2 = 0.75 * coeffs + 0.25 * (u1 + dt * tendency(u1));
    coeffs = (1.0 / 3.0) * coeffs + (2.0 / 3.0) * (u2 + dt * tendency(u2));
    coeffs[0] = mass_coeff; // keep the recombination from dusting the mass
  }
}

double DoiSolver::entropy(const Eigen::VectorXd& coeffs) const {
  const SphereQuadrature& g = sht_.grid();
  const Eigen::MatrixXd rho = sht_.synthesize(coeffs);
  double h = 0.0;
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) {
      const double r = std::max(rho(i, j), 1e-300);
      h += g.weight(i, j) * r * std::log(r);
    }
  return h;
}

Eigen::Matrix3d DoiSolver::second_moment(const Eigen::VectorXd& coeffs) const {
  const SphereQuadrature& g = sht_.grid();
  const Eigen::MatrixXd rho = sht_.synthesize(coeffs);
  Eigen::Matrix3d m2 = Eigen::Matrix3d::Zero();
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) {
      const Eigen::Vector3d n = g.node(i, j);
      m2 += g.weight(i, j) * rho(i, j) * (n * n.transpose());
    }
  return m2;
}

double DoiSolver::order_parameter(const Eigen::VectorXd& coeffs) const {
  const Eigen::Matrix3d m2 = second_moment(coeffs) / mass(coeffs);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m2);
  return 0.5 * (3.0 * es.eigenvalues().maxCoeff() - 1.0);
}

double DoiSolver::fixed_point_residual(const Eigen::VectorXd& coeffs) const {
  const SphereQuadrature& g = sht_.grid();
  const Eigen::MatrixXd rho = sht_.synthesize(coeffs);
  const Eigen::MatrixXd u = sht_.synthesize(potential_over_kBT(coeffs));
  Eigen::MatrixXd gibbs = (-u).array().exp();
  double z = 0.0, l1 = 0.0;
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) z += g.weight(i, j) * gibbs(i, j);
  gibbs *= mass(coeffs) / z;
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j)
      l1 += g.weight(i, j) * std::abs(rho(i, j) - gibbs(i, j));
  return l1;
}

Eigen::VectorXd DoiSolver::self_consistent_steady(
    const Eigen::VectorXd& start, int max_iter, double mixing,
    double* residual, int* iterations) const {
  if (start.size() != sht_.n_coeffs())
    throw std::invalid_argument(
        "DoiSolver::self_consistent_steady: size mismatch");
  if (!(mixing > 0.0) || mixing > 1.0)
    throw std::invalid_argument(
        "DoiSolver::self_consistent_steady: mixing must lie in (0, 1]");
  const SphereQuadrature& g = sht_.grid();
  Eigen::VectorXd c = start / mass(start); // work at unit mass
  int it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::MatrixXd u = sht_.synthesize(potential_over_kBT(c));
    Eigen::MatrixXd gibbs = (-u).array().exp();
    double z = 0.0;
    for (int i = 0; i < g.n_theta(); ++i)
      for (int j = 0; j < g.n_phi(); ++j) z += g.weight(i, j) * gibbs(i, j);
    gibbs /= z;
    const Eigen::VectorXd next = sht_.analyze(gibbs);
    const double delta = (next - c).cwiseAbs().maxCoeff();
    c = (1.0 - mixing) * c + mixing * next;
    if (delta < 1e-13) break;
  }
  if (residual) *residual = fixed_point_residual(c);
  if (iterations) *iterations = it;
  return c;
}

Eigen::VectorXd solve_doi_limit(const Eigen::VectorXd& rho0_coeffs, int lmax,
                                const DoiParams& par, double t_final,
                                double dt_target) {
  DoiSolver solver(lmax, par);
  Eigen::VectorXd c = rho0_coeffs;
  solver.advance(c, t_final, dt_target);
  return c;
}

PeriodicDoiSolver::PeriodicDoiSolver(int n_x, int lmax,
                                     PeriodicFlowProfile flow, DoiParams par)
    : nx_(n_x), flow_(flow), local_(lmax, [&] {
        if (!par.kappa.isZero(0.0))
          throw std::invalid_argument(
              "PeriodicDoiSolver: the homogeneous kappa is unused; the "
              "velocity gradient comes from the flow profile");
        return par;
      }()) {
  if (nx_ < 8)
    throw std::invalid_argument("PeriodicDoiSolver: need at least 8 x cells");
  if (!(flow_.length > 0.0))
    throw std::invalid_argument("PeriodicDoiSolver: period must be > 0");
}

Eigen::MatrixXd PeriodicDoiSolver::uniform() const {
  Eigen::MatrixXd state(nx_, local_.n_coeffs());
  for (int i = 0; i < nx_; ++i)
    state.row(i) = local_.uniform().transpose() / flow_.length;
  return state;
}

double PeriodicDoiSolver::mass(const Eigen::MatrixXd& state) const {
  return std::sqrt(4.0 * M_PI) * state.col(0).sum() * (flow_.length / nx_);
}

Eigen::VectorXd PeriodicDoiSolver::x_marginal(
    const Eigen::MatrixXd& state) const {
  return std::sqrt(4.0 * M_PI) * state.col(0);
}

void PeriodicDoiSolver::advance(Eigen::MatrixXd& state, double t_span,
                                double dt_target) const {
  if (state.rows() != nx_ || state.cols() != local_.n_coeffs())
    throw std::invalid_argument("PeriodicDoiSolver::advance: size mismatch");
  if (t_span < 0.0)
    throw std::invalid_argument("PeriodicDoiSolver::advance: negative span");
  if (t_span == 0.0) return;

  const double hx = flow_.length / nx_;
  const int nc = local_.n_coeffs();

  // stability bound: x transport plus the stiffest local rotational stage
  double max_u = 0.0, max_du = 0.0;
  for (int i = 0; i < nx_; ++i) {
    max_u = std::max(max_u, std::abs(flow_.u(i * hx)));
    max_du = std::max(max_du, std::abs(flow_.du(x_center(i))));
  }
  Eigen::Matrix3d worst_kappa = Eigen::Matrix3d::Zero();
  worst_kappa(0, 0) = max_du;
  double limit = std::numeric_limits<double>::infinity();
  {
    const Eigen::VectorXd probe = local_.uniform();
    limit = std::min(limit, local_.stable_dt(probe, worst_kappa));
  }
  if (max_u > 0.0)
    limit = std::min(limit, local_.params().cfl * hx / max_u);

  double dt = dt_target > 0.0 ? std::min(dt_target, limit) : limit;
  if (!std::isfinite(dt)) dt = t_span;
  const long n_steps =
      std::max<long>(1, static_cast<long>(std::ceil(t_span / dt - 1e-9)));
  dt = t_span / n_steps;

  const double dr_dt_half = 0.5 * dt;
  const double dx_diff = local_.params().translational_diffusion();

  auto diffuse_rows = [&](Eigen::MatrixXd& s, double t) {
    const double dr = local_.params().rotational_diffusion();
    for (int l = 1; l <= local_.lmax(); ++l) {
      const double f = std::exp(-dr * l * (l + 1.0) * t);
      s.middleCols(l * l, 2 * l + 1) *= f;
    }
  };

  auto tendency = [&](const Eigen::MatrixXd& s, Eigen::MatrixXd& out) {
    out.setZero();
    // rotational drift from the local velocity gradient u'(x) e1 (x) e1
    Eigen::Matrix3d kap = Eigen::Matrix3d::Zero();
    for (int i = 0; i < nx_; ++i) {
      kap(0, 0) = flow_.du(x_center(i));
      out.row(i) +=
          local_.rotational_tendency(s.row(i).transpose(), kap).transpose();
    }
    // conservative x transport, coefficient by coefficient.  Coefficients
    // carry no sign constraint, so a central second-order flux beats a
    // limited upwind one (no extremum clipping); RK3 keeps it stable under
    // the CFL bound above.
    Eigen::VectorXd col(nx_), flux(nx_);
    for (int k = 0; k < nc; ++k) {
      col = s.col(k);
      for (int i = 0; i < nx_; ++i) {
        const double vel = flow_.u((i + 1.0) * hx);
        const int ip = (i + 1) % nx_;
        flux[i] = vel * 0.5 * (col[i] + col[ip]);
      }
      for (int i = 0; i < nx_; ++i) {
        const int im = (i + nx_ - 1) % nx_;
        out(i, k) -= (flux[i] - flux[im]) / hx;
      }
    }
  };

  Eigen::MatrixXd t1(nx_, nc), u1(nx_, nc), u2(nx_, nc);
  // Crank-Nicolson half-steps of the translational diffusion on both sides
  // of the transport stage keep the split second-order in time.
  const double kdiff = 0.25 * dt * dx_diff / (hx * hx); // dt/2, half implicit
  const Eigen::VectorXd da = Eigen::VectorXd::Constant(nx_, -kdiff);
  const Eigen::VectorXd db = Eigen::VectorXd::Constant(nx_, 1.0 + 2.0 * kdiff);
  Eigen::VectorXd xcol(nx_), xrhs(nx_);
  auto half_x_diffuse = [&](Eigen::MatrixXd& s) {
    for (int k = 0; k < nc; ++k) {
      xcol = s.col(k);
      for (int i = 0; i < nx_; ++i) {
        const int ip = (i + 1) % nx_, im = (i + nx_ - 1) % nx_;
        xrhs[i] = xcol[i] + kdiff * (xcol[ip] - 2.0 * xcol[i] + xcol[im]);
      }
      detail::solve_cyclic_tridiagonal(da, db, da, xrhs);
      s.col(k) = xrhs;
    }
  };

  for (long s = 0; s < n_steps; ++s) {
    diffuse_rows(state, dr_dt_half);
    half_x_diffuse(state);
    tendency(state, t1);
    u1 = state + dt * t1;
    tendency(u1, t1);
    u2 = 0.75 * state + 0.25 * (u1 + dt * t1);
    tendency(u2, t1);
    state = (1.0 / 3.0) * state + (2.0 / 3.0) * (u2 + dt * t1);
    half_x_diffuse(state);
    diffuse_rows(state, dr_dt_half);
  }
}

} // namespace polykin
