#include "vmblab/fluid.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

#include "vmblab/error.hpp"

namespace vmb {
namespace {

using Mat7 = Eigen::Matrix<std::complex<double>, 7, 7>;
const std::complex<double> kI(0.0, 1.0);

Eigen::MatrixXcd cross(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd c(3, a.cols());
  c.row(0) = a.row(1).cwiseProduct(b.row(2)) - a.row(2).cwiseProduct(b.row(1));
  c.row(1) = a.row(2).cwiseProduct(b.row(0)) - a.row(0).cwiseProduct(b.row(2));
  c.row(2) = a.row(0).cwiseProduct(b.row(1)) - a.row(1).cwiseProduct(b.row(0));
  return c.cast<std::complex<double>>();
}

}  // namespace

bool FluidState::finite() const {
  return u.allFinite() && theta.allFinite() && n.allFinite() && E.allFinite() && B.allFinite();
}

FluidCoefficients limit_coefficients(double mu, double kappa, double sigma) { return {0.5 * mu, 0.5 * kappa, sigma}; }

Eigen::MatrixXcd leray_project(const SpectralGrid& grid, const Eigen::MatrixXcd& v) { return grid.leray(v); }

Eigen::MatrixXcd dealiased_product(const SpectralGrid& grid, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::MatrixXd ax = grid.to_physical(a), bx = grid.to_physical(b);
  Eigen::MatrixXd p;
  if (ax.rows() == bx.rows())
    p = ax.cwiseProduct(bx);
  else if (ax.rows() == 1)
    p = bx.array().rowwise() * ax.row(0).array();
  else if (bx.rows() == 1)
    p = ax.array().rowwise() * bx.row(0).array();
  else
    throw ArgumentError("dealiased_product: incompatible row counts");
  Eigen::MatrixXcd out = grid.to_spectral(p);
  grid.dealias(out);
  return out;
}

Eigen::MatrixXcd dealiased_cross(const SpectralGrid& grid, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out = grid.to_spectral(cross(grid.to_physical(a), grid.to_physical(b)).real());
  grid.dealias(out);
  return out;
}

Eigen::MatrixXcd compute_ohm_current(const SpectralGrid& grid, const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& n,
                                     const Eigen::MatrixXcd& E, const Eigen::MatrixXcd& B, double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("compute_ohm_current: sigma must be positive");
  const Eigen::MatrixXd ux = grid.to_physical(u), nx = grid.to_physical(n), Bx = grid.to_physical(B);
  Eigen::MatrixXd nu = ux.array().rowwise() * nx.row(0).array();
  Eigen::MatrixXcd prod = grid.to_spectral(nu);
  prod += sigma * grid.to_spectral(cross(ux, Bx).real());
  grid.dealias(prod);
  return prod + sigma * (E - 0.5 * grid.gradient(n));
}

Eigen::MatrixXcd energy_exchange(const SpectralGrid& grid, const Eigen::MatrixXcd& n, const Eigen::MatrixXcd& theta) {
  return 1.5 * dealiased_product(grid, n, theta);
}

FluidSolver::FluidSolver(const SpectralGrid& grid, const FluidOptions& opt) : grid_(grid), opt_(opt) {
  const auto& c = opt.coeffs;
  if (!(c.mu > 0.0 && c.kappa > 0.0 && c.sigma > 0.0))
    throw ArgumentError("fluid solver needs positive mu, kappa and sigma");
}

FluidState FluidSolver::zero_state() const {
  FluidState s;
  const int m = grid_.size();
  s.u = Eigen::MatrixXcd::Zero(3, m);
  s.theta = Eigen::MatrixXcd::Zero(1, m);
  s.n = Eigen::MatrixXcd::Zero(1, m);
  s.E = Eigen::MatrixXcd::Zero(3, m);
  s.B = Eigen::MatrixXcd::Zero(3, m);
  return s;
}

FluidState FluidSolver::from_seed(const FluidFields& seed) const {
  if (seed.u.cols() != grid_.size()) throw ArgumentError("seed does not match the spatial grid");
  FluidState s;
  s.u = grid_.leray(seed.u);
  s.theta = 0.6 * seed.theta - 0.4 * seed.rho;
  s.n = seed.n;
  s.B = grid_.leray(seed.B);
  s.E = gauss_consistent_E(grid_, seed.E, seed.n);
  for (Eigen::MatrixXcd* f : {&s.u, &s.theta, &s.n, &s.E, &s.B}) grid_.dealias(*f);
  return s;
}

Eigen::MatrixXcd FluidSolver::current(const FluidState& s) const {
  return compute_ohm_current(grid_, s.u, s.n, s.E, s.B, opt_.coeffs.sigma);
}

Eigen::MatrixXcd FluidSolver::w(const FluidState& s) const { return energy_exchange(grid_, s.n, s.theta); }

double FluidSolver::energy(const FluidState& s) const {
  auto sq = [&](const Eigen::MatrixXcd& f) { return std::pow(grid_.l2_norm(f), 2); };
  return sq(s.u) + 2.5 * sq(s.theta) + 0.25 * sq(s.n) + 0.5 * (sq(s.E) + sq(s.B));
}

double FluidSolver::dissipation(const FluidState& s) const {
  double gu = 0, gt = 0;
  const Eigen::VectorXd& k2 = grid_.k_squared();
  for (int m = 0; m < grid_.size(); ++m) {
    gu += k2(m) * s.u.col(m).squaredNorm();
    gt += k2(m) * std::norm(s.theta(0, m));
  }
  const double vol = grid_.volume();
  const Eigen::MatrixXcd jn = current(s) - dealiased_product(grid_, s.n, s.u);
  const auto& c = opt_.coeffs;
  return vol * (2 * c.mu * gu + 5 * c.kappa * gt) + std::pow(grid_.l2_norm(jn), 2) / c.sigma;
}

FluidSolver::Tend FluidSolver::nonlinear(const FluidState& s) const {
  const double sigma = opt_.coeffs.sigma;
  const Eigen::MatrixXd ux = grid_.to_physical(s.u), tx = grid_.to_physical(s.theta), nx = grid_.to_physical(s.n),
                        Ex = grid_.to_physical(s.E), Bx = grid_.to_physical(s.B);
  Tend t;
  // transport terms in divergence form
  Eigen::MatrixXcd adv = Eigen::MatrixXcd::Zero(3, grid_.size());
  for (int b = 0; b < 3; ++b) {
    Eigen::MatrixXd flux = ux.array().rowwise() * ux.row(b).array();
    adv += grid_.derivative(grid_.to_spectral(flux), b);
  }
  Eigen::MatrixXd uth = ux.array().rowwise() * tx.row(0).array();
  t.theta = -grid_.divergence(grid_.to_spectral(uth));

  Eigen::MatrixXd nu = ux.array().rowwise() * nx.row(0).array();
  const Eigen::MatrixXd uxb = cross(ux, Bx).real();
  const Eigen::MatrixXd ohm_nl = nu + sigma * uxb;
  Eigen::MatrixXd gradn = grid_.to_physical(grid_.gradient(s.n));
  const Eigen::MatrixXd jx = ohm_nl + sigma * (Ex - 0.5 * gradn);
  Eigen::MatrixXd force = 0.5 * ((Ex.array().rowwise() * nx.row(0).array()).matrix() + cross(jx, Bx).real());
  t.u = grid_.leray(grid_.to_spectral(force) - adv);
  t.E = -grid_.to_spectral(ohm_nl);
  for (Eigen::MatrixXcd* f : {&t.u, &t.theta, &t.E}) grid_.dealias(*f);
  t.n = grid_.divergence(t.E);
  return t;
}

const std::vector<Mat7>& FluidSolver::maxwell_propagator(double h) const {
  auto it = cache_.find(h);
  if (it != cache_.end()) return it->second;
  const double sigma = opt_.coeffs.sigma;
  std::vector<Mat7> props(grid_.size());
  for (int m = 0; m < grid_.size(); ++m) {
    const Eigen::Vector3d k = grid_.wavenumbers().row(m).transpose();
    Eigen::Matrix3cd kx;
    kx << 0, -k(2), k(1), k(2), 0, -k(0), -k(1), k(0), 0;
    kx *= kI;
    Mat7 A = Mat7::Zero();
    A.block<3, 3>(0, 3) = kx;
    A.block<3, 3>(0, 0) = -sigma * Eigen::Matrix3cd::Identity();
    A.block<3, 1>(0, 6) = 0.5 * sigma * kI * k.cast<std::complex<double>>();
    A.block<3, 3>(3, 0) = -kx;
    A.block<1, 3>(6, 0) = -sigma * kI * k.transpose().cast<std::complex<double>>();
    A(6, 6) = -0.5 * sigma * k.squaredNorm();
    props[m] = (h * A).exp();
  }
  if (cache_.size() > 8) cache_.clear();
  return cache_.emplace(h, std::move(props)).first->second;
}

void FluidSolver::linear(FluidState& s, double h) const {
  const auto& P = maxwell_propagator(h);
  const Eigen::VectorXd& k2 = grid_.k_squared();
  Eigen::Matrix<std::complex<double>, 7, 1> y;
  for (int m = 0; m < grid_.size(); ++m) {
    s.u.col(m) *= std::exp(-opt_.coeffs.mu * k2(m) * h);
    s.theta(0, m) *= std::exp(-opt_.coeffs.kappa * k2(m) * h);
    y << s.E.col(m), s.B.col(m), s.n(0, m);
    y = P[m] * y;
    s.E.col(m) = y.head<3>();
    s.B.col(m) = y.segment<3>(3);
    s.n(0, m) = y(6);
  }
}

double FluidSolver::max_stable_dt(const FluidState& s) const {
  if (!opt_.nonlinear) return std::numeric_limits<double>::infinity();
  const double umax = grid_.to_physical(s.u).colwise().norm().maxCoeff();
  const double bmax = grid_.to_physical(s.B).colwise().norm().maxCoeff();
  const double nmax = grid_.to_physical(s.n).cwiseAbs().maxCoeff();
  const double rate = grid_.max_dealiased_k() * umax + opt_.coeffs.sigma * bmax * (bmax + 1.0) + nmax + 1e-12;
  return opt_.cfl_limit / rate;
}

void FluidSolver::step(FluidState& s, double dt) const {
  if (!(dt > 0.0)) throw ArgumentError("time step must be positive");
  if (dt > max_stable_dt(s))
    throw ArgumentError("time step " + std::to_string(dt) + " exceeds the explicit stability limit " +
                        std::to_string(max_stable_dt(s)));
  linear(s, 0.5 * dt);
  if (opt_.nonlinear) {
    auto add = [](const FluidState& a, const Tend& t, double h) {
      FluidState b = a;
      b.u += h * t.u;
      b.theta += h * t.theta;
      b.n += h * t.n;
      b.E += h * t.E;
      return b;
    };
    auto combine = [](const FluidState& a, double wa, const FluidState& b, double wb) {
      FluidState c = a;
      c.u = wa * a.u + wb * b.u;
      c.theta = wa * a.theta + wb * b.theta;
      c.n = wa * a.n + wb * b.n;
      c.E = wa * a.E + wb * b.E;
      return c;
    };
    const FluidState s1 = add(s, nonlinear(s), dt);
    const FluidState s2 = combine(s, 0.75, add(s1, nonlinear(s1), dt), 0.25);
    s = combine(s, 1.0 / 3.0, add(s2, nonlinear(s2), dt), 2.0 / 3.0);
  }
  linear(s, 0.5 * dt);
  s.E = gauss_consistent_E(grid_, s.E, s.n);
  s.u = grid_.leray(s.u);
  s.B = grid_.leray(s.B);
  s.time += dt;
  if (!s.finite()) throw IntegrationError("non-finite fluid state at t=" + std::to_string(s.time));
}

FluidState FluidSolver::time_derivative(const FluidState& s) const {
  FluidState d = zero_state();
  d.time = s.time;
  const auto& c = opt_.coeffs;
  const Eigen::VectorXd& k2 = grid_.k_squared();
  for (int m = 0; m < grid_.size(); ++m) {
    d.u.col(m) = -c.mu * k2(m) * s.u.col(m);
    d.theta(0, m) = -c.kappa * k2(m) * s.theta(0, m);
  }
  const Eigen::MatrixXcd j = current(s);
  d.E = grid_.curl(s.B) - j;
  d.B = -grid_.curl(s.E);
  d.n = -grid_.divergence(j);
  if (opt_.nonlinear) {
    const Tend t = nonlinear(s);
    d.u += t.u;
    d.theta += t.theta;
  } else {
    d.E = grid_.curl(s.B) - c.sigma * (s.E - 0.5 * grid_.gradient(s.n));
    d.n = -grid_.divergence(c.sigma * (s.E - 0.5 * grid_.gradient(s.n)));
  }
  return d;
}

}  // namespace vmb
