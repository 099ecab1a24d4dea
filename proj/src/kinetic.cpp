#include "vmblab/kinetic.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vmblab/error.hpp"

namespace vmb {
namespace {

const std::complex<double> kI(0.0, 1.0);

struct Tendency {
  Eigen::MatrixXcd G, E, B;
};

}  // namespace

bool KineticState::finite() const { return G.allFinite() && E.allFinite() && B.allFinite(); }

KineticSolver::KineticSolver(std::shared_ptr<const CollisionOperators> ops, const SpectralGrid& grid,
                             const KineticOptions& opt)
    : ops_(std::move(ops)), grid_(grid), opt_(opt), n_(ops_->size()) {
  if (!(opt.eps > 0.0 && opt.eps <= 1.0)) throw ArgumentError("eps must lie in (0, 1]");
  const VelocityBasis& b = ops_->basis();
  for (int a = 0; a < 3; ++a) {
    V_[a] = b.multiplication_matrix(a);
    W_[a] = b.derivative_matrix(a) - 0.5 * V_[a];
    R_[a] = b.rotation_matrix(a);
  }
  C1_ = Eigen::MatrixXd::Zero(2 * n_, 3);
  for (int a = 0; a < 3; ++a) {
    C1_.col(a).head(n_) = b.kernel_single().col(1 + a);
    C1_.col(a).tail(n_) = -b.kernel_single().col(1 + a);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops_->L_two());
  L_evecs_ = es.eigenvectors();
  L_evals_ = es.eigenvalues();
  vmax_ = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(V_[0], Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
  rmax_ = Eigen::JacobiSVD<Eigen::MatrixXd>(R_[0]).singularValues()(0);

  const int m = 2 * n_ + 3;
  stiff_ = Eigen::MatrixXd::Zero(m, m);
  stiff_.topLeftCorner(2 * n_, 2 * n_) = -ops_->L_two() / (opt.eps * opt.eps);
  stiff_.topRightCorner(2 * n_, 3) = C1_ / opt.eps;
  stiff_.bottomLeftCorner(3, 2 * n_) = -C1_.transpose() / opt.eps;
}

KineticState KineticSolver::zero_state() const {
  KineticState s;
  s.eps = opt_.eps;
  s.G = Eigen::MatrixXcd::Zero(2 * n_, grid_.size());
  s.E = Eigen::MatrixXcd::Zero(3, grid_.size());
  s.B = Eigen::MatrixXcd::Zero(3, grid_.size());
  return s;
}

KineticState KineticSolver::init_well_prepared(const FluidFields& seed) const {
  if (seed.rho.cols() != grid_.size()) throw ArgumentError("seed does not match the spatial grid");
  KineticState s = zero_state();
  const Eigen::MatrixXd& phi = basis().kernel_two();
  for (int m = 0; m < grid_.size(); ++m) {
    const std::complex<double> rho = seed.rho(0, m), n = seed.n(0, m);
    s.G.col(m) = (rho + 0.5 * n) * phi.col(0).cast<std::complex<double>>() +
                 (rho - 0.5 * n) * phi.col(1).cast<std::complex<double>>() +
                 seed.theta(0, m) * phi.col(5).cast<std::complex<double>>();
    for (int a = 0; a < 3; ++a) s.G.col(m) += seed.u(a, m) * phi.col(2 + a).cast<std::complex<double>>();
  }
  s.E = seed.E;
  s.B = seed.B;
  grid_.dealias(s.G);
  grid_.dealias(s.E);
  grid_.dealias(s.B);
  enforce_constraints(s);
  if (opt_.preparation == Preparation::SlowManifold) {
    const int kept = project_slow(s);
    if (kept > 0)
      warnings_.push_back(std::to_string(kept) + " modes without scale separation kept hydrodynamic");
    enforce_constraints(s);
  }

  Eigen::MatrixXcd Bt = s.B;
  Bt.col(0).setZero();
  const double e0 = grid_.l2_norm(s.G) * grid_.l2_norm(s.G) + std::pow(grid_.l2_norm(s.E), 2) +
                    std::pow(grid_.l2_norm(Bt), 2);
  const double rms = std::sqrt(e0 / grid_.volume());
  if (rms > opt_.smallness)
    warnings_.push_back("initial data amplitude " + std::to_string(rms) + " exceeds smallness " +
                        std::to_string(opt_.smallness));
  return s;
}

Eigen::MatrixXcd KineticSolver::mode_generator(int m, const Eigen::Vector3d& mean_b) const {
  const int n = n_, D = 2 * n_ + 6;
  const double ie = 1.0 / opt_.eps;
  Eigen::Vector3d k = Eigen::Vector3d::Zero();
  for (int a = 0; a < grid_.dim(); ++a) k(a) = grid_.wavenumbers()(m, a);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(D, D);
  for (int sp = 0; sp < 2; ++sp) {
    const double q = sp == 0 ? 1.0 : -1.0;
    auto blk = A.block(sp * n, sp * n, n, n);
    for (int a = 0; a < 3; ++a) {
      blk -= (kI * (ie * k(a))) * V_[a].cast<std::complex<double>>();
      blk -= (q * ie * mean_b(a)) * R_[a].cast<std::complex<double>>();
    }
  }
  A.topLeftCorner(2 * n, 2 * n) -= (ie * ie) * ops_->L_two().cast<std::complex<double>>();
  A.block(0, 2 * n, 2 * n, 3) = ie * C1_.cast<std::complex<double>>();
  A.block(2 * n, 0, 3, 2 * n) = -ie * C1_.transpose().cast<std::complex<double>>();
  Eigen::Matrix3cd curl;
  curl << 0.0, -k(2), k(1), k(2), 0.0, -k(0), -k(1), k(0), 0.0;
  curl *= kI;
  A.block(2 * n, 2 * n + 3, 3, 3) = curl;
  A.block(2 * n + 3, 2 * n, 3, 3) = -curl;
  return A;
}

int KineticSolver::project_slow(KineticState& s) const {
  const int n2 = 2 * n_, D = n2 + 6;
  const Eigen::Vector3d mean_b = s.B.col(0).real();
  int kept = 0;
  for (int m = 1; m < grid_.size(); ++m) {
    Eigen::VectorXcd x(D);
    x << s.G.col(m), s.E.col(m), s.B.col(m);
    if (x.norm() == 0.0) continue;
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mode_generator(m, mean_b));
    const Eigen::VectorXcd& lam = es.eigenvalues();
    std::vector<int> idx(D);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(lam(a)) < std::abs(lam(b)); });
    if (std::abs(lam(idx[slow_count])) < 1.5 * std::abs(lam(idx[slow_count - 1]))) {
      ++kept;
      continue;
    }
    const Eigen::VectorXcd c = es.eigenvectors().partialPivLu().solve(x);
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(D);
    for (int i = 0; i < slow_count; ++i) y += c(idx[i]) * es.eigenvectors().col(idx[i]);
    s.G.col(m) = y.head(n2);
    s.E.col(m) = y.segment(n2, 3);
    s.B.col(m) = y.tail(3);
  }
  return kept;
}

void KineticSolver::enforce_gauss(KineticState& s) const {
  Eigen::VectorXd q1m(2 * n_);
  q1m << basis().sqrt_maxwellian(), -basis().sqrt_maxwellian();
  const Eigen::MatrixXcd dens = q1m.cast<std::complex<double>>().transpose() * s.G;
  s.E = gauss_consistent_E(grid_, s.E, dens);
  s.B = grid_.leray(s.B);
}

void KineticSolver::enforce_constraints(KineticState& s) const {
  enforce_gauss(s);
  const Eigen::MatrixXd& phi = basis().kernel_two();
  const double vol = grid_.volume();
  Eigen::VectorXd g0 = s.G.col(0).real();
  // mass lines
  for (int i = 0; i < 2; ++i) g0 -= phi.col(i).dot(g0) * phi.col(i);
  // momentum plus Poynting
  Eigen::Vector3d poynting = Eigen::Vector3d::Zero();
  double field = 0.0;
  for (int m = 0; m < grid_.size(); ++m) {
    const Eigen::Vector3cd e = s.E.col(m), b = s.B.col(m).conjugate();
    poynting += e.cross(b).real();
    field += e.squaredNorm() + (m == 0 ? 0.0 : s.B.col(m).squaredNorm());
  }
  poynting *= vol;
  field *= vol;
  for (int a = 0; a < 3; ++a) {
    const double target = -poynting(a) / vol;
    g0 += (target - phi.col(2 + a).dot(g0)) / 2.0 * phi.col(2 + a);
  }
  // energy plus field
  const double target = -0.5 * opt_.eps * field / vol;
  g0 += (target - phi.col(5).dot(g0)) / 3.0 * phi.col(5);
  s.G.col(0) = g0.cast<std::complex<double>>();
}

double KineticSolver::max_stable_dt(const KineticState& s) const {
  const double kmax = grid_.max_dealiased_k();
  const double bbar = s.B.col(0).real().norm();
  double rate = (vmax_ * kmax + rmax_ * bbar) / opt_.eps + kmax;
  if (opt_.coupling == CurrentCoupling::Explicit) rate += std::sqrt(2.0) / opt_.eps;
  return opt_.cfl_limit / rate;
}

void KineticSolver::explicit_rhs(const KineticState& s, Eigen::MatrixXcd& dG, Eigen::MatrixXcd& dE,
                                 Eigen::MatrixXcd& dB) const {
  const int n = n_, M = grid_.size();
  const double ie = 1.0 / opt_.eps;
  const Eigen::MatrixXd& k = grid_.wavenumbers();
  dG = Eigen::MatrixXcd::Zero(2 * n, M);
  for (int sp = 0; sp < 2; ++sp) {
    const auto g = s.G.middleRows(sp * n, n);
    auto out = dG.middleRows(sp * n, n);
    for (int a = 0; a < grid_.dim(); ++a) {
      Eigen::MatrixXcd y = V_[a] * g;
      for (int m = 0; m < M; ++m) out.col(m) -= (kI * (ie * k(m, a))) * y.col(m);
    }
    const double q = sp == 0 ? 1.0 : -1.0;
    for (int c = 0; c < 3; ++c) {
      const double bc = s.B(c, 0).real();
      if (bc != 0.0) out -= (q * ie * bc) * (R_[c] * g);
    }
  }
  dE = grid_.curl(s.B);
  dB = -grid_.curl(s.E);
  if (opt_.coupling == CurrentCoupling::Explicit) {
    dE -= ie * (C1_.transpose() * s.G);
    dG += ie * (C1_ * s.E);
  }
  if (!opt_.nonlinear) return;

  const Eigen::MatrixXd Gx = grid_.to_physical(s.G);
  const Eigen::MatrixXd Ex = grid_.to_physical(s.E);
  Eigen::MatrixXcd Bt = s.B;
  Bt.col(0).setZero();
  const Eigen::MatrixXd Bx = grid_.to_physical(Bt);
  Eigen::MatrixXd NG = ie * ops_->apply_Gamma_diag_batch(Gx);
  for (int sp = 0; sp < 2; ++sp) {
    const double q = sp == 0 ? 1.0 : -1.0;
    const auto g = Gx.middleRows(sp * n, n);
    auto out = NG.middleRows(sp * n, n);
    for (int a = 0; a < 3; ++a) {
      out.array() -= q * ((W_[a] * g).array().rowwise() * Ex.row(a).array());
      out.array() -= (q * ie) * ((R_[a] * g).array().rowwise() * Bx.row(a).array());
    }
  }
  Eigen::MatrixXcd NGs = grid_.to_spectral(NG);
  grid_.dealias(NGs);
  dG += NGs;
}

void KineticSolver::full_rhs(const KineticState& s, Eigen::MatrixXcd& dG, Eigen::MatrixXcd& dE,
                             Eigen::MatrixXcd& dB) const {
  explicit_rhs(s, dG, dE, dB);
  const double ie = 1.0 / opt_.eps;
  dG -= (ie * ie) * (ops_->L_two() * s.G);
  if (opt_.coupling == CurrentCoupling::Implicit) {
    dE -= ie * (C1_.transpose() * s.G);
    dG += ie * (C1_ * s.E);
  }
}

const Eigen::MatrixXd& KineticSolver::propagator(double h) const {
  auto it = propagators_.find(h);
  if (it != propagators_.end()) return it->second;
  Eigen::MatrixXd P;
  if (opt_.coupling == CurrentCoupling::Explicit) {
    const Eigen::VectorXd decay = (-h / (opt_.eps * opt_.eps) * L_evals_).array().exp();
    P = L_evecs_ * decay.asDiagonal() * L_evecs_.transpose();
  } else {
    P = (h * stiff_).exp();
  }
  if (propagators_.size() > 8) propagators_.clear();
  return propagators_.emplace(h, std::move(P)).first->second;
}

void KineticSolver::collide(KineticState& s, double h) const {
  const Eigen::MatrixXd& P = propagator(h);
  if (opt_.coupling == CurrentCoupling::Explicit) {
    s.G = P * s.G;
  } else {
    const int n2 = 2 * n_;
    Eigen::MatrixXcd y(n2 + 3, grid_.size());
    y << s.G, s.E;
    y = P * y;
    s.G = y.topRows(n2);
    s.E = y.bottomRows(3);
  }
}

void KineticSolver::step(KineticState& s, double dt) const {
  if (!(dt > 0.0)) throw ArgumentError("time step must be positive");
  const double limit = max_stable_dt(s);
  if (dt > limit)
    throw ArgumentError("time step " + std::to_string(dt) + " exceeds the explicit stability limit " +
                        std::to_string(limit));
  const double hc = opt_.splitting == Splitting::Strang ? 0.5 * dt : dt;
  collide(s, hc);

  Tendency k1, k2, k3, k4;
  KineticState tmp = s;
  explicit_rhs(s, k1.G, k1.E, k1.B);
  tmp.G = s.G + 0.5 * dt * k1.G;
  tmp.E = s.E + 0.5 * dt * k1.E;
  tmp.B = s.B + 0.5 * dt * k1.B;
  explicit_rhs(tmp, k2.G, k2.E, k2.B);
  tmp.G = s.G + 0.5 * dt * k2.G;
  tmp.E = s.E + 0.5 * dt * k2.E;
  tmp.B = s.B + 0.5 * dt * k2.B;
  explicit_rhs(tmp, k3.G, k3.E, k3.B);
  tmp.G = s.G + dt * k3.G;
  tmp.E = s.E + dt * k3.E;
  tmp.B = s.B + dt * k3.B;
  explicit_rhs(tmp, k4.G, k4.E, k4.B);
  s.G += (dt / 6.0) * (k1.G + 2.0 * k2.G + 2.0 * k3.G + k4.G);
  s.E += (dt / 6.0) * (k1.E + 2.0 * k2.E + 2.0 * k3.E + k4.E);
  s.B += (dt / 6.0) * (k1.B + 2.0 * k2.B + 2.0 * k3.B + k4.B);

  if (opt_.splitting == Splitting::Strang) collide(s, hc);
  if (opt_.enforce_gauss) enforce_gauss(s);
  s.time += dt;
  if (!s.finite())
    throw IntegrationError("non-finite kinetic state at t=" + std::to_string(s.time) + " (eps=" +
                           std::to_string(opt_.eps) + ")");
}

}  // namespace vmb
