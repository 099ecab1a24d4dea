#include "vmblab/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "vmblab/error.hpp"

namespace vmb {
namespace {

constexpr double kFloor = 1e-30;
constexpr int kMaxOrder = 8;

double sq(double x) { return x * x; }

// sum over |beta| = j of the Gram matrices of d^beta
Eigen::MatrixXd gram_of_order(const VelocityBasis& b, int j, const Eigen::VectorXd& w) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(b.size(), b.size());
  for (int a = 0; a <= j; ++a)
    for (int c = 0; c <= j - a; ++c) g += b.derivative_gram_weighted({a, c, j - a - c}, w);
  return g;
}

}  // namespace

std::string MomentRecord::csv_header() {
  return "t,eps,rho,u,theta,n,j,w,ohm,boussinesq,energy_equiv,incompressibility,gauss,"
         "local_rho,local_u,local_theta,local_n,local_ampere,local_faraday,local_constraint,"
         "energy,dissipation,micro_dissipation";
}

std::string MomentRecord::csv_row() const {
  std::ostringstream os;
  char buf[32];
  auto put = [&](double x, bool first = false) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    if (!first) os << ',';
    os << buf;
  };
  put(t, true);
  for (double x : {eps, rho, u, theta, n, j, w, ohm, boussinesq, energy_equiv, incompressibility, gauss}) put(x);
  for (double x : local) put(x);
  for (double x : {energy, dissipation, micro_dissipation}) put(x);
  return os.str();
}

bool MomentRecord::finite_nonnegative() const {
  auto ok = [](double x) { return std::isfinite(x) && x >= 0.0; };
  for (double x : {rho, u, theta, n, j, w, ohm, boussinesq, energy_equiv, incompressibility, gauss, energy, dissipation,
                   micro_dissipation})
    if (!ok(x)) return false;
  for (double x : local)
    if (!ok(x)) return false;
  return std::isfinite(t) && eps > 0;
}

Diagnostics::Diagnostics(std::shared_ptr<const CollisionOperators> ops, const SpectralGrid& grid, const MuKappa& mk,
                         double sigma)
    : ops_(std::move(ops)), grid_(grid), sigma_(sigma), proj_(ops_->basis()) {
  const VelocityBasis& b = ops_->basis();
  const int n = b.size();
  moment_rows_ = moment_functionals(b);
  flux_A_.resize(n, 9);
  flux_B_.resize(n, 3);
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) {
      if (mk.A_hat[a][c].size() != n) throw ArgumentError("Diagnostics: transport solutions do not match the basis");
      flux_A_.col(3 * a + c) = ops_->L_single() * mk.A_hat[a][c];
    }
    flux_B_.col(a) = ops_->L_single() * mk.B_hat[a];
  }
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(b.quad_weights().size());
  for (int j = 0; j < b.order(); ++j) {
    velocity_gram_.push_back(gram_of_order(b, j, one));
    velocity_gram_nu_.push_back(gram_of_order(b, j, ops_->nu_at_nodes()));
  }
}

MomentFields Diagnostics::moments(const KineticState& s) const {
  if (s.G.cols() != grid_.size()) throw ArgumentError("state does not match the diagnostics grid");
  const Eigen::MatrixXcd m = moment_rows_.transpose().cast<std::complex<double>>() * s.G;
  MomentFields f;
  f.time = s.time;
  f.eps = s.eps;
  f.rho = m.row(kRho);
  f.theta = m.row(kTheta);
  f.n = m.row(kN);
  f.w = m.row(kW) / s.eps;
  f.theta_limit = m.row(kThetaLimit);
  f.u = m.middleRows(kU1, 3);
  f.j = m.middleRows(kJ1, 3) / s.eps;
  f.E = s.E;
  f.B = s.B;
  return f;
}

namespace {

// vol * sum_k sum_{l + j <= order} |k|^{2(l + shift)} g_k^H H_j g_k over both species
double mixed_norm2(const SpectralGrid& grid, const Eigen::MatrixXcd& G, int order, int shift,
                   const std::vector<Eigen::MatrixXd>& grams, const Eigen::MatrixXd& base) {
  if (order < 0) return 0.0;
  const int n = base.rows();
  const Eigen::VectorXd& k2 = grid.k_squared();
  Eigen::VectorXd per_j(std::min<int>(order, grams.size() - 1) + 1);
  double total = 0.0;
  for (int m = 0; m < grid.size(); ++m) {
    if (k2(m) == 0.0 && shift > 0) continue;
    for (int j = 0; j < per_j.size(); ++j) {
      const Eigen::MatrixXd& H = j == 0 ? base : grams[j];
      double v = 0.0;
      for (int sp = 0; sp < 2; ++sp) {
        const Eigen::VectorXcd g = G.col(m).segment(sp * n, n);
        v += (g.adjoint() * H * g)(0, 0).real();
      }
      per_j(j) = v;
    }
    double kw = std::pow(k2(m), shift), acc = 0.0;
    for (int l = 0; l <= order; ++l) {
      for (int j = 0; j < per_j.size() && j + l <= order; ++j) acc += kw * per_j(j);
      kw *= k2(m);
    }
    total += acc;
  }
  return grid.volume() * total;
}

double field_norm2(const SpectralGrid& grid, const Eigen::MatrixXcd& f, int order, int shift) {
  if (order < 0) return 0.0;
  const Eigen::VectorXd& k2 = grid.k_squared();
  double total = 0.0;
  for (int m = 0; m < grid.size(); ++m) {
    double w = 0.0, kw = std::pow(k2(m), shift);
    for (int l = 0; l <= order; ++l) {
      w += kw;
      kw *= k2(m);
    }
    total += w * f.col(m).squaredNorm();
  }
  return grid.volume() * total;
}

void check_order(int order) {
  if (order < 0 || order > kMaxOrder)
    throw ArgumentError("derivative order " + std::to_string(order) + " outside [0, " + std::to_string(kMaxOrder) + "]");
}

}  // namespace

double Diagnostics::energy_functional(const KineticState& s, int order) const {
  check_order(order);
  const int n = ops_->basis().size();
  return mixed_norm2(grid_, s.G, order, 0, velocity_gram_, Eigen::MatrixXd::Identity(n, n)) +
         field_norm2(grid_, s.E, order, 0) + field_norm2(grid_, s.B, order, 0);
}

double Diagnostics::dissipation_functional(const KineticState& s, int order) const {
  check_order(order);
  const Eigen::MatrixXcd P = proj_.P().cast<std::complex<double>>();
  const Eigen::MatrixXcd PG = P * s.G;
  const Eigen::MatrixXcd perp = s.G - PG;
  const int n = ops_->basis().size();
  const double ie2 = 1.0 / (s.eps * s.eps);
  return ie2 * mixed_norm2(grid_, perp, order, 0, velocity_gram_nu_, ops_->nu_matrix()) +
         mixed_norm2(grid_, PG, order - 1, 1, velocity_gram_, Eigen::MatrixXd::Identity(n, n)) +
         field_norm2(grid_, s.E, order - 1, 0) + field_norm2(grid_, s.B, order - 2, 1);
}

double Diagnostics::micro_dissipation(const KineticState& s) const {
  const Eigen::MatrixXcd perp = s.G - proj_.P().cast<std::complex<double>>() * s.G;
  return mixed_norm2(grid_, perp, 0, 0, velocity_gram_nu_, ops_->nu_matrix()) / (s.eps * s.eps);
}

ConservationIntegrals Diagnostics::conservation_integrals(const KineticState& s, bool linearized) const {
  const Eigen::MatrixXd& phi = ops_->basis().kernel_two();
  const double vol = grid_.volume();
  const Eigen::VectorXd g0 = s.G.col(0).real();
  ConservationIntegrals c;
  c.mass_plus = vol * phi.col(0).dot(g0);
  c.mass_minus = vol * phi.col(1).dot(g0);
  for (int a = 0; a < 3; ++a) c.momentum(a) = vol * phi.col(2 + a).dot(g0);
  c.energy = vol * phi.col(5).dot(g0);
  const Eigen::Vector3d bbar = s.B.col(0).real();
  if (linearized) {
    c.momentum += vol * Eigen::Vector3d(s.E.col(0).real()).cross(bbar);
    return c;
  }
  double field = 0.0;
  for (int m = 0; m < grid_.size(); ++m) {
    const Eigen::Vector3cd e = s.E.col(m), b = s.B.col(m).conjugate();
    c.momentum += vol * e.cross(b).real();
    field += e.squaredNorm() + (m == 0 ? 0.0 : s.B.col(m).squaredNorm());
  }
  c.energy += 0.5 * s.eps * vol * field;
  return c;
}

ConservationResiduals Diagnostics::global_conservation_residuals(const KineticState& s, const KineticState& ref,
                                                                 bool linearized) const {
  const ConservationIntegrals a = conservation_integrals(s, linearized), b = conservation_integrals(ref, linearized);
  Eigen::MatrixXcd bt = ref.B;
  bt.col(0).setZero();
  ConservationResiduals r;
  r.scale = std::sqrt(grid_.volume()) * grid_.l2_norm(ref.G) + sq(grid_.l2_norm(ref.E)) + sq(grid_.l2_norm(bt)) + kFloor;
  r.mass = std::hypot(a.mass_plus - b.mass_plus, a.mass_minus - b.mass_minus) / r.scale;
  r.momentum = (a.momentum - b.momentum).norm() / r.scale;
  r.energy = std::abs(a.energy - b.energy) / r.scale;
  return r;
}

std::array<Eigen::MatrixXcd, 6> Diagnostics::identity_terms(const KineticState& s, const MomentFields& m) const {
  const double ie = 1.0 / s.eps;
  const int n = ops_->basis().size();
  const Eigen::MatrixXcd g = 0.5 * (s.G.topRows(n) + s.G.bottomRows(n));
  const Eigen::MatrixXcd fa = flux_A_.transpose().cast<std::complex<double>>() * g;
  const Eigen::MatrixXcd fb = flux_B_.transpose().cast<std::complex<double>>() * g;
  std::array<Eigen::MatrixXcd, 6> F;
  const Eigen::MatrixXcd divu = grid_.divergence(m.u);
  F[0] = ie * divu;
  Eigen::MatrixXcd divA = Eigen::MatrixXcd::Zero(3, grid_.size());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) divA.row(a) += grid_.derivative(fa.row(3 * a + b), b);
  F[1] = ie * (grid_.gradient(m.rho + m.theta) + divA) -
         0.5 * (dealiased_product(grid_, m.n, m.E) + dealiased_cross(grid_, m.j, m.B));
  const Eigen::MatrixXcd jE = dealiased_product(grid_, m.j, m.E).colwise().sum();
  F[2] = (2.0 / 3.0) * ie * (divu + grid_.divergence(fb)) - (s.eps / 3.0) * jE;
  F[3] = grid_.divergence(m.j);
  F[4] = m.j - grid_.curl(m.B);
  F[5] = grid_.curl(m.E);
  return F;
}

std::array<double, 7> Diagnostics::local_conservation_residuals(const KineticState& a, const KineticState& b) const {
  if (a.G.rows() != b.G.rows() || a.G.cols() != b.G.cols() || b.G.cols() != grid_.size())
    throw ArgumentError("local residuals: snapshots on different grids");
  if (a.eps != b.eps) throw ArgumentError("local residuals: snapshots with different eps");
  const double h = b.time - a.time;
  if (!(h > 0.0)) throw ArgumentError("local residuals: snapshots must be ordered in time");
  const MomentFields ma = moments(a), mb = moments(b);
  const auto Fa = identity_terms(a, ma), Fb = identity_terms(b, mb);
  const std::array<const Eigen::MatrixXcd*, 6> fa{&ma.rho, &ma.u, &ma.theta, &ma.n, &ma.E, &ma.B};
  const std::array<const Eigen::MatrixXcd*, 6> fb{&mb.rho, &mb.u, &mb.theta, &mb.n, &mb.E, &mb.B};
  std::array<double, 7> r{};
  for (int i = 0; i < 6; ++i) r[i] = grid_.l2_norm((*fb[i] - *fa[i]) / h + 0.5 * (Fa[i] + Fb[i]));
  auto constraint = [&](const MomentFields& m) {
    return grid_.l2_norm(grid_.divergence(m.E) - m.n) + grid_.l2_norm(grid_.divergence(m.B));
  };
  r[6] = 0.5 * (constraint(ma) + constraint(mb));
  return r;
}

double Diagnostics::ohm_residual(const MomentFields& m) const {
  const Eigen::MatrixXcd ohm = compute_ohm_current(grid_, m.u, m.n, m.E, m.B, sigma_);
  return grid_.l2_norm(m.j - ohm) / (grid_.l2_norm(m.j) + kFloor);
}

double Diagnostics::boussinesq_residual(const MomentFields& m) const { return grid_.l2_norm(m.rho + m.theta); }

double Diagnostics::energy_equiv_residual(const MomentFields& m) const {
  return grid_.l2_norm(m.w - energy_exchange(grid_, m.n, m.theta));
}

double Diagnostics::incompressibility_residual(const MomentFields& m) const {
  return grid_.l2_norm(grid_.divergence(m.u));
}

double Diagnostics::gauss_residual(const MomentFields& m) const {
  return grid_.l2_norm(grid_.divergence(m.E) - m.n);
}

MomentRecord Diagnostics::record(const KineticState& s) const {
  const MomentFields m = moments(s);
  MomentRecord r;
  r.t = s.time;
  r.eps = s.eps;
  r.rho = grid_.l2_norm(m.rho);
  r.u = grid_.l2_norm(m.u);
  r.theta = grid_.l2_norm(m.theta);
  r.n = grid_.l2_norm(m.n);
  r.j = grid_.l2_norm(m.j);
  r.w = grid_.l2_norm(m.w);
  r.ohm = ohm_residual(m);
  r.boussinesq = boussinesq_residual(m);
  r.energy_equiv = energy_equiv_residual(m);
  r.incompressibility = incompressibility_residual(m);
  r.gauss = gauss_residual(m);
  r.energy = energy_functional(s, 0);
  r.dissipation = dissipation_functional(s, 0);
  r.micro_dissipation = micro_dissipation(s);
  return r;
}

ConvergenceReport moment_convergence(const std::vector<MomentFields>& kinetic, const std::vector<FluidState>& fluid,
                                     const SpectralGrid& grid) {
  if (kinetic.size() != fluid.size()) throw ArgumentError("moment_convergence: trajectories differ in length");
  ConvergenceReport rep;
  for (std::size_t i = 0; i < kinetic.size(); ++i) {
    const MomentFields& k = kinetic[i];
    const FluidState& f = fluid[i];
    if (std::abs(k.time - f.time) > 1e-9 * std::max(1.0, std::abs(k.time)))
      throw ArgumentError("moment_convergence: output times differ at index " + std::to_string(i));
    if (k.u.cols() != grid.size() || f.u.cols() != grid.size())
      throw ArgumentError("moment_convergence: grid mismatch");
    ConvergenceSample c;
    c.t = k.time;
    c.u = grid.l2_norm(grid.leray(k.u) - f.u);
    c.theta = grid.l2_norm(k.theta_limit - f.theta);
    c.n = grid.l2_norm(k.n - f.n);
    c.E = grid.l2_norm(k.E - f.E);
    c.B = grid.l2_norm(k.B - f.B);
    rep.sup.u = std::max(rep.sup.u, c.u);
    rep.sup.theta = std::max(rep.sup.theta, c.theta);
    rep.sup.n = std::max(rep.sup.n, c.n);
    rep.sup.E = std::max(rep.sup.E, c.E);
    rep.sup.B = std::max(rep.sup.B, c.B);
    rep.sup.t = std::max(rep.sup.t, c.t);
    rep.samples.push_back(c);
  }
  return rep;
}

}  // namespace vmb
