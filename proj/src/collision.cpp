#include "vmblab/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vmblab/error.hpp"
#include "vmblab/hashing.hpp"
#include "vmblab/quadrature.hpp"

namespace vmb {
namespace {

constexpr double kPi = std::numbers::pi;

void check_symmetric(const Eigen::MatrixXd& A, const char* name) {
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= CollisionOperators::kSymmetryTol))
    throw AssemblyError(std::string(name) + " not symmetric (defect " + std::to_string(asym) +
                        "); collision quadrature inconsistent");
}

}  // namespace

double collision_frequency(double x) {
  x = std::abs(x);
  const double c = std::sqrt(2.0 / kPi);
  if (x < 1e-6) return c * (2.0 + x * x / 3.0);
  return c * std::exp(-0.5 * x * x) + (x + 1.0 / x) * std::erf(x / std::numbers::sqrt2);
}

double collision_frequency(const Vec3& v) {
  return collision_frequency(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
}

double collision_frequency_quadrature(double x, int panels) {
  x = std::abs(x);
  const Rule1D gl = gauss_legendre(12);
  const double rmax = x + 14.0;
  const double norm = 2.0 * kPi / std::pow(2.0 * kPi, 1.5);
  double total = 0.0;
  for (int pr = 0; pr < panels; ++pr) {
    const double r0 = rmax * pr / panels, r1 = rmax * (pr + 1) / panels;
    for (int ir = 0; ir < gl.size(); ++ir) {
      const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gl.nodes[ir];
      const double wr = 0.5 * (r1 - r0) * gl.weights[ir];
      double inner = 0.0;
      for (int pc = 0; pc < panels; ++pc) {
        const double c0 = -1.0 + 2.0 * pc / panels, c1 = -1.0 + 2.0 * (pc + 1) / panels;
        for (int ic = 0; ic < gl.size(); ++ic) {
          const double c = 0.5 * (c0 + c1) + 0.5 * (c1 - c0) * gl.nodes[ic];
          inner += 0.5 * (c1 - c0) * gl.weights[ic] * std::exp(-0.5 * (x * x + r * r + 2.0 * x * r * c));
        }
      }
      total += wr * r * r * r * inner;
    }
  }
  return norm * total;
}

FrequencyBounds fit_frequency_bounds(double vmax, int samples) {
  FrequencyBounds b{1e300, 0.0};
  for (int i = 0; i < samples; ++i) {
    const double x = vmax * i / (samples - 1);
    const double r = collision_frequency(x) / (1.0 + x);
    b.c1 = std::min(b.c1, r);
    b.c2 = std::max(b.c2, r);
  }
  return b;
}

CollisionQuadratureSpec resolve_collision_quadrature(int order, const CollisionQuadratureSpec& spec) {
  CollisionQuadratureSpec r = spec;
  const int deg = 3 * order;
  if (r.center_points <= 0) r.center_points = (deg + 2) / 2;
  if (r.radial_points <= 0) r.radial_points = (deg / 2 + 2) / 2;
  if (r.relative_degree <= 0) r.relative_degree = deg;
  if (r.scattering_degree <= 0) r.scattering_degree = order;
  return r;
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& kernel) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(kernel.rows(), kernel.rows());
  return Q.rightCols(kernel.rows() - kernel.cols());
}

CollisionOperators::CollisionOperators(std::shared_ptr<const VelocityBasis> basis, const CollisionQuadratureSpec& spec)
    : basis_(std::move(basis)), spec_(resolve_collision_quadrature(basis_->order(), spec)), n_(basis_->size()) {
  // cross-validate the closed-form frequency before it enters any operator
  for (double x : {0.0, 1.3, 4.0}) {
    const double a = collision_frequency(x), b = collision_frequency_quadrature(x);
    if (std::abs(a - b) > 1e-8 * (1.0 + a))
      throw AssemblyError("collision frequency closed form disagrees with quadrature at |v|=" + std::to_string(x));
  }
  assemble_tensor();
  build_operators();
}

CollisionOperators::CollisionOperators(std::shared_ptr<const VelocityBasis> basis, const CollisionQuadratureSpec& spec,
                                       Eigen::MatrixXd tensor)
    : basis_(std::move(basis)),
      spec_(resolve_collision_quadrature(basis_->order(), spec)),
      n_(basis_->size()),
      tensor_(std::move(tensor)) {
  if (tensor_.rows() != n_ * n_ || tensor_.cols() != n_) throw ArgumentError("collision tensor has wrong shape");
  build_operators();
}

void CollisionOperators::assemble_tensor() {
  const int n = n_;
  const Rule1D gv = gauss_hermite_phys(spec_.center_points);
  const Rule1D gr = gauss_laguerre(spec_.radial_points, 1.0);
  const SphereRule rel = product_sphere_rule(spec_.relative_degree);
  const SphereRule sc = spec_.scattering_degree <= 7 ? lebedev26() : product_sphere_rule(spec_.scattering_degree);

  const long long nodes = static_cast<long long>(gv.size()) * gv.size() * gv.size() * gr.size() * rel.size();
  if (nodes > spec_.budget)
    throw ConfigurationError("collision quadrature needs " + std::to_string(nodes) + " nodes, budget is " +
                             std::to_string(spec_.budget));

  // MM* = (2pi)^-3 exp(-|V|^2 - |w|^2/4); int r^3 e^{-r^2/4} f dr = 8 int t e^{-t} f dt; 4 pi for the w_hat average
  const double pref = 32.0 * kPi / std::pow(2.0 * kPi, 3);
  const int nw = rel.size();
  tensor_ = Eigen::MatrixXd::Zero(n * n, n);
  Eigen::MatrixXd X(n * n, nw), Y(n, nw);
  Eigen::VectorXd a(n), b(n), gavg(n), tmp(n);
  for (int i1 = 0; i1 < gv.size(); ++i1)
    for (int i2 = 0; i2 < gv.size(); ++i2)
      for (int i3 = 0; i3 < gv.size(); ++i3) {
        const Vec3 V{gv.nodes[i1], gv.nodes[i2], gv.nodes[i3]};
        const double wV = gv.weights[i1] * gv.weights[i2] * gv.weights[i3];
        for (int m = 0; m < gr.size(); ++m) {
          const double half_r = std::sqrt(gr.nodes[m]);  // r / 2
          const double w0 = pref * wV * gr.weights[m];
          gavg.setZero();
          for (int s = 0; s < sc.size(); ++s) {
            const auto& o = sc.points[s];
            basis_->evaluate({V[0] + half_r * o[0], V[1] + half_r * o[1], V[2] + half_r * o[2]}, tmp.data());
            gavg += sc.weights[s] * tmp;
          }
          for (int p = 0; p < nw; ++p) {
            const auto& o = rel.points[p];
            basis_->evaluate({V[0] + half_r * o[0], V[1] + half_r * o[1], V[2] + half_r * o[2]}, a.data());
            basis_->evaluate({V[0] - half_r * o[0], V[1] - half_r * o[1], V[2] - half_r * o[2]}, b.data());
            const double wt = w0 * rel.weights[p];
            for (int j = 0; j < n; ++j) X.col(p).segment(j * n, n) = (wt * b(j)) * a;
            Y.col(p) = gavg - a;
          }
          tensor_.noalias() += X * Y.transpose();
        }
      }
}

void CollisionOperators::build_operators() {
  const int n = n_;
  const Eigen::VectorXd& c = basis_->sqrt_maxwellian();
  Eigen::MatrixXd Qa = Eigen::MatrixXd::Zero(n, n), Qb = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (c(j) == 0.0) continue;
      Qa.col(i) += c(j) * tensor_.row(i + n * j).transpose();
      Qb.col(i) += c(j) * tensor_.row(j + n * i).transpose();
    }
  L_ = -Qa - Qb;
  frakL_ = -Qa + Qb;
  L2_.resize(2 * n, 2 * n);
  L2_ << L_ - Qa, -Qb, -Qb, L_ - Qa;
  check_symmetric(L_, "L_single");
  check_symmetric(frakL_, "frakL");
  check_symmetric(L2_, "L_two");
  L_ = 0.5 * (L_ + L_.transpose()).eval();
  frakL_ = 0.5 * (frakL_ + frakL_.transpose()).eval();
  L2_ = 0.5 * (L2_ + L2_.transpose()).eval();

  const Eigen::MatrixXd& phi = basis_->kernel_two();
  for (int k = 0; k < phi.cols(); ++k) {
    const double res = (L2_ * phi.col(k)).norm();
    if (!(res <= kKernelTol))
      throw AssemblyError("L_two does not annihilate kernel vector " + std::to_string(k + 1) + " (residual " +
                          std::to_string(res) + ")");
  }

  const Eigen::MatrixXd& nodes = basis_->quad_nodes();
  nu_nodes_.resize(nodes.rows());
  for (int q = 0; q < nodes.rows(); ++q) nu_nodes_(q) = collision_frequency(Vec3{nodes(q, 0), nodes(q, 1), nodes(q, 2)});
  nu_ = basis_->weighted_gram(nu_nodes_);
  nu2_ = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  nu2_.topLeftCorner(n, n) = nu_;
  nu2_.bottomRightCorner(n, n) = nu_;
}

Eigen::VectorXd CollisionOperators::apply_Q(const Eigen::VectorXd& g, const Eigen::VectorXd& h) const {
  return apply_Q_batch(g, h).col(0);
}

Eigen::MatrixXd CollisionOperators::apply_Q_batch(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H) const {
  const int n = n_;
  if (G.rows() != n || H.rows() != n || G.cols() != H.cols()) throw ArgumentError("apply_Q: shape mismatch");
  Eigen::MatrixXd X(n * n, G.cols());
  for (int j = 0; j < n; ++j) X.middleRows(j * n, n) = G.array().rowwise() * H.row(j).array();
  return tensor_.transpose() * X;
}

TwoSpeciesVector CollisionOperators::apply_Gamma(const TwoSpeciesVector& G, const TwoSpeciesVector& H) const {
  const int n = n_;
  if (G.size() != 2 * n || H.size() != 2 * n) throw ArgumentError("apply_Gamma: size mismatch");
  const Eigen::VectorXd sg = contract_q2(G), sh = contract_q2(H);
  Eigen::MatrixXd a(n, 4), b(n, 4);
  a << G.head(n), H.head(n), G.tail(n), H.tail(n);
  b << sh, sg, sh, sg;
  const Eigen::MatrixXd q = apply_Q_batch(a, b);
  return join_species(0.5 * (q.col(0) + q.col(1)), 0.5 * (q.col(2) + q.col(3)));
}

Eigen::MatrixXd CollisionOperators::apply_Gamma_diag_batch(const Eigen::MatrixXd& G) const {
  const int n = n_;
  const Eigen::MatrixXd s = G.topRows(n) + G.bottomRows(n);
  Eigen::MatrixXd out(2 * n, G.cols());
  out.topRows(n) = apply_Q_batch(G.topRows(n), s);
  out.bottomRows(n) = apply_Q_batch(G.bottomRows(n), s);
  return out;
}

double CollisionOperators::apply_nu_weighted_norm(const TwoSpeciesVector& G) const { return G.dot(nu2_ * G); }

double CollisionOperators::spectral_gap() const {
  const Eigen::MatrixXd Z = orthogonal_complement(basis_->kernel_two());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z.transpose() * L2_ * Z, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double CollisionOperators::coercivity_constant() const {
  const Eigen::MatrixXd Z = orthogonal_complement(basis_->kernel_two());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Z.transpose() * L2_ * Z, Z.transpose() * nu2_ * Z,
                                                               Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::string CollisionOperators::spec_string_for(const VelocityBasis& basis, const CollisionQuadratureSpec& spec) {
  return "collision/v1 " + basis.spec_string() + " center=" + std::to_string(spec.center_points) +
         " radial=" + std::to_string(spec.radial_points) + " relative=" + std::to_string(spec.relative_degree) +
         " scattering=" + (spec.scattering_degree <= 7 ? std::string("lebedev26") : std::to_string(spec.scattering_degree));
}

std::string CollisionOperators::spec_string() const { return spec_string_for(*basis_, spec_); }

std::string CollisionOperators::hash() const { return to_hex(sha256(spec_string())); }

}  // namespace vmb
