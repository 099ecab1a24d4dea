#include "vmblab/velocity_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vmblab/error.hpp"
#include "vmblab/hashing.hpp"

namespace vmb {
namespace {

std::vector<Exponent> graded_exponents(int order) {
  std::vector<Exponent> out;
  for (int d = 0; d <= order; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) out.push_back({a, b, d - a - b});
  return out;
}

// Normalized probabilists' Hermite polynomial He_n / sqrt(n!) in one variable.
std::vector<Polynomial> hermite_1d(int order, int axis) {
  std::vector<Polynomial> he;
  he.push_back(Polynomial::constant(1.0));
  if (order >= 1) he.push_back(Polynomial::coordinate(axis));
  for (int n = 1; n < order; ++n)
    he.push_back(Polynomial::coordinate(axis) * he[n] - static_cast<double>(n) * he[n - 1]);
  for (int n = 0; n <= order; ++n) he[n] *= 1.0 / std::sqrt(std::tgamma(n + 1.0));
  return he;
}

}  // namespace

int basis_size(int order) { return (order + 1) * (order + 2) * (order + 3) / 6; }

double maxwellian(const Vec3& v) {
  const double s = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  return std::exp(-0.5 * s) / std::pow(2.0 * std::numbers::pi, 1.5);
}

VelocityBasis::VelocityBasis(int order, const QuadratureSpec& quad) : order_(order), quad_(quad) {
  if (order < 2) throw ArgumentError("velocity basis order must be at least 2");
  if (order > 12) throw ArgumentError("velocity basis order above 12 is outside desk-scale bounds");
  if (quad.nodes_per_axis < 1) throw ArgumentError("quadrature needs at least one node per axis");

  const Rule1D gh = gauss_hermite_prob(quad.nodes_per_axis);
  const int n1 = gh.size();
  const int nq = n1 * n1 * n1;
  nodes_.resize(nq, 3);
  weights_.resize(nq);
  maxwellian_.resize(nq);
  for (int a = 0, q = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b)
      for (int c = 0; c < n1; ++c, ++q) {
        nodes_.row(q) << gh.nodes[a], gh.nodes[b], gh.nodes[c];
        weights_(q) = gh.weights[a] * gh.weights[b] * gh.weights[c];
        maxwellian_(q) = maxwellian({gh.nodes[a], gh.nodes[b], gh.nodes[c]});
      }

  const int pmax = 2 * order + 8;
  for (int a = 0; a < 3; ++a) {
    powers_[a].resize(nq, pmax + 1);
    powers_[a].col(0).setOnes();
    for (int k = 1; k <= pmax; ++k) powers_[a].col(k) = powers_[a].col(k - 1).cwiseProduct(nodes_.col(a));
  }

  monomials_ = graded_exponents(order);
  const int n = static_cast<int>(monomials_.size());
  std::array<std::vector<Polynomial>, 3> he{hermite_1d(order, 0), hermite_1d(order, 1), hermite_1d(order, 2)};
  std::vector<Polynomial> start;
  start.reserve(n);
  for (const auto& e : monomials_) start.push_back(he[0][e[0]] * he[1][e[1]] * he[2][e[2]]);

  Eigen::MatrixXd h(nq, n);
  for (int i = 0; i < n; ++i) h.col(i) = values_at(start[i]);
  const Eigen::MatrixXd gram = h.transpose() * weights_.asDiagonal() * h;
  const double defect = (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || defect > kTolerance)
    throw ConstructionError("velocity quadrature too coarse for order " + std::to_string(order) +
                            ": Gram defect " + std::to_string(defect));
  const Eigen::MatrixXd linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));

  // monomial coefficients of the starting polynomials
  Eigen::MatrixXd start_coeffs = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (const auto& [e, c] : start[i].terms()) {
      const auto it = std::find(monomials_.begin(), monomials_.end(), e);
      start_coeffs(i, it - monomials_.begin()) = c;
    }
  coeffs_ = linv * start_coeffs;
  polys_.resize(n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m)
      if (coeffs_(i, m) != 0.0) polys_[i] += Polynomial::monomial(monomials_[m], coeffs_(i, m));
  values_ = h * linv.transpose();

  const Eigen::MatrixXd check = values_.transpose() * weights_.asDiagonal() * values_;
  if ((check - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > kTolerance)
    throw ConstructionError("orthonormalization failed");

  mass_ = project(Polynomial::constant(1.0));
  const Polynomial energy = 0.5 * Polynomial::speed_squared() - Polynomial::constant(1.5);
  chi_.resize(n, 5);
  chi_.col(0) = mass_;
  for (int a = 0; a < 3; ++a) chi_.col(1 + a) = project(Polynomial::coordinate(a));
  chi_.col(4) = project(energy);

  phi_ = Eigen::MatrixXd::Zero(2 * n, 6);
  phi_.col(0).head(n) = mass_;
  phi_.col(1).tail(n) = mass_;
  for (int k = 2; k < 6; ++k) {
    phi_.col(k).head(n) = chi_.col(k - 1);
    phi_.col(k).tail(n) = chi_.col(k - 1);
  }
}

Eigen::VectorXd VelocityBasis::values_at(const Polynomial& p) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(nodes_.rows());
  const int pmax = static_cast<int>(powers_[0].cols()) - 1;
  for (const auto& [e, c] : p.terms()) {
    if (std::max({e[0], e[1], e[2]}) > pmax) {
      for (int q = 0; q < nodes_.rows(); ++q) f(q) = p.evaluate({nodes_(q, 0), nodes_(q, 1), nodes_(q, 2)});
      return f;
    }
    f.array() += c * powers_[0].col(e[0]).array() * powers_[1].col(e[1]).array() * powers_[2].col(e[2]).array();
  }
  return f;
}

void VelocityBasis::evaluate(const Vec3& v, double* out) const {
  const int n = size();
  double pw[3][16];
  for (int a = 0; a < 3; ++a) {
    pw[a][0] = 1.0;
    for (int k = 1; k <= order_; ++k) pw[a][k] = pw[a][k - 1] * v[a];
  }
  Eigen::VectorXd mono(n);
  for (int m = 0; m < n; ++m) {
    const auto& e = monomials_[m];
    mono(m) = pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]];
  }
  Eigen::Map<Eigen::VectorXd>(out, n).noalias() = coeffs_ * mono;
}

Eigen::VectorXd VelocityBasis::evaluate(const Vec3& v) const {
  if (order_ > 15) throw ArgumentError("point evaluation supports order up to 15");
  Eigen::VectorXd out(size());
  evaluate(v, out.data());
  return out;
}

Eigen::VectorXd VelocityBasis::project(const Polynomial& p) const { return project_values(values_at(p)); }

Eigen::VectorXd VelocityBasis::project_values(const Eigen::VectorXd& f) const {
  return values_.transpose() * weights_.cwiseProduct(f);
}

double VelocityBasis::integrate(const Polynomial& p) const { return weights_.dot(values_at(p)); }

Eigen::MatrixXd VelocityBasis::derivative_matrix(int axis) const {
  const int n = size();
  Eigen::MatrixXd d(nodes_.rows(), n);
  for (int i = 0; i < n; ++i) d.col(i) = values_at(gaussian_derivative(polys_[i], axis));
  return values_.transpose() * weights_.asDiagonal() * d;
}

Eigen::MatrixXd VelocityBasis::multiplication_matrix(int axis) const {
  return values_.transpose() * (weights_.cwiseProduct(nodes_.col(axis))).asDiagonal() * values_;
}

Eigen::MatrixXd VelocityBasis::rotation_matrix(int axis) const {
  // R_c = eps_{abc} v_b d_a; for c: (a, b) = (c+1, c+2) with +1 and (c+2, c+1) with -1
  const int n = size();
  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  Eigen::MatrixXd d(nodes_.rows(), n);
  for (int i = 0; i < n; ++i) {
    const Polynomial r = Polynomial::coordinate(a2) * polys_[i].derivative(a1) -
                         Polynomial::coordinate(a1) * polys_[i].derivative(a2);
    d.col(i) = values_at(r);
  }
  return values_.transpose() * weights_.asDiagonal() * d;
}

Eigen::MatrixXd VelocityBasis::derivative_gram(const Exponent& alpha) const {
  return derivative_gram_weighted(alpha, Eigen::VectorXd::Ones(nodes_.rows()));
}

Eigen::MatrixXd VelocityBasis::derivative_gram_weighted(const Exponent& alpha, const Eigen::VectorXd& w) const {
  const int n = size();
  Eigen::MatrixXd d(nodes_.rows(), n);
  for (int i = 0; i < n; ++i) {
    Polynomial p = polys_[i];
    for (int a = 0; a < 3; ++a)
      for (int k = 0; k < alpha[a]; ++k) p = gaussian_derivative(p, a);
    d.col(i) = values_at(p);
  }
  return d.transpose() * weights_.cwiseProduct(w).asDiagonal() * d;
}

Eigen::MatrixXd VelocityBasis::weighted_gram(const Eigen::VectorXd& w) const {
  return values_.transpose() * weights_.cwiseProduct(w).asDiagonal() * values_;
}

std::string VelocityBasis::spec_string() const {
  return "velocity-basis/v1 order=" + std::to_string(order_) +
         " gauss-hermite=" + std::to_string(quad_.nodes_per_axis);
}

std::string VelocityBasis::hash() const { return to_hex(sha256(spec_string())); }

Eigen::VectorXd species_plus(const TwoSpeciesVector& G) { return G.head(G.size() / 2); }
Eigen::VectorXd species_minus(const TwoSpeciesVector& G) { return G.tail(G.size() / 2); }

TwoSpeciesVector join_species(const Eigen::VectorXd& plus, const Eigen::VectorXd& minus) {
  TwoSpeciesVector g(plus.size() + minus.size());
  g << plus, minus;
  return g;
}

Eigen::VectorXd contract_q1(const TwoSpeciesVector& G) { return species_plus(G) - species_minus(G); }
Eigen::VectorXd contract_q2(const TwoSpeciesVector& G) { return species_plus(G) + species_minus(G); }

}  // namespace vmb
