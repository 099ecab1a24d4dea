#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vmblab/polynomial.hpp"
#include "vmblab/quadrature.hpp"

namespace vmb {

/// Coefficients of G = [G+, G-], species-major (length 2N).
using TwoSpeciesVector = Eigen::VectorXd;

struct QuadratureSpec {
  int nodes_per_axis = 20;
};

/// Orthonormal functions p_i(v) sqrt(M(v)) with total degree of p_i at most `order`,
/// together with the tensor Gauss-Hermite rule used for every velocity integral.
class VelocityBasis {
 public:
  static constexpr double kTolerance = 1e-10;

  VelocityBasis(int order, const QuadratureSpec& quad = {});

  int order() const { return order_; }
  int size() const { return static_cast<int>(polys_.size()); }
  int node_count() const { return static_cast<int>(weights_.size()); }
  const QuadratureSpec& quadrature() const { return quad_; }

  // nodes (Q x 3), weights (sum 1, include M), M at nodes, p_i at nodes (Q x N)
  const Eigen::MatrixXd& quad_nodes() const { return nodes_; }
  const Eigen::VectorXd& quad_weights() const { return weights_; }
  const Eigen::VectorXd& maxwellian_vals() const { return maxwellian_; }
  const Eigen::MatrixXd& basis_eval() const { return values_; }
  const std::vector<Polynomial>& polynomials() const { return polys_; }

  // p_i(v) for all i
  Eigen::VectorXd evaluate(const Vec3& v) const;
  void evaluate(const Vec3& v, double* out) const;

  /// Coefficients of p sqrt(M) (exact when deg p + order fits the rule).
  Eigen::VectorXd project(const Polynomial& p) const;
  /// Coefficients of f sqrt(M) given f at the nodes.
  Eigen::VectorXd project_values(const Eigen::VectorXd& f_at_nodes) const;
  /// int p M dv
  double integrate(const Polynomial& p) const;

  /// Coefficients of sqrt(M).
  const Eigen::VectorXd& sqrt_maxwellian() const { return mass_; }
  /// Columns chi_1..chi_5 (not normalized: <chi_5, chi_5> = 3/2).
  const Eigen::MatrixXd& kernel_single() const { return chi_; }
  /// Columns phi_1..phi_6 in the two-species layout.
  const Eigen::MatrixXd& kernel_two() const { return phi_; }

  /// <d/dv_a e_i, e_k> in (k, i) position.
  Eigen::MatrixXd derivative_matrix(int axis) const;
  /// <v_a e_i, e_k>.
  Eigen::MatrixXd multiplication_matrix(int axis) const;
  /// Galerkin matrix of sum_{a,b} eps_{abc} v_b d/dv_a, so (v x B).grad_v = sum_c B_c R_c.
  Eigen::MatrixXd rotation_matrix(int axis) const;
  /// <d^alpha e_i, d^alpha e_j>, exact by quadrature.
  Eigen::MatrixXd derivative_gram(const Exponent& alpha) const;
  /// Same with the extra weight nu(v).
  Eigen::MatrixXd derivative_gram_weighted(const Exponent& alpha, const Eigen::VectorXd& weight_at_nodes) const;

  /// Galerkin matrix of multiplication by a function given at the nodes.
  Eigen::MatrixXd weighted_gram(const Eigen::VectorXd& weight_at_nodes) const;

  /// Stable text identifying the discretization.
  std::string spec_string() const;
  std::string hash() const;

 private:
  Eigen::VectorXd values_at(const Polynomial& p) const;

  int order_;
  QuadratureSpec quad_;
  std::vector<Exponent> monomials_;
  Eigen::MatrixXd coeffs_;  // p_i = sum_m coeffs_(i, m) v^monomials_[m]
  std::vector<Polynomial> polys_;
  Eigen::MatrixXd nodes_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd maxwellian_;
  Eigen::MatrixXd values_;
  Eigen::VectorXd mass_;
  Eigen::MatrixXd chi_;
  Eigen::MatrixXd phi_;
  std::array<Eigen::MatrixXd, 3> powers_;  // node coordinates raised to 0..2 order + 8
};

/// Basis size for total degree `order`.
int basis_size(int order);

Eigen::VectorXd species_plus(const TwoSpeciesVector& G);
Eigen::VectorXd species_minus(const TwoSpeciesVector& G);
TwoSpeciesVector join_species(const Eigen::VectorXd& plus, const Eigen::VectorXd& minus);
// G.q1 = G+ - G-, G.q2 = G+ + G-
Eigen::VectorXd contract_q1(const TwoSpeciesVector& G);
Eigen::VectorXd contract_q2(const TwoSpeciesVector& G);

double maxwellian(const Vec3& v);

}  // namespace vmb
