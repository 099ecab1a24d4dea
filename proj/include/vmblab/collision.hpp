#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "vmblab/velocity_basis.hpp"

namespace vmb {

/// nu(v) = int |v - v*| M(v*) dv*, closed form in |v|.
double collision_frequency(double speed);
double collision_frequency(const Vec3& v);
/// Same integral by composite Gauss-Legendre in spherical coordinates around v.
double collision_frequency_quadrature(double speed, int panels = 48);

struct FrequencyBounds {
  double c1 = 0, c2 = 0;  // c1 (1 + |v|) <= nu(v) <= c2 (1 + |v|)
};
/// Extreme values of nu(v) / (1 + |v|) sampled on [0, vmax].
FrequencyBounds fit_frequency_bounds(double vmax, int samples = 2001);

/// Quadrature for the collision tensor in center-of-mass variables
/// V = (v + v*)/2, w = v - v* = r w_hat, outgoing v' = V + r sigma / 2.
/// Zero entries are resolved to the smallest rule that is exact for the basis order.
struct CollisionQuadratureSpec {
  int center_points = 0;      // physicists' Gauss-Hermite per axis for V
  int radial_points = 0;      // Gauss-Laguerre (alpha = 1) in t = r^2/4
  int relative_degree = 0;    // sphere rule degree for w_hat
  int scattering_degree = 0;  // sphere rule degree for sigma; <= 7 uses the 26-point rule
  long long budget = 20'000'000;  // cap on (V, r, w_hat) nodes
};

CollisionQuadratureSpec resolve_collision_quadrature(int order, const CollisionQuadratureSpec& spec);

/// Galerkin collision operators on a velocity basis. Immutable after construction.
class CollisionOperators {
 public:
  static constexpr double kSymmetryTol = 1e-9;
  static constexpr double kKernelTol = 1e-7;

  CollisionOperators(std::shared_ptr<const VelocityBasis> basis, const CollisionQuadratureSpec& spec = {});
  /// From a previously assembled tensor (rows i + N j, columns k).
  CollisionOperators(std::shared_ptr<const VelocityBasis> basis, const CollisionQuadratureSpec& spec,
                     Eigen::MatrixXd tensor);

  const VelocityBasis& basis() const { return *basis_; }
  std::shared_ptr<const VelocityBasis> basis_ptr() const { return basis_; }
  const CollisionQuadratureSpec& spec() const { return spec_; }
  int size() const { return n_; }

  /// T(i + N j, k) = <Q(e_i, e_j), e_k>.
  const Eigen::MatrixXd& gamma_tensor() const { return tensor_; }
  double tensor(int i, int j, int k) const { return tensor_(i + n_ * j, k); }

  const Eigen::MatrixXd& L_single() const { return L_; }
  const Eigen::MatrixXd& frakL() const { return frakL_; }
  const Eigen::MatrixXd& L_two() const { return L2_; }
  const Eigen::VectorXd& nu_at_nodes() const { return nu_nodes_; }
  const Eigen::MatrixXd& nu_matrix() const { return nu_; }
  const Eigen::MatrixXd& nu_two() const { return nu2_; }
  /// Hilbert split: L_single = nu - K_single, L_two = 2 nu - K_two.
  Eigen::MatrixXd K_single() const { return nu_ - L_; }
  Eigen::MatrixXd K_two() const { return 2.0 * nu2_ - L2_; }

  Eigen::VectorXd apply_Q(const Eigen::VectorXd& g, const Eigen::VectorXd& h) const;
  /// Column-wise Q(G.col(p), H.col(p)).
  Eigen::MatrixXd apply_Q_batch(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H) const;
  TwoSpeciesVector apply_Gamma(const TwoSpeciesVector& G, const TwoSpeciesVector& H) const;
  /// Gamma(G, G) for every column (two-species layout).
  Eigen::MatrixXd apply_Gamma_diag_batch(const Eigen::MatrixXd& G) const;

  /// <nu G, G>
  double apply_nu_weighted_norm(const TwoSpeciesVector& G) const;

  /// Smallest eigenvalue of L_two on Ker-perp.
  double spectral_gap() const;
  /// Largest lambda with <L_two G, G> >= lambda |P_perp G|_nu^2.
  double coercivity_constant() const;

  std::string spec_string() const;
  std::string hash() const;
  static std::string spec_string_for(const VelocityBasis& basis, const CollisionQuadratureSpec& spec);

 private:
  void assemble_tensor();
  void build_operators();

  std::shared_ptr<const VelocityBasis> basis_;
  CollisionQuadratureSpec spec_;
  int n_ = 0;
  Eigen::MatrixXd tensor_;
  Eigen::MatrixXd L_, frakL_, L2_, nu_, nu2_;
  Eigen::VectorXd nu_nodes_;
};

/// Orthonormal basis of the orthogonal complement of the columns of `kernel`.
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& kernel);

}  // namespace vmb
