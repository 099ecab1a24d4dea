#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "vmblab/collision.hpp"

namespace vmb {

struct KerPerpSolution {
  Eigen::VectorXd x;
  double residual = 0;  // |A x - rhs| / |rhs|
  int iterations = 0;
};

/// Solve A x = rhs with x orthogonal to span(kernel), A symmetric positive semidefinite
/// with exactly that kernel. Projected conjugate gradients with kernel deflation.
KerPerpSolution solve_on_ker_perp(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs, const Eigen::MatrixXd& kernel,
                                  double tol = 1e-10, int max_iter = 0);

struct MuKappa {
  double mu = 0, kappa = 0;
  // same numbers from int A Ahat M dv with polynomial parts at the quadrature nodes
  double mu_pointwise = 0, kappa_pointwise = 0;
  std::array<double, 3> offdiag{};  // <A_12, Ahat_12>, <A_13, ...>, <A_23, ...>
  std::array<std::array<Eigen::VectorXd, 3>, 3> A_hat;
  std::array<Eigen::VectorXd, 3> B_hat;
  double max_residual = 0;
  double kernel_defect = 0;
};

struct SigmaLambda {
  double sigma = 0, lambda = 0;
  double sigma_weighted = 0;  // (2/3) int Phi . Phitilde M dv, diagnostic only
  Eigen::Matrix3d isotropy = Eigen::Matrix3d::Zero();  // int Phi_i Phitilde_j dv
  std::array<Eigen::VectorXd, 3> Phi_tilde;
  Eigen::VectorXd Psi_tilde;
  double radial_defect = 0;  // distance of Phitilde_1 from {p(|v|^2) v_1 sqrt M}
  double max_residual = 0;
  double kernel_defect = 0;
};

/// A = v (x) v - |v|^2/3 I and B = v (|v|^2/2 - 5/2), as coefficient vectors of A sqrt(M), B sqrt(M).
std::array<std::array<Eigen::VectorXd, 3>, 3> burnett_A(const VelocityBasis& basis);
std::array<Eigen::VectorXd, 3> burnett_B(const VelocityBasis& basis);

MuKappa compute_mu_kappa(const CollisionOperators& ops, double tol = 1e-10);
SigmaLambda compute_sigma_lambda(const CollisionOperators& ops, double tol = 1e-10);

struct CoefficientReport {
  int order = 0;
  double mu = 0, kappa = 0, sigma = 0, lambda = 0;
  double sigma_weighted = 0;
  double mu_pointwise = 0, kappa_pointwise = 0;
  double max_residual = 0;
  double kernel_defect = 0;
  double isotropy_defect = 0;  // max |S_ij - sigma/2 delta_ij| / (sigma/2)
  double offdiag_spread = 0;   // relative spread of the three off-diagonal viscosity pairings
  double radial_defect = 0;
  // relative change against a refined basis (order + 1), when computed
  std::optional<std::array<double, 4>> refinement_delta;
};

CoefficientReport compute_transport_coefficients(const CollisionOperators& ops, double tol = 1e-10);
/// Fills refinement_delta from a report computed at a different order.
void attach_refinement(CoefficientReport& base, const CoefficientReport& refined);

}  // namespace vmb
