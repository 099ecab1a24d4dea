#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "vmblab/velocity_basis.hpp"

namespace vmb {

/// Hydrodynamic projection P onto Ker of the two-species operator and Pi_L for one species.
class KernelProjections {
 public:
  explicit KernelProjections(const VelocityBasis& basis);

  const Eigen::MatrixXd& P() const { return P_; }
  const Eigen::MatrixXd& Pi_L() const { return Pi_; }

  TwoSpeciesVector project_P(const TwoSpeciesVector& G) const { return P_ * G; }
  TwoSpeciesVector project_P_perp(const TwoSpeciesVector& G) const { return G - P_ * G; }
  Eigen::VectorXd project_Pi_L(const Eigen::VectorXd& g) const { return Pi_ * g; }
  Eigen::VectorXd project_Pi_L_perp(const Eigen::VectorXd& g) const { return g - Pi_ * g; }

  /// (rho+, rho-, u1, u2, u3, theta) such that PG = rho+ phi1 + rho- phi2 + u.phi_{3..5} + theta phi6.
  Eigen::Matrix<double, 6, 1> hydro_coefficients(const TwoSpeciesVector& G) const;

 private:
  Eigen::MatrixXd P_;
  Eigen::MatrixXd Pi_;
  Eigen::MatrixXd phi_;
};

/// The seventeen moment vectors and the orthogonal projection onto their span.
class SeventeenMoments {
 public:
  static constexpr int kCount = 17;
  explicit SeventeenMoments(const VelocityBasis& basis);

  // Columns beta_1..beta_17 in the two-species layout.
  const Eigen::MatrixXd& vectors() const { return beta_; }
  // Orthonormal companion e_1..e_17.
  const Eigen::MatrixXd& orthonormal() const { return ortho_; }
  static const std::array<std::string, kCount>& labels();
  int rank() const { return rank_; }

  struct Result {
    TwoSpeciesVector projection;
    Eigen::VectorXd coefficients;  // expansion on beta_1..beta_17
  };
  Result project(const TwoSpeciesVector& f) const;
  /// Single-species input is lifted as [f, 0].
  Result project_single(const Eigen::VectorXd& f) const;

 private:
  Eigen::MatrixXd beta_;
  Eigen::MatrixXd ortho_;
  Eigen::MatrixXd coeff_map_;
  int rank_ = 0;
};

/// Fluid variables read off G.
struct FluidMoments {
  double rho = 0, theta = 0, n = 0, w = 0;
  Vec3 u{0, 0, 0}, j{0, 0, 0};
  // (3/5) theta - (2/5) rho, the temperature compared with the limit
  double theta_limit = 0;
};

enum MomentRow : int {
  kRho = 0,
  kU1,
  kU2,
  kU3,
  kTheta,
  kN,
  kJ1,
  kJ2,
  kJ3,
  kW,
  kThetaLimit,
  kMomentRows
};

/// Linear functionals giving each moment row as m = W^T G. Rows j and w carry no 1/eps.
Eigen::MatrixXd moment_functionals(const VelocityBasis& basis);

FluidMoments extract_moments(const VelocityBasis& basis, const TwoSpeciesVector& G, double eps);

}  // namespace vmb
