#include "vmblab/projections.hpp"

#include "vmblab/error.hpp"

namespace vmb {

KernelProjections::KernelProjections(const VelocityBasis& basis) : phi_(basis.kernel_two()) {
  const Eigen::Matrix<double, 6, 1> wt = (Eigen::Matrix<double, 6, 1>() << 1, 1, 0.5, 0.5, 0.5, 1.0 / 3.0).finished();
  P_ = phi_ * wt.asDiagonal() * phi_.transpose();
  const Eigen::MatrixXd& chi = basis.kernel_single();
  const Eigen::Matrix<double, 5, 1> ws = (Eigen::Matrix<double, 5, 1>() << 1, 1, 1, 1, 2.0 / 3.0).finished();
  Pi_ = chi * ws.asDiagonal() * chi.transpose();
}

Eigen::Matrix<double, 6, 1> KernelProjections::hydro_coefficients(const TwoSpeciesVector& G) const {
  Eigen::Matrix<double, 6, 1> c = phi_.transpose() * G;
  c.segment<3>(2) *= 0.5;
  c(5) /= 3.0;
  return c;
}

const std::array<std::string, SeventeenMoments::kCount>& SeventeenMoments::labels() {
  static const std::array<std::string, kCount> l{"f+",  "f-",  "f1+", "f2+", "f3+", "f1-", "f2-", "f3-", "f1",
                                                 "f2",  "f3",  "ft1", "ft2", "ft3", "f12", "f13", "f23"};
  return l;
}

SeventeenMoments::SeventeenMoments(const VelocityBasis& basis) {
  if (basis.order() < 3)
    throw ConfigurationError("seventeen-moment basis needs velocity order >= 3 (has degree-3 members)");
  const int n = basis.size();
  beta_ = Eigen::MatrixXd::Zero(2 * n, kCount);
  const Eigen::VectorXd one = basis.sqrt_maxwellian();
  beta_.col(0).head(n) = one;
  beta_.col(1).tail(n) = one;
  const Polynomial s2 = Polynomial::speed_squared();
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd vi = basis.project(Polynomial::coordinate(i));
    beta_.col(2 + i).head(n) = vi;
    beta_.col(5 + i).tail(n) = vi;
    const Eigen::VectorXd vii = basis.project(Polynomial::coordinate(i) * Polynomial::coordinate(i));
    beta_.col(8 + i) << vii, vii;
    const Eigen::VectorXd vis = basis.project(Polynomial::coordinate(i) * s2);
    beta_.col(11 + i) << vis, vis;
  }
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int p = 0; p < 3; ++p) {
    const Eigen::VectorXd vjk =
        basis.project(Polynomial::coordinate(pairs[p][0]) * Polynomial::coordinate(pairs[p][1]));
    beta_.col(14 + p) << vjk, vjk;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(beta_);
  const auto& sv = svd.singularValues();
  rank_ = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > VelocityBasis::kTolerance * sv(0)) ++rank_;
  if (rank_ != kCount)
    throw ConfigurationError("seventeen-moment basis is rank deficient (rank " + std::to_string(rank_) + ")");

  const Eigen::MatrixXd gram = beta_.transpose() * beta_;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw ConfigurationError("seventeen-moment Gram matrix not positive definite");
  // e = beta L^{-T}
  ortho_ = llt.matrixL().solve(beta_.transpose()).transpose();
  coeff_map_ = llt.solve(beta_.transpose());
}

SeventeenMoments::Result SeventeenMoments::project(const TwoSpeciesVector& f) const {
  if (f.size() != beta_.rows()) throw ArgumentError("seventeen-moment projection: size mismatch");
  return {ortho_ * (ortho_.transpose() * f), coeff_map_ * f};
}

SeventeenMoments::Result SeventeenMoments::project_single(const Eigen::VectorXd& f) const {
  return project(join_species(f, Eigen::VectorXd::Zero(f.size())));
}

Eigen::MatrixXd moment_functionals(const VelocityBasis& basis) {
  const int n = basis.size();
  const Eigen::MatrixXd& chi = basis.kernel_single();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2 * n, kMomentRows);
  auto q2 = [&](int row, const Eigen::VectorXd& c, double s) {
    W.col(row).head(n) = s * c;
    W.col(row).tail(n) = s * c;
  };
  auto q1 = [&](int row, const Eigen::VectorXd& c) {
    W.col(row).head(n) = c;
    W.col(row).tail(n) = -c;
  };
  q2(kRho, chi.col(0), 0.5);
  for (int a = 0; a < 3; ++a) q2(kU1 + a, chi.col(1 + a), 0.5);
  // |v|^2/3 - 1 = (2/3)(|v|^2/2 - 3/2)
  q2(kTheta, chi.col(4), 1.0 / 3.0);
  q1(kN, chi.col(0));
  for (int a = 0; a < 3; ++a) q1(kJ1 + a, chi.col(1 + a));
  q1(kW, chi.col(4));
  const Polynomial t5 = Polynomial::speed_squared() * 0.2 - Polynomial::constant(1.0);
  q2(kThetaLimit, basis.project(t5), 0.5);
  return W;
}

FluidMoments extract_moments(const VelocityBasis& basis, const TwoSpeciesVector& G, double eps) {
  if (!(eps > 0.0)) throw ArgumentError("extract_moments: eps must be positive");
  if (G.size() != 2 * basis.size()) throw ArgumentError("extract_moments: size mismatch");
  const Eigen::VectorXd m = moment_functionals(basis).transpose() * G;
  FluidMoments r;
  r.rho = m(kRho);
  r.theta = m(kTheta);
  r.n = m(kN);
  r.w = m(kW) / eps;
  for (int a = 0; a < 3; ++a) {
    r.u[a] = m(kU1 + a);
    r.j[a] = m(kJ1 + a) / eps;
  }
  r.theta_limit = m(kThetaLimit);
  return r;
}

}  // namespace vmb
