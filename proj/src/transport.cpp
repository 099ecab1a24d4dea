#include "vmblab/transport.hpp"

#include <algorithm>
#include <cmath>

#include "vmblab/error.hpp"

namespace vmb {

KerPerpSolution solve_on_ker_perp(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs, const Eigen::MatrixXd& kernel,
                                  double tol, int max_iter) {
  const int n = static_cast<int>(rhs.size());
  if (A.rows() != n || A.cols() != n || kernel.rows() != n) throw ArgumentError("solve_on_ker_perp: shape mismatch");
  Eigen::MatrixXd Qk;
  if (kernel.cols() > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
    Qk = qr.householderQ() * Eigen::MatrixXd::Identity(n, kernel.cols());
  } else {
    Qk.resize(n, 0);
  }
  auto deflate = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd { return y - Qk * (Qk.transpose() * y); };

  const double bnorm = rhs.norm();
  KerPerpSolution out;
  out.x = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) return out;
  const double leak = (Qk.transpose() * rhs).norm() / bnorm;
  if (leak > tol) throw InfeasibleError("right-hand side not orthogonal to the kernel (relative leak " +
                                        std::to_string(leak) + ")");
  if (max_iter <= 0) max_iter = 20 * n;

  Eigen::VectorXd r = deflate(rhs), p = r, Ap(n);
  double rr = r.squaredNorm();
  int it = 0;
  for (; it < max_iter && std::sqrt(rr) > tol * bnorm; ++it) {
    Ap = deflate(A * p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) throw ConvergenceError("operator not positive on the kernel complement");
    const double alpha = rr / pAp;
    out.x += alpha * p;
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    p = deflate(r + (rr_new / rr) * p);
    rr = rr_new;
  }
  out.x = deflate(out.x);
  out.iterations = it;
  out.residual = (A * out.x - rhs).norm() / bnorm;
  if (!(out.residual <= 10.0 * tol))
    throw ConvergenceError("projected CG stalled at relative residual " + std::to_string(out.residual));
  return out;
}

std::array<std::array<Eigen::VectorXd, 3>, 3> burnett_A(const VelocityBasis& basis) {
  std::array<std::array<Eigen::VectorXd, 3>, 3> A;
  const Polynomial s2 = Polynomial::speed_squared();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Polynomial p = Polynomial::coordinate(i) * Polynomial::coordinate(j);
      if (i == j) p -= s2 * (1.0 / 3.0);
      A[i][j] = basis.project(p);
    }
  return A;
}

std::array<Eigen::VectorXd, 3> burnett_B(const VelocityBasis& basis) {
  std::array<Eigen::VectorXd, 3> B;
  const Polynomial e = 0.5 * Polynomial::speed_squared() - Polynomial::constant(2.5);
  for (int i = 0; i < 3; ++i) B[i] = basis.project(Polynomial::coordinate(i) * e);
  return B;
}

namespace {

double kernel_leak(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& x) {
  if (x.norm() == 0.0) return 0.0;
  return (kernel.transpose() * x).cwiseAbs().maxCoeff() / x.norm();
}

// int f g M dv for f sqrt(M), g sqrt(M) given as coefficient vectors
double weighted_pairing(const VelocityBasis& basis, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  const Eigen::VectorXd fv = basis.basis_eval() * f, gv = basis.basis_eval() * g;
  return (basis.quad_weights().array() * fv.array() * gv.array() * basis.maxwellian_vals().array()).sum();
}

double pointwise_pairing(const VelocityBasis& basis, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  const Eigen::VectorXd fv = basis.basis_eval() * f, gv = basis.basis_eval() * g;
  return (basis.quad_weights().array() * fv.array() * gv.array()).sum();
}

}  // namespace

MuKappa compute_mu_kappa(const CollisionOperators& ops, double tol) {
  const VelocityBasis& basis = ops.basis();
  const Eigen::MatrixXd& chi = basis.kernel_single();
  const auto A = burnett_A(basis);
  const auto B = burnett_B(basis);
  MuKappa r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const auto s = solve_on_ker_perp(ops.L_single(), A[i][j], chi, tol);
      r.A_hat[i][j] = r.A_hat[j][i] = s.x;
      r.max_residual = std::max(r.max_residual, s.residual);
      r.kernel_defect = std::max(r.kernel_defect, kernel_leak(chi, s.x));
    }
  for (int i = 0; i < 3; ++i) {
    const auto s = solve_on_ker_perp(ops.L_single(), B[i], chi, tol);
    r.B_hat[i] = s.x;
    r.max_residual = std::max(r.max_residual, s.residual);
    r.kernel_defect = std::max(r.kernel_defect, kernel_leak(chi, s.x));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      r.mu += A[i][j].dot(r.A_hat[i][j]);
      r.mu_pointwise += pointwise_pairing(basis, A[i][j], r.A_hat[i][j]);
    }
  r.mu /= 10.0;
  r.mu_pointwise /= 10.0;
  for (int i = 0; i < 3; ++i) {
    r.kappa += B[i].dot(r.B_hat[i]);
    r.kappa_pointwise += pointwise_pairing(basis, B[i], r.B_hat[i]);
  }
  r.kappa *= 2.0 / 15.0;
  r.kappa_pointwise *= 2.0 / 15.0;
  r.offdiag = {A[0][1].dot(r.A_hat[0][1]), A[0][2].dot(r.A_hat[0][2]), A[1][2].dot(r.A_hat[1][2])};
  return r;
}

SigmaLambda compute_sigma_lambda(const CollisionOperators& ops, double tol) {
  const VelocityBasis& basis = ops.basis();
  const Eigen::MatrixXd op = ops.L_single() + ops.frakL();
  const Eigen::MatrixXd kernel = basis.sqrt_maxwellian();
  SigmaLambda r;
  std::array<Eigen::VectorXd, 3> Phi;
  for (int i = 0; i < 3; ++i) {
    Phi[i] = basis.kernel_single().col(1 + i);
    const auto s = solve_on_ker_perp(op, Phi[i], kernel, tol);
    r.Phi_tilde[i] = s.x;
    r.max_residual = std::max(r.max_residual, s.residual);
    r.kernel_defect = std::max(r.kernel_defect, kernel_leak(kernel, s.x));
  }
  const Eigen::VectorXd Psi = basis.kernel_single().col(4);
  const auto s = solve_on_ker_perp(op, Psi, kernel, tol);
  r.Psi_tilde = s.x;
  r.max_residual = std::max(r.max_residual, s.residual);
  r.kernel_defect = std::max(r.kernel_defect, kernel_leak(kernel, s.x));

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.isotropy(i, j) = Phi[i].dot(r.Phi_tilde[j]);
  r.sigma = 2.0 / 3.0 * r.isotropy.trace();
  for (int i = 0; i < 3; ++i) r.sigma_weighted += weighted_pairing(basis, Phi[i], r.Phi_tilde[i]);
  r.sigma_weighted *= 2.0 / 3.0;
  r.lambda = Psi.dot(r.Psi_tilde);

  // span{ |v|^{2m} v_1 sqrt(M) }
  std::vector<Eigen::VectorXd> cols;
  Polynomial p = Polynomial::coordinate(0);
  for (int deg = 1; deg <= basis.order(); deg += 2) {
    cols.push_back(basis.project(p));
    p = p * Polynomial::speed_squared();
  }
  Eigen::MatrixXd radial(basis.size(), static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) radial.col(static_cast<int>(c)) = cols[c];
  const Eigen::VectorXd fit = radial * radial.colPivHouseholderQr().solve(r.Phi_tilde[0]);
  r.radial_defect = (r.Phi_tilde[0] - fit).norm() / r.Phi_tilde[0].norm();
  return r;
}

CoefficientReport compute_transport_coefficients(const CollisionOperators& ops, double tol) {
  const MuKappa mk = compute_mu_kappa(ops, tol);
  const SigmaLambda sl = compute_sigma_lambda(ops, tol);
  CoefficientReport r;
  r.order = ops.basis().order();
  r.mu = mk.mu;
  r.kappa = mk.kappa;
  r.sigma = sl.sigma;
  r.lambda = sl.lambda;
  r.sigma_weighted = sl.sigma_weighted;
  r.mu_pointwise = mk.mu_pointwise;
  r.kappa_pointwise = mk.kappa_pointwise;
  r.max_residual = std::max(mk.max_residual, sl.max_residual);
  r.kernel_defect = std::max(mk.kernel_defect, sl.kernel_defect);
  const double half = 0.5 * sl.sigma;
  r.isotropy_defect = (sl.isotropy - half * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() / half;
  const auto [lo, hi] = std::minmax({mk.offdiag[0], mk.offdiag[1], mk.offdiag[2]});
  r.offdiag_spread = (hi - lo) / std::abs(hi);
  r.radial_defect = sl.radial_defect;
  return r;
}

void attach_refinement(CoefficientReport& base, const CoefficientReport& refined) {
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(a); };
  base.refinement_delta = std::array<double, 4>{rel(base.mu, refined.mu), rel(base.kappa, refined.kappa),
                                                rel(base.sigma, refined.sigma), rel(base.lambda, refined.lambda)};
}

}  // namespace vmb
