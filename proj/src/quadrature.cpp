#include "vmblab/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "vmblab/error.hpp"

namespace vmb {
namespace {

Rule1D golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw ConstructionError("Golub-Welsch eigenproblem failed");
  const int n = static_cast<int>(diag.size());
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v0 * v0;
  }
  return r;
}

void require_positive(int n) {
  if (n < 1) throw ArgumentError("quadrature rule needs at least one node");
}

}  // namespace

Rule1D gauss_hermite_prob(int n) {
  require_positive(n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n), e(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) e(k - 1) = std::sqrt(static_cast<double>(k));
  return golub_welsch(d, e, 1.0);
}

Rule1D gauss_hermite_phys(int n) {
  require_positive(n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n), e(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) e(k - 1) = std::sqrt(0.5 * k);
  return golub_welsch(d, e, std::sqrt(std::numbers::pi));
}

Rule1D gauss_legendre(int n) {
  require_positive(n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n), e(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) e(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(d, e, 2.0);
}

Rule1D gauss_laguerre(int n, double alpha) {
  require_positive(n);
  if (alpha <= -1.0) throw ArgumentError("Laguerre exponent must exceed -1");
  Eigen::VectorXd d(n), e(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) d(k) = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) e(k - 1) = std::sqrt(k * (k + alpha));
  return golub_welsch(d, e, std::tgamma(alpha + 1.0));
}

SphereRule lebedev26() {
  SphereRule s;
  s.degree = 7;
  const double a1 = 1.0 / 21.0, a2 = 4.0 / 105.0, a3 = 9.0 / 280.0;
  for (int ax = 0; ax < 3; ++ax)
    for (double sg : {1.0, -1.0}) {
      Vec3 p{0, 0, 0};
      p[ax] = sg;
      s.points.push_back(p);
      s.weights.push_back(a1);
    }
  const double h = 1.0 / std::sqrt(2.0);
  for (int ax = 0; ax < 3; ++ax)
    for (double s1 : {1.0, -1.0})
      for (double s2 : {1.0, -1.0}) {
        Vec3 p{0, 0, 0};
        p[(ax + 1) % 3] = s1 * h;
        p[(ax + 2) % 3] = s2 * h;
        s.points.push_back(p);
        s.weights.push_back(a2);
      }
  const double c = 1.0 / std::sqrt(3.0);
  for (double s1 : {1.0, -1.0})
    for (double s2 : {1.0, -1.0})
      for (double s3 : {1.0, -1.0}) {
        s.points.push_back({s1 * c, s2 * c, s3 * c});
        s.weights.push_back(a3);
      }
  return s;
}

SphereRule product_sphere_rule(int degree) {
  if (degree < 0) throw ArgumentError("sphere rule degree must be nonnegative");
  const int nz = degree / 2 + 1;
  const int nphi = degree + 1;
  const Rule1D gl = gauss_legendre(nz);
  SphereRule s;
  s.degree = degree;
  for (int i = 0; i < nz; ++i) {
    const double z = gl.nodes[i];
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * std::numbers::pi * (j + 0.5) / nphi;
      s.points.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
      s.weights.push_back(0.5 * gl.weights[i] / nphi);
    }
  }
  return s;
}

}  // namespace vmb
