#include <catch_amalgamated.hpp>
#include <cmath>

#include "common.hpp"
#include "vmblab/error.hpp"

using namespace vmb;
using Catch::Approx;

TEST_CASE("basis size counts monomials of bounded total degree") {
  for (int k = 0; k <= 8; ++k) CHECK(basis_size(k) == (k + 1) * (k + 2) * (k + 3) / 6);
  CHECK(basis_size(4) == 35);
}

TEST_CASE("basis is orthonormal under the quadrature") {
  const VelocityBasis b(4);
  REQUIRE(b.size() == 35);
  const Eigen::MatrixXd& P = b.basis_eval();
  const Eigen::MatrixXd G = P.transpose() * b.quad_weights().asDiagonal() * P;
  CHECK((G - Eigen::MatrixXd::Identity(35, 35)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(b.quad_weights().sum() == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("maxwellian is the standard Gaussian density") {
  CHECK(maxwellian({0, 0, 0}) == Approx(std::pow(2 * M_PI, -1.5)));
  CHECK(maxwellian({1, 1, 1}) == Approx(std::pow(2 * M_PI, -1.5) * std::exp(-1.5)));
}

TEST_CASE("kernel vectors have the expected norms and moments") {
  const VelocityBasis b(4);
  const Eigen::MatrixXd& chi = b.kernel_single();
  REQUIRE(chi.cols() == 5);
  const Eigen::MatrixXd g = chi.transpose() * chi;
  Eigen::VectorXd expect(5);
  expect << 1, 1, 1, 1, 1.5;
  CHECK((g - Eigen::MatrixXd(expect.asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
  // chi_5 = (|v|^2/2 - 3/2) sqrt(M): coefficients from projecting the polynomial
  const Eigen::VectorXd c5 = b.project(Polynomial::speed_squared() * 0.5 - Polynomial::constant(1.5));
  CHECK((c5 - chi.col(4)).norm() < 1e-12);
  const Eigen::MatrixXd& phi = b.kernel_two();
  REQUIRE(phi.rows() == 70);
  REQUIRE(phi.cols() == 6);
  Eigen::VectorXd pn(6);
  pn << 1, 1, 2, 2, 2, 3;
  CHECK((phi.transpose() * phi - Eigen::MatrixXd(pn.asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projection of a polynomial integrates against the rule") {
  const VelocityBasis b(4);
  const Polynomial p = Polynomial::monomial({2, 0, 0}) - Polynomial::monomial({0, 1, 1}, 0.5);
  const Eigen::VectorXd c = b.project(p);
  const Eigen::VectorXd values = b.basis_eval() * c;
  for (int q = 0; q < b.node_count(); q += 997) {
    const Vec3 v{b.quad_nodes()(q, 0), b.quad_nodes()(q, 1), b.quad_nodes()(q, 2)};
    CHECK(values(q) == Approx(p.evaluate(v)).margin(1e-10));
  }
  CHECK(b.integrate(Polynomial::monomial({2, 2, 0})) == Approx(1.0));
  CHECK(b.integrate(Polynomial::monomial({4, 0, 0})) == Approx(3.0));
}

TEST_CASE("Galerkin matrices have the symmetries of their operators") {
  const VelocityBasis b(4);
  for (int a = 0; a < 3; ++a) {
    const Eigen::MatrixXd D = b.derivative_matrix(a);
    const Eigen::MatrixXd V = b.multiplication_matrix(a);
    const Eigen::MatrixXd R = b.rotation_matrix(a);
    CHECK((D + D.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((V - V.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((R + R.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
  // v_1 sqrt(M) = V_1 applied to sqrt(M)
  const Eigen::VectorXd v1 = b.multiplication_matrix(0) * b.sqrt_maxwellian();
  CHECK((v1 - b.kernel_single().col(1)).norm() < 1e-12);
  // rotation about axis 3 annihilates radial functions
  CHECK((b.rotation_matrix(2) * b.kernel_single().col(4)).norm() < 1e-12);
}

TEST_CASE("derivative grams are positive semidefinite and match the zero order gram") {
  const VelocityBasis b(3);
  const Eigen::MatrixXd G0 = b.derivative_gram({0, 0, 0});
  CHECK((G0 - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXd G1 = b.derivative_gram({1, 0, 0});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G1);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  // with a unit weight the weighted gram reduces to the plain one
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(b.node_count());
  CHECK((b.derivative_gram_weighted({1, 0, 0}, one) - G1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b.weighted_gram(one) - G0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spec hash identifies the discretization") {
  const VelocityBasis a(3), b(3), c(4), d(3, QuadratureSpec{16});
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash() != d.hash());
  CHECK(a.hash().size() == 64);
}

TEST_CASE("species helpers") {
  Eigen::VectorXd p(3), m(3);
  p << 1, 2, 3;
  m << 4, 5, 6;
  const Eigen::VectorXd G = join_species(p, m);
  CHECK(species_plus(G) == p);
  CHECK(species_minus(G) == m);
  CHECK(contract_q1(G) == p - m);
  CHECK(contract_q2(G) == p + m);
}

TEST_CASE("invalid basis parameters are rejected") {
  CHECK_THROWS_AS(VelocityBasis(1), ArgumentError);
  CHECK_THROWS_AS(VelocityBasis(4, QuadratureSpec{0}), ArgumentError);
  CHECK_THROWS_AS(VelocityBasis(4, QuadratureSpec{2}), ConstructionError);
}
