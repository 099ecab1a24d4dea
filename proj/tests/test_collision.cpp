#include <catch_amalgamated.hpp>
#include <cmath>

#include "common.hpp"
#include "vmblab/error.hpp"
#include "vmblab/projections.hpp"

using namespace vmb;
using Catch::Approx;

namespace {

// int |v - v*| M(v*) dv* for |v| = s: angular integral in closed form, radial by composite Simpson
double nu_oracle(double s) {
  const int n = 20000;
  const double rmax = 14.0, h = rmax / n;
  auto f = [&](double r) {
    if (r == 0.0) return 0.0;
    const double ang = s > 0.0 ? (std::pow(s + r, 3) - std::pow(std::abs(s - r), 3)) / (3.0 * s * r) : 2.0 * r;
    return 2.0 * M_PI * r * r * std::pow(2.0 * M_PI, -1.5) * std::exp(-0.5 * r * r) * ang;
  };
  double sum = f(0) + f(rmax);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return sum * h / 3.0;
}

double asym(const Eigen::MatrixXd& A) { return (A - A.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("collision frequency closed form against an independent radial quadrature") {
  CHECK(collision_frequency(0.0) == Approx(2.0 * std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  for (double s : {0.0, 1e-4, 0.3, 1.0, 2.5, 5.0, 7.5, 10.0}) {
    CHECK(collision_frequency(s) == Approx(nu_oracle(s)).epsilon(1e-9));
    CHECK(collision_frequency_quadrature(s) == Approx(nu_oracle(s)).epsilon(1e-9));
  }
  CHECK(collision_frequency(Vec3{3.0, 4.0, 0.0}) == Approx(collision_frequency(5.0)));
  // |v| + 1/|v| for large speeds
  CHECK(collision_frequency(40.0) == Approx(40.0 + 1.0 / 40.0).epsilon(1e-10));
}

TEST_CASE("collision frequency is comparable to 1 + |v|") {
  const FrequencyBounds b = fit_frequency_bounds(10.0);
  CHECK(b.c1 > 0.5);
  CHECK(b.c2 < 2.0);
  CHECK(b.c1 <= b.c2);
  for (double s = 0; s <= 10.0; s += 0.125) {
    const double r = collision_frequency(s) / (1 + s);
    CHECK(r >= b.c1 - 1e-12);
    CHECK(r <= b.c2 + 1e-12);
  }
}

TEST_CASE("quadrature resolution defaults") {
  const CollisionQuadratureSpec s = resolve_collision_quadrature(4, {});
  CHECK(s.center_points > 0);
  CHECK(s.radial_points > 0);
  CHECK(s.relative_degree > 0);
  CHECK(s.scattering_degree > 0);
  CollisionQuadratureSpec tiny;
  tiny.budget = 10;
  CHECK(resolve_collision_quadrature(4, tiny).budget == 10);
  auto basis = std::make_shared<const VelocityBasis>(3);
  CHECK_THROWS_AS(CollisionOperators(basis, tiny), ConfigurationError);
}

TEST_CASE("linearized operators are symmetric with the right kernels") {
  const auto ops = vmbtest::operators(3);
  const VelocityBasis& b = ops->basis();
  CHECK(asym(ops->L_single()) < 1e-12);
  CHECK(asym(ops->frakL()) < 1e-12);
  CHECK(asym(ops->L_two()) < 1e-12);
  CHECK((ops->L_single() * b.kernel_single()).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((ops->frakL() * b.sqrt_maxwellian()).norm() < 1e-7);
  CHECK((ops->L_two() * b.kernel_two()).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(ops->spectral_gap() > 0.1);
  CHECK(ops->coercivity_constant() > 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops->L_two());
  CHECK(es.eigenvalues()(6) > 0.1);
  CHECK(std::abs(es.eigenvalues()(5)) < 1e-7);
}

TEST_CASE("linearized operators from the bilinear form") {
  const auto ops = vmbtest::operators(3);
  const int n = ops->size();
  const Eigen::VectorXd& m = ops->basis().sqrt_maxwellian();
  std::mt19937 rng(11);
  const Eigen::VectorXd g = vmbtest::random_vector(n, rng);
  const Eigen::VectorXd Lg = -(ops->apply_Q(g, m) + ops->apply_Q(m, g));
  const Eigen::VectorXd Fg = -(ops->apply_Q(g, m) - ops->apply_Q(m, g));
  CHECK((ops->L_single() * g - Lg).norm() < 1e-10 * (1 + Lg.norm()));
  CHECK((ops->frakL() * g - Fg).norm() < 1e-10 * (1 + Fg.norm()));
  // species sums see 2L, species differences see L + frakL
  const Eigen::VectorXd sum = ops->L_two() * join_species(g, g);
  const Eigen::VectorXd diff = ops->L_two() * join_species(g, -g);
  CHECK((species_plus(sum) - 2.0 * ops->L_single() * g).norm() < 1e-10 * (1 + sum.norm()));
  CHECK((species_plus(diff) - (ops->L_single() + ops->frakL()) * g).norm() < 1e-10 * (1 + diff.norm()));
  CHECK((species_minus(diff) + (ops->L_single() + ops->frakL()) * g).norm() < 1e-10 * (1 + diff.norm()));
}

TEST_CASE("Hilbert decomposition") {
  const auto ops = vmbtest::operators(3);
  CHECK((ops->K_single() - (ops->nu_matrix() - ops->L_single())).norm() < 1e-12);
  CHECK((ops->L_two() + ops->K_two() - 2.0 * ops->nu_two()).norm() < 1e-12);
  CHECK(asym(ops->nu_matrix()) < 1e-12);
  const Eigen::VectorXd& m = ops->basis().sqrt_maxwellian();
  // <nu sqrt(M), sqrt(M)> = int nu M dv = E|v - v*| = 4 / sqrt(pi)
  CHECK(m.dot(ops->nu_matrix() * m) == Approx(4.0 / std::sqrt(M_PI)).epsilon(1e-6));
  CHECK(ops->apply_nu_weighted_norm(join_species(m, m)) == Approx(8.0 / std::sqrt(M_PI)).epsilon(1e-6));
}

TEST_CASE("bilinear form is orthogonal to the collision invariants") {
  const auto ops = vmbtest::operators(3);
  const int n = ops->size();
  const VelocityBasis& b = ops->basis();
  std::mt19937 rng(5);
  double worst_q = 0, worst_gamma = 0, worst_sym = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd g = vmbtest::random_vector(n, rng), h = vmbtest::random_vector(n, rng);
    const Eigen::VectorXd q = ops->apply_Q(g, h);
    const Eigen::VectorXd qs = q + ops->apply_Q(h, g);
    worst_q = std::max(worst_q, std::abs(b.sqrt_maxwellian().dot(q)) / (g.norm() * h.norm()));
    worst_q = std::max(worst_q, (b.kernel_single().transpose() * qs).cwiseAbs().maxCoeff() / (g.norm() * h.norm()));
    const Eigen::VectorXd G = vmbtest::random_vector(2 * n, rng), H = vmbtest::random_vector(2 * n, rng);
    const Eigen::VectorXd gam = ops->apply_Gamma(G, H);
    worst_gamma =
        std::max(worst_gamma, (b.kernel_two().transpose() * gam).cwiseAbs().maxCoeff() / (G.norm() * H.norm()));
    worst_sym = std::max(worst_sym, (gam - ops->apply_Gamma(H, G)).norm());
  }
  CHECK(worst_q < 1e-7);
  CHECK(worst_gamma < 1e-7);
  CHECK(worst_sym < 1e-12);
}

TEST_CASE("batched forms agree with single evaluations") {
  const auto ops = vmbtest::operators(3);
  const int n = ops->size();
  std::mt19937 rng(9);
  Eigen::MatrixXd G(2 * n, 3), A(n, 3), B(n, 3);
  for (int c = 0; c < 3; ++c) {
    G.col(c) = vmbtest::random_vector(2 * n, rng);
    A.col(c) = vmbtest::random_vector(n, rng);
    B.col(c) = vmbtest::random_vector(n, rng);
  }
  const Eigen::MatrixXd diag = ops->apply_Gamma_diag_batch(G);
  const Eigen::MatrixXd q = ops->apply_Q_batch(A, B);
  for (int c = 0; c < 3; ++c) {
    CHECK((diag.col(c) - ops->apply_Gamma(G.col(c), G.col(c))).norm() < 1e-12);
    CHECK((q.col(c) - ops->apply_Q(A.col(c), B.col(c))).norm() < 1e-12);
  }
  CHECK_THROWS_AS(ops->apply_Q(A.col(0), B.col(0).head(3)), ArgumentError);
}

TEST_CASE("operators rebuilt from a stored tensor are identical") {
  const auto ops = vmbtest::operators(3);
  const CollisionOperators copy(ops->basis_ptr(), ops->spec(), ops->gamma_tensor());
  CHECK(copy.hash() == ops->hash());
  CHECK(copy.L_two() == ops->L_two());
  CHECK_THROWS_AS(CollisionOperators(ops->basis_ptr(), ops->spec(), Eigen::MatrixXd::Zero(3, 3)), ArgumentError);
  CHECK(CollisionOperators::spec_string_for(ops->basis(), ops->spec()) == ops->spec_string());
}

TEST_CASE("orthogonal complement") {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(5, 2);
  K(0, 0) = 1;
  K(1, 1) = 2;
  K(2, 1) = 1;
  const Eigen::MatrixXd C = orthogonal_complement(K);
  REQUIRE(C.cols() == 3);
  CHECK((C.transpose() * K).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((C.transpose() * C - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}
