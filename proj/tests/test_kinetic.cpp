#include <catch_amalgamated.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "common.hpp"
#include "vmblab/diagnostics.hpp"
#include "vmblab/error.hpp"
#include "vmblab/fluid.hpp"
#include "vmblab/kinetic.hpp"
#include "vmblab/transport.hpp"

using namespace vmb;
using Catch::Approx;

namespace {

struct Packed {
  int rows_g, rows_f, cols;
  int size() const { return (rows_g + 2 * rows_f) * cols; }
};

Eigen::VectorXcd pack(const KineticState& s) {
  Eigen::VectorXcd x(s.G.size() + s.E.size() + s.B.size());
  x << s.G.reshaped(), s.E.reshaped(), s.B.reshaped();
  return x;
}

void unpack(const Eigen::VectorXcd& x, KineticState& s) {
  const Eigen::Index g = s.G.size(), e = s.E.size();
  s.G = x.head(g).reshaped(s.G.rows(), s.G.cols());
  s.E = x.segment(g, e).reshaped(s.E.rows(), s.E.cols());
  s.B = x.tail(s.B.size()).reshaped(s.B.rows(), s.B.cols());
}

// Matrix of the right-hand side linearized about G = 0, E = 0 and the mean field of `about`.
Eigen::MatrixXcd generator(const KineticSolver& ks, const KineticState& about) {
  KineticState base = ks.zero_state();
  base.B.col(0) = about.B.col(0);
  const Eigen::VectorXcd x0 = pack(base);
  KineticState d0 = base;
  ks.full_rhs(base, d0.G, d0.E, d0.B);
  const Eigen::VectorXcd f0 = pack(d0);
  const Eigen::Index n = x0.size();
  Eigen::MatrixXcd A(n, n);
  KineticState s = base;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::VectorXcd x = x0;
    x(c) += 1.0;
    unpack(x, s);
    KineticState d = s;
    ks.full_rhs(s, d.G, d.E, d.B);
    A.col(c) = pack(d) - f0;
  }
  return A;
}

KineticOptions linear_options(double eps) {
  KineticOptions o;
  o.eps = eps;
  o.nonlinear = false;
  return o;
}

}  // namespace

TEST_CASE("kinetic solver rejects bad parameters") {
  const auto ops = vmbtest::operators(3);
  const SpectralGrid grid(1, 8);
  CHECK_THROWS_AS(KineticSolver(ops, grid, linear_options(0.0)), ArgumentError);
  CHECK_THROWS_AS(KineticSolver(ops, grid, linear_options(1.5)), ArgumentError);
  const KineticSolver ks(ops, grid, linear_options(0.5));
  KineticState s = ks.zero_state();
  CHECK_THROWS_AS(ks.step(s, 0.0), ArgumentError);
  CHECK_THROWS_AS(ks.step(s, 10 * ks.max_stable_dt(s)), ArgumentError);
  s.G(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ks.step(s, 0.5 * ks.max_stable_dt(s)), IntegrationError);
}

TEST_CASE("zero state is an equilibrium") {
  const auto ops = vmbtest::operators(3);
  const SpectralGrid grid(1, 8);
  KineticOptions o;
  o.eps = 0.5;
  const KineticSolver ks(ops, grid, o);
  KineticState s = ks.zero_state();
  for (int i = 0; i < 5; ++i) ks.step(s, 1e-3);
  CHECK(s.G.norm() == 0.0);
  CHECK(s.E.norm() == 0.0);
  CHECK(s.B.norm() == 0.0);
  CHECK(s.time == Approx(5e-3));
}

TEST_CASE("linear steps converge to the exact exponential at second order") {
  const auto ops = vmbtest::operators(3);
  const SpectralGrid grid(1, 4);
  KineticOptions o = linear_options(0.5);
  o.enforce_gauss = false;
  const KineticSolver ks(ops, grid, o);
  SeedSpec seed;
  seed.amplitude = 0.1;
  seed.mean_b = Eigen::Vector3d(0.0, 0.2, 0.3);
  const KineticState s0 = ks.init_well_prepared(make_seed(grid, seed));
  const double T = 0.08;
  const Eigen::VectorXcd exact = (T * generator(ks, s0)).exp() * pack(s0);
  std::vector<double> err;
  for (int steps : {8, 16, 32}) {
    KineticState s = s0;
    for (int i = 0; i < steps; ++i) ks.step(s, T / steps);
    err.push_back((pack(s) - exact).norm() / exact.norm());
  }
  CHECK(err[0] < 1e-3);
  CHECK(err[0] / err[1] == Approx(4.0).epsilon(0.3));
  CHECK(err[1] / err[2] == Approx(4.0).epsilon(0.3));
}

TEST_CASE("Lie splitting is first order") {
  const auto ops = vmbtest::operators(3);
  const SpectralGrid grid(1, 4);
  KineticOptions o = linear_options(0.5);
  o.enforce_gauss = false;
  o.splitting = Splitting::Lie;
  const KineticSolver ks(ops, grid, o);
  const KineticState s0 = ks.init_well_prepared(make_seed(grid, SeedSpec{}));
  const double T = 0.08;
  const Eigen::VectorXcd exact = (T * generator(ks, s0)).exp() * pack(s0);
  std::vector<double> err;
  for (int steps : {16, 32}) {
    KineticState s = s0;
    for (int i = 0; i < steps; ++i) ks.step(s, T / steps);
    err.push_back((pack(s) - exact).norm() / exact.norm());
  }
  CHECK(err[0] / err[1] == Approx(2.0).epsilon(0.3));
}

TEST_CASE("implicit current coupling follows the same flow") {
  const auto ops = vmbtest::operators(3);
  const SpectralGrid grid(1, 4);
  KineticOptions o = linear_options(0.25);
  o.enforce_gauss = false;
  o.coupling = CurrentCoupling::Implicit;
  const KineticSolver ks(ops, grid, o);
  const KineticState s0 = ks.init_well_prepared(make_seed(grid, SeedSpec{}));
  const double T = 0.04;
  const Eigen::VectorXcd exact = (T * generator(ks, s0)).exp() * pack(s0);
  KineticState s = s0;
  for (int i = 0; i < 40; ++i) ks.step(s, T / 40);
  CHECK((pack(s) - exact).norm() / exact.norm() < 1e-3);
}

TEST_CASE("well-prepared data carries the seed moments and zero integrals") {
  const auto ops = vmbtest::operators(4);
  const SpectralGrid grid(1, 16);
  KineticOptions o;
  o.eps = 0.25;
  o.preparation = Preparation::Hydrodynamic;
  const KineticSolver ks(ops, grid, o);
  SeedSpec seed;
  seed.amplitude = 0.02;
  const FluidFields f = make_seed(grid, seed);
  const KineticState s = ks.init_well_prepared(f);
  const Diagnostics d(ops, grid, compute_mu_kappa(*ops), compute_sigma_lambda(*ops).sigma);
  const MomentFields m = d.moments(s);
  const int k = grid.size() - 1;
  CHECK((m.u - f.u).rightCols(k).norm() < 1e-12);
  CHECK((m.rho - f.rho).rightCols(k).norm() < 1e-12);
  CHECK((m.theta - f.theta).rightCols(k).norm() < 1e-12);
  CHECK(grid.l2_norm(m.n - f.n) < 1e-12);
  CHECK(grid.l2_norm(m.E - f.E) < 1e-12);
  CHECK(grid.l2_norm(s.B - f.B) < 1e-12);
  const ConservationIntegrals c = d.conservation_integrals(s);
  CHECK(std::abs(c.mass_plus) < 1e-14);
  CHECK(std::abs(c.mass_minus) < 1e-14);
  CHECK(c.momentum.norm() < 1e-14);
  CHECK(std::abs(c.energy) < 1e-14);
  CHECK(ks.warnings().empty());
}

TEST_CASE("mode generator is the per-mode block of the linear right-hand side") {
  const auto ops = vmbtest::operators(3);
  const SpectralGrid grid(1, 4);
  const KineticSolver ks(ops, grid, linear_options(0.5));
  KineticState about = ks.zero_state();
  about.B.col(0) << 0.3, -0.1, 0.2;
  const Eigen::MatrixXcd A = generator(ks, about);
  const int n2 = 2 * ops->size(), M = grid.size();
  for (int m = 0; m < M; ++m) {
    std::vector<int> idx;
    for (int i = 0; i < n2; ++i) idx.push_back(m * n2 + i);
    for (int a = 0; a < 3; ++a) idx.push_back(n2 * M + 3 * m + a);
    for (int a = 0; a < 3; ++a) idx.push_back(n2 * M + 3 * M + 3 * m + a);
    const Eigen::MatrixXcd block = A(idx, idx);
    const Eigen::MatrixXcd g = ks.mode_generator(m, about.B.col(0).real());
    CHECK((block - g).norm() < 1e-12 * g.norm());
  }
}

TEST_CASE("slow spectrum carries the limit rates") {
  const auto ops = vmbtest::operators(4);
  const SpectralGrid grid(1, 8);
  const MuKappa mk = compute_mu_kappa(*ops);
  const FluidCoefficients lc = limit_coefficients(mk.mu, mk.kappa, compute_sigma_lambda(*ops).sigma);
  const KineticSolver ks(ops, grid, linear_options(0.0625));
  const Eigen::VectorXcd lam = ks.mode_generator(1, Eigen::Vector3d::Zero()).eigenvalues();
  std::vector<double> mag(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) mag[i] = std::abs(lam(i));
  std::sort(mag.begin(), mag.end());
  // k = 1: two constraint modes, then the two shear modes
  CHECK(mag[0] < 1e-10);
  CHECK(mag[1] < 1e-10);
  CHECK(mag[2] == Approx(lc.mu).epsilon(1e-3));
  CHECK(mag[3] == Approx(lc.mu).epsilon(1e-3));
  CHECK(mag[KineticSolver::slow_count] > 10.0 * mag[KineticSolver::slow_count - 1]);
}

TEST_CASE("slow projection removes the fast time scales") {
  const auto ops = vmbtest::operators(4);
  const SpectralGrid grid(1, 8);
  SeedSpec seed;
  seed.amplitude = 0.01;
  const FluidFields f = make_seed(grid, seed);
  auto rate = [&](const KineticSolver& ks, const KineticState& s) {
    KineticState d = s;
    ks.full_rhs(s, d.G, d.E, d.B);
    return pack(d).norm() / pack(s).norm();
  };
  std::vector<double> slow_rate, hydro_rate, shift;
  for (double eps : {0.125, 0.0625}) {
    KineticOptions o = linear_options(eps);
    const KineticSolver slow(ops, grid, o);
    o.preparation = Preparation::Hydrodynamic;
    const KineticSolver hydro(ops, grid, o);
    const KineticState a = slow.init_well_prepared(f), b = hydro.init_well_prepared(f);
    CHECK(slow.warnings().empty());
    slow_rate.push_back(rate(slow, a));
    hydro_rate.push_back(rate(hydro, b));
    shift.push_back((pack(a) - pack(b)).norm() / pack(b).norm());
    KineticState again = a;
    CHECK(slow.project_slow(again) == 0);
    CHECK((pack(again) - pack(a)).norm() < 1e-10 * pack(a).norm());
  }
  CHECK(slow_rate[1] == Approx(slow_rate[0]).epsilon(0.05));
  CHECK(slow_rate[0] < 3.0);
  CHECK(hydro_rate[1] > 1.8 * hydro_rate[0]);
  CHECK(shift[1] == Approx(0.5 * shift[0]).epsilon(0.1));
}

TEST_CASE("large data triggers the smallness warning") {
  const auto ops = vmbtest::operators(3);
  const SpectralGrid grid(1, 8);
  KineticOptions o;
  o.smallness = 1e-3;
  const KineticSolver ks(ops, grid, o);
  SeedSpec seed;
  seed.amplitude = 0.5;
  ks.init_well_prepared(make_seed(grid, seed));
  CHECK(ks.warnings().size() == 1);
}

TEST_CASE("nonlinear run conserves the global integrals and constraints") {
  const auto ops = vmbtest::operators(4);
  const SpectralGrid grid(1, 16);
  KineticOptions o;
  o.eps = 0.25;
  const KineticSolver ks(ops, grid, o);
  SeedSpec seed;
  seed.amplitude = 0.05;
  seed.mean_b = Eigen::Vector3d(0.1, 0.0, 0.2);
  KineticState s = ks.init_well_prepared(make_seed(grid, seed));
  const KineticState s0 = s;
  const Diagnostics d(ops, grid, compute_mu_kappa(*ops), compute_sigma_lambda(*ops).sigma);
  const double e0 = d.energy_functional(s, 0);
  for (int i = 0; i < 100; ++i) ks.step(s, 2e-3);
  CHECK(d.global_conservation_residuals(s, s0).max() < 1e-12);
  CHECK(grid.l2_norm(grid.divergence(s.B)) < 1e-14);
  const MomentFields m = d.moments(s);
  CHECK(grid.l2_norm(grid.divergence(m.E) - m.n) < 1e-14 * (1 + grid.l2_norm(m.n)));
  CHECK(d.energy_functional(s, 0) < e0);
  for (int c = 0; c < 3; ++c) CHECK(std::abs(s.B(c, 0) - s0.B(c, 0)) < 1e-15);
}

TEST_CASE("stability limit shrinks with eps and resolution") {
  const auto ops = vmbtest::operators(3);
  const SpectralGrid coarse(1, 8), fine(1, 16);
  const KineticSolver a(ops, coarse, linear_options(0.5)), b(ops, coarse, linear_options(0.25)),
      c(ops, fine, linear_options(0.5));
  const KineticState sa = a.zero_state(), sc = c.zero_state();
  CHECK(b.max_stable_dt(sa) < a.max_stable_dt(sa));
  CHECK(c.max_stable_dt(sc) < a.max_stable_dt(sa));
}
