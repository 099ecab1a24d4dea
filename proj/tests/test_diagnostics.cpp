#include <catch_amalgamated.hpp>
#include <cmath>

#include "common.hpp"
#include "vmblab/diagnostics.hpp"
#include "vmblab/error.hpp"
#include "vmblab/kinetic.hpp"
#include "vmblab/transport.hpp"

using namespace vmb;
using Catch::Approx;

namespace {

struct Setup {
  std::shared_ptr<const CollisionOperators> ops = vmbtest::operators(4);
  SpectralGrid grid{1, 16};
  MuKappa mk = compute_mu_kappa(*ops);
  double sigma = compute_sigma_lambda(*ops).sigma;
  Diagnostics diag{ops, grid, mk, sigma};
  int n = ops->size();

  KineticState random_state(double eps, unsigned seed) const {
    std::mt19937 rng(seed);
    KineticState s;
    s.eps = eps;
    Eigen::MatrixXd Gx(2 * n, grid.size()), Ex(3, grid.size()), Bx(3, grid.size());
    for (int p = 0; p < grid.size(); ++p) {
      Gx.col(p) = 0.01 * vmbtest::random_vector(2 * n, rng);
      Ex.col(p) = 0.01 * vmbtest::random_vector(3, rng);
      Bx.col(p) = 0.01 * vmbtest::random_vector(3, rng);
    }
    s.G = grid.to_spectral(Gx);
    s.E = grid.to_spectral(Ex);
    s.B = grid.to_spectral(Bx);
    return s;
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

}  // namespace

TEST_CASE("moments agree with the pointwise extraction") {
  const Setup& S = setup();
  const KineticState s = S.random_state(0.5, 1);
  const MomentFields m = S.diag.moments(s);
  const Eigen::MatrixXd Gx = S.grid.to_physical(s.G);
  const Eigen::MatrixXd rho = S.grid.to_physical(m.rho), j = S.grid.to_physical(m.j), w = S.grid.to_physical(m.w),
                        tl = S.grid.to_physical(m.theta_limit);
  for (int p = 0; p < S.grid.size(); p += 5) {
    const FluidMoments f = extract_moments(S.ops->basis(), Gx.col(p), 0.5);
    CHECK(rho(0, p) == Approx(f.rho).margin(1e-14));
    CHECK(j(1, p) == Approx(f.j[1]).margin(1e-14));
    CHECK(w(0, p) == Approx(f.w).margin(1e-14));
    CHECK(tl(0, p) == Approx(f.theta_limit).margin(1e-14));
  }
}

TEST_CASE("zero order energy is the L2 norm of the state") {
  const Setup& S = setup();
  const KineticState s = S.random_state(0.5, 2);
  const double vol = S.grid.volume();
  auto phys2 = [&](const Eigen::MatrixXcd& f) { return vol * S.grid.to_physical(f).squaredNorm() / S.grid.size(); };
  CHECK(S.diag.energy_functional(s, 0) == Approx(phys2(s.G) + phys2(s.E) + phys2(s.B)).epsilon(1e-12));
  // first order adds x-gradients and v-derivatives
  Eigen::MatrixXcd dG = S.grid.derivative(s.G, 0), dE = S.grid.derivative(s.E, 0), dB = S.grid.derivative(s.B, 0);
  double v_part = 0;
  for (int a = 0; a < 3; ++a) {
    Exponent e{0, 0, 0};
    e[a] = 1;
    const Eigen::MatrixXd H = S.ops->basis().derivative_gram(e);
    for (int m = 0; m < S.grid.size(); ++m)
      for (int sp = 0; sp < 2; ++sp) {
        const Eigen::VectorXcd g = s.G.col(m).segment(sp * S.n, S.n);
        v_part += vol * (g.adjoint() * H * g)(0, 0).real();
      }
  }
  const double expect1 = phys2(s.G) + phys2(s.E) + phys2(s.B) + phys2(dG) + phys2(dE) + phys2(dB) + v_part;
  CHECK(S.diag.energy_functional(s, 1) == Approx(expect1).epsilon(1e-10));
  CHECK(S.diag.energy_functional(s, 2) > expect1);
  CHECK_THROWS_AS(S.diag.energy_functional(s, -1), ArgumentError);
  CHECK_THROWS_AS(S.diag.dissipation_functional(s, 9), ArgumentError);
}

TEST_CASE("micro dissipation is the nu-norm of the microscopic part over eps^2") {
  const Setup& S = setup();
  const KineticState s = S.random_state(0.25, 3);
  const KernelProjections kp(S.ops->basis());
  double expect = 0;
  for (int m = 0; m < S.grid.size(); ++m) {
    const Eigen::VectorXd re = kp.project_P_perp(s.G.col(m).real()), im = kp.project_P_perp(s.G.col(m).imag());
    expect += S.ops->apply_nu_weighted_norm(re) + S.ops->apply_nu_weighted_norm(im);
  }
  expect *= S.grid.volume() / (0.25 * 0.25);
  CHECK(S.diag.micro_dissipation(s) == Approx(expect).epsilon(1e-10));
  CHECK(S.diag.dissipation_functional(s, 0) == Approx(expect + 0.0).epsilon(1e-10));
  KineticState hydro = s;
  hydro.G = kp.P().cast<std::complex<double>>() * s.G;
  CHECK(S.diag.micro_dissipation(hydro) < 1e-12 * expect);
}

TEST_CASE("Ohm residual vanishes for a current given by Ohm's law") {
  const Setup& S = setup();
  const double eps = 0.25;
  SeedSpec seed;
  seed.profile = "efield";
  const FluidFields f = make_seed(S.grid, seed);
  KineticState s;
  s.eps = eps;
  s.E = f.E;
  s.B = Eigen::MatrixXcd::Zero(3, S.grid.size());
  s.G = Eigen::MatrixXcd::Zero(2 * S.n, S.grid.size());
  const Eigen::MatrixXd& chi = S.ops->basis().kernel_single();
  for (int a = 0; a < 3; ++a) {
    Eigen::VectorXd c(2 * S.n);
    c << chi.col(1 + a), -chi.col(1 + a);
    s.G += 0.5 * eps * S.sigma * c.cast<std::complex<double>>() * f.E.row(a);
  }
  MomentFields m = S.diag.moments(s);
  CHECK(S.diag.ohm_residual(m) < 1e-14);
  CHECK(S.diag.gauss_residual(m) < 1e-14);
  m.j *= 1.1;
  CHECK(S.diag.ohm_residual(m) == Approx(0.1 / 1.1).epsilon(1e-10));
}

TEST_CASE("Boussinesq, energy exchange and incompressibility residuals") {
  const Setup& S = setup();
  MomentFields m;
  m.eps = 0.5;
  const Eigen::MatrixXcd a = S.grid.to_spectral(S.grid.points().col(0).array().sin().matrix().transpose());
  m.rho = -a;
  m.theta = a;
  CHECK(S.diag.boussinesq_residual(m) == 0.0);
  m.rho = Eigen::MatrixXcd::Zero(1, S.grid.size());
  CHECK(S.diag.boussinesq_residual(m) == Approx(std::sqrt(M_PI)));
  m.n = a;
  m.w = energy_exchange(S.grid, m.n, m.theta);
  CHECK(S.diag.energy_equiv_residual(m) < 1e-15);
  m.u = Eigen::MatrixXcd::Zero(3, S.grid.size());
  m.u.row(0) = a;
  CHECK(S.diag.incompressibility_residual(m) == Approx(std::sqrt(M_PI)));
}

TEST_CASE("global conservation residuals") {
  const Setup& S = setup();
  const KineticState s = S.random_state(0.5, 4);
  const ConservationResiduals same = S.diag.global_conservation_residuals(s, s);
  CHECK(same.max() == 0.0);
  CHECK(same.scale > 0.0);
  KineticState t = s;
  t.G(0, 0) += 1e-3;
  CHECK(S.diag.global_conservation_residuals(t, s).mass > 0.0);
  // momentum includes the Poynting vector of the zero mode
  KineticState f = S.random_state(0.5, 5);
  f.G.setZero();
  f.E.setZero();
  f.B.setZero();
  f.E(0, 0) = 1.0;
  f.B(1, 0) = 2.0;
  const ConservationIntegrals c = S.diag.conservation_integrals(f);
  CHECK(c.momentum(2) == Approx(2.0 * S.grid.volume()));
  CHECK(c.energy == Approx(0.5 * 0.5 * S.grid.volume()));
}

TEST_CASE("local residuals are second order along a kinetic trajectory") {
  const Setup& S = setup();
  KineticOptions o;
  o.eps = 0.5;
  const KineticSolver ks(S.ops, S.grid, o);
  SeedSpec seed;
  const KineticState s0 = ks.init_well_prepared(make_seed(S.grid, seed));
  std::vector<std::array<double, 7>> r;
  for (int steps : {10, 20}) {
    const double dt = 0.04 / steps;
    std::array<double, 7> worst{};
    KineticState b = s0;
    for (int k = 0; k < steps; ++k) {
      const KineticState a = b;
      ks.step(b, dt);
      const auto res = S.diag.local_conservation_residuals(a, b);
      for (int i = 0; i < 7; ++i) worst[i] = std::max(worst[i], res[i]);
    }
    r.push_back(worst);
  }
  for (int i = 0; i < 6; ++i) {
    INFO("line " << i);
    CHECK(r[0][i] / r[1][i] == Approx(4.0).epsilon(0.3));
  }
  CHECK(r[0][6] < 1e-14);
  KineticState a = s0, b = s0;
  CHECK_THROWS_AS(S.diag.local_conservation_residuals(a, b), ArgumentError);
  b.time = 1.0;
  b.eps = 0.25;
  CHECK_THROWS_AS(S.diag.local_conservation_residuals(a, b), ArgumentError);
}

TEST_CASE("moment records") {
  const Setup& S = setup();
  const KineticState s = S.random_state(0.5, 6);
  const MomentRecord r = S.diag.record(s);
  CHECK(r.finite_nonnegative());
  const std::string header = MomentRecord::csv_header(), row = r.csv_row();
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(std::count(header.begin(), header.end(), ',') == 22);
  MomentRecord bad = r;
  bad.ohm = std::nan("");
  CHECK(!bad.finite_nonnegative());
}

TEST_CASE("moment convergence of matched trajectories") {
  const Setup& S = setup();
  FluidOptions fo;
  fo.coeffs = {0.3, 0.4, S.sigma};
  const FluidSolver fs(S.grid, fo);
  const FluidState f = fs.from_seed(make_seed(S.grid, SeedSpec{}));
  MomentFields k;
  k.time = 0;
  k.u = f.u;
  k.theta_limit = f.theta;
  k.n = f.n;
  k.E = f.E;
  k.B = f.B;
  const ConvergenceReport rep = moment_convergence({k}, {f}, S.grid);
  CHECK(rep.sup.u == 0.0);
  CHECK(rep.sup.B == 0.0);
  k.n *= 2.0;
  k.time = 1.0;
  CHECK_THROWS_AS(moment_convergence({k}, {f}, S.grid), ArgumentError);
  k.time = 0.0;
  CHECK(moment_convergence({k}, {f}, S.grid).sup.n == Approx(S.grid.l2_norm(f.n)));
  CHECK_THROWS_AS(moment_convergence({k, k}, {f}, S.grid), ArgumentError);
}
