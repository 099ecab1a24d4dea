#include "vmblab/fields.hpp"

#include <algorithm>
#include <cmath>

#include "vmblab/error.hpp"

namespace vmb {

FluidFields FluidFields::zeros(const SpectralGrid& grid) {
  const int m = grid.size();
  FluidFields f;
  f.rho = Eigen::MatrixXcd::Zero(1, m);
  f.theta = Eigen::MatrixXcd::Zero(1, m);
  f.n = Eigen::MatrixXcd::Zero(1, m);
  f.u = Eigen::MatrixXcd::Zero(3, m);
  f.E = Eigen::MatrixXcd::Zero(3, m);
  f.B = Eigen::MatrixXcd::Zero(3, m);
  return f;
}

const std::vector<std::string>& seed_profiles() {
  static const std::vector<std::string> p{"wave", "shear", "efield", "charge", "zero"};
  return p;
}

Eigen::MatrixXcd gauss_consistent_E(const SpectralGrid& grid, const Eigen::MatrixXcd& E, const Eigen::MatrixXcd& n) {
  Eigen::MatrixXcd out = grid.leray(E);
  const std::complex<double> I(0.0, 1.0);
  for (int m = 0; m < grid.size(); ++m) {
    const double k2 = grid.k_squared()(m);
    if (k2 == 0.0) continue;
    for (int a = 0; a < 3; ++a) out(a, m) += -I * grid.wavenumbers()(m, a) * n(0, m) / k2;
  }
  return out;
}

FluidFields make_seed(const SpectralGrid& grid, const SeedSpec& spec) {
  const auto& names = seed_profiles();
  if (std::find(names.begin(), names.end(), spec.profile) == names.end())
    throw ArgumentError("unknown seed profile '" + spec.profile + "'");
  const double a = spec.amplitude;
  const Eigen::MatrixXd x = grid.points();
  const int m = grid.size();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(1, m), theta = rho, n = rho;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(3, m), E = u, B = u;
  const bool d2 = grid.dim() >= 2, d3 = grid.dim() >= 3;
  for (int p = 0; p < m; ++p) {
    const double X = x(p, 0), Y = x(p, 1), Z = x(p, 2);
    if (spec.profile == "wave") {
      u(0, p) = d2 ? 0.5 * std::sin(Y) : 0.0;
      u(1, p) = std::sin(X) + (d3 ? 0.3 * std::cos(Z) : 0.0);
      u(2, p) = 0.5 * std::cos(X) + (d2 ? 0.4 * std::sin(Y) : 0.0);
      theta(0, p) = std::cos(X) + (d2 ? 0.3 * std::sin(Y) : 0.0);
      rho(0, p) = spec.boussinesq ? -theta(0, p) : 0.5 * std::sin(X);
      n(0, p) = 0.5 * std::sin(X) + (d2 ? 0.2 * std::cos(Y) : 0.0);
      E(1, p) = 0.3 * std::cos(X);
      E(2, p) = 0.4 * std::sin(X);
      B(1, p) = 0.5 * std::cos(X);
      B(2, p) = -0.3 * std::sin(X) + (d2 ? 0.2 * std::cos(Y) : 0.0);
    } else if (spec.profile == "shear") {
      u(1, p) = std::sin(X);
    } else if (spec.profile == "efield") {
      E(1, p) = std::sin(X);
    } else if (spec.profile == "charge") {
      n(0, p) = std::cos(X);
    }
  }
  FluidFields f;
  f.rho = grid.to_spectral(a * rho);
  f.theta = grid.to_spectral(a * theta);
  f.n = grid.to_spectral(a * n);
  f.u = grid.leray(grid.to_spectral(a * u));
  f.E = grid.to_spectral(a * E);
  f.B = grid.leray(grid.to_spectral(a * B));
  for (Eigen::MatrixXcd* fld : {&f.rho, &f.theta, &f.n, &f.u, &f.E, &f.B}) grid.dealias(*fld);
  // neutral plasma: zero mean charge; E set consistent with n
  f.n(0, 0) = 0.0;
  f.E = gauss_consistent_E(grid, f.E, f.n);
  for (int c = 0; c < 3; ++c) f.B(c, 0) = spec.mean_b(c);
  return f;
}

}  // namespace vmb
