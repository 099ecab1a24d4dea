#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "vmblab/fields.hpp"
#include "vmblab/spectral_grid.hpp"

namespace vmb {

struct FluidCoefficients {
  double mu = 0, kappa = 0, sigma = 0;
};

/// Limit-system coefficients from mu, kappa, sigma as defined by the single-species inversions.
/// On species sums the two-species operator equals 2 L, so mu and kappa are halved.
FluidCoefficients limit_coefficients(double mu, double kappa, double sigma);

/// Limit state; rho is not stored (rho = -theta).
struct FluidState {
  double time = 0;
  Eigen::MatrixXcd u;      // 3 x modes, divergence-free
  Eigen::MatrixXcd theta;  // 1 x modes
  Eigen::MatrixXcd n;      // 1 x modes
  Eigen::MatrixXcd E, B;   // 3 x modes
  bool finite() const;
};

struct FluidOptions {
  FluidCoefficients coeffs;
  bool nonlinear = true;
  double cfl_limit = 1.0;
};

Eigen::MatrixXcd leray_project(const SpectralGrid& grid, const Eigen::MatrixXcd& v);

/// j = n u + sigma (-grad n / 2 + E + u x B), products dealiased.
Eigen::MatrixXcd compute_ohm_current(const SpectralGrid& grid, const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& n,
                                     const Eigen::MatrixXcd& E, const Eigen::MatrixXcd& B, double sigma);

/// w = (3/2) n theta
Eigen::MatrixXcd energy_exchange(const SpectralGrid& grid, const Eigen::MatrixXcd& n, const Eigen::MatrixXcd& theta);

/// Pointwise product of two field blocks (rows broadcast when one side has a single row).
Eigen::MatrixXcd dealiased_product(const SpectralGrid& grid, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// a x b for 3-row blocks, dealiased.
Eigen::MatrixXcd dealiased_cross(const SpectralGrid& grid, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Pseudo-spectral solver for the incompressible two-fluid Navier-Stokes-Fourier-Maxwell
/// system with Ohm's law. Strang composition of the exact per-mode linear flow
/// (viscous and thermal heat kernels, damped Maxwell with charge) with an SSP-RK3 step
/// for the remaining products.
class FluidSolver {
 public:
  FluidSolver(const SpectralGrid& grid, const FluidOptions& opt);

  const SpectralGrid& grid() const { return grid_; }
  const FluidOptions& options() const { return opt_; }

  FluidState zero_state() const;
  /// u = P u_in, theta = (3/5) theta_in - (2/5) rho_in, n, E (Gauss-consistent), B.
  FluidState from_seed(const FluidFields& seed) const;

  void step(FluidState& s, double dt) const;
  double max_stable_dt(const FluidState& s) const;

  Eigen::MatrixXcd current(const FluidState& s) const;
  Eigen::MatrixXcd rho(const FluidState& s) const { return -s.theta; }
  Eigen::MatrixXcd w(const FluidState& s) const;

  /// |u|^2 + (5/2)|theta|^2 + (1/4)|n|^2 + (1/2)(|E|^2 + |B|^2), integrated
  double energy(const FluidState& s) const;
  /// 2 mu |grad u|^2 + 5 kappa |grad theta|^2 + |j - n u|^2 / sigma, integrated
  double dissipation(const FluidState& s) const;

  /// Full time derivative, for residual checks.
  FluidState time_derivative(const FluidState& s) const;

 private:
  struct Tend {
    Eigen::MatrixXcd u, theta, n, E;
  };
  Tend nonlinear(const FluidState& s) const;
  void linear(FluidState& s, double h) const;
  const std::vector<Eigen::Matrix<std::complex<double>, 7, 7>>& maxwell_propagator(double h) const;

  SpectralGrid grid_;
  FluidOptions opt_;
  mutable std::map<double, std::vector<Eigen::Matrix<std::complex<double>, 7, 7>>> cache_;
};

}  // namespace vmb
