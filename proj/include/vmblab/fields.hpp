#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vmblab/spectral_grid.hpp"

namespace vmb {

/// Macroscopic fields in spectral form; scalars are 1 x size(), vectors 3 x size().
struct FluidFields {
  Eigen::MatrixXcd rho, u, theta, n, E, B;
  static FluidFields zeros(const SpectralGrid& grid);
};

/// Named analytic initial profiles.
///   wave    all fields excited at the lowest wavenumbers
///   shear   u = a (0, sin x, 0) only
///   efield  E = a (0, sin x, 0) only
///   charge  n = a cos x with its longitudinal E
///   zero    nothing
struct SeedSpec {
  std::string profile = "wave";
  double amplitude = 1e-2;
  bool boussinesq = true;  // rho = -theta
  Eigen::Vector3d mean_b = Eigen::Vector3d::Zero();
};

const std::vector<std::string>& seed_profiles();

/// Band-limited seed; u and B divergence-free, E longitudinal part consistent with n.
FluidFields make_seed(const SpectralGrid& grid, const SeedSpec& spec);

/// Longitudinal E from n: i k . E_k = n_k for k != 0, transverse part kept.
Eigen::MatrixXcd gauss_consistent_E(const SpectralGrid& grid, const Eigen::MatrixXcd& E, const Eigen::MatrixXcd& n);

}  // namespace vmb
