#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "vmblab/collision.hpp"
#include "vmblab/fluid.hpp"
#include "vmblab/kinetic.hpp"
#include "vmblab/projections.hpp"
#include "vmblab/spectral_grid.hpp"
#include "vmblab/transport.hpp"

namespace vmb {

/// Moments of a kinetic state as spectral fields (j and w include the 1/eps).
struct MomentFields {
  double time = 0, eps = 1;
  Eigen::MatrixXcd rho, theta, n, w, theta_limit;  // 1 x modes
  Eigen::MatrixXcd u, j, E, B;                     // 3 x modes
};

struct ConservationIntegrals {
  double mass_plus = 0, mass_minus = 0;
  Eigen::Vector3d momentum = Eigen::Vector3d::Zero();  // with the Poynting part
  double energy = 0;                                    // with the field part
};

/// Drift of the three conserved lines against a reference, divided by scale().
struct ConservationResiduals {
  double mass = 0, momentum = 0, energy = 0;
  double scale = 0;
  double max() const { return std::max({mass, momentum, energy}); }
};

struct MomentRecord {
  double t = 0, eps = 0;
  double rho = 0, u = 0, theta = 0, n = 0, j = 0, w = 0;
  double ohm = 0, boussinesq = 0, energy_equiv = 0, incompressibility = 0, gauss = 0;
  std::array<double, 7> local{};
  double energy = 0, dissipation = 0, micro_dissipation = 0;

  static std::string csv_header();
  std::string csv_row() const;
  bool finite_nonnegative() const;
};

struct EnergyReport {
  int s = 0;
  double energy = 0, dissipation = 0;
};

/// Errors between kinetic moments and the limit fields at one time.
struct ConvergenceSample {
  double t = 0;
  double u = 0, theta = 0, n = 0, E = 0, B = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceSample> samples;
  ConvergenceSample sup;  // sup over t of each entry
};

/// Functionals and residuals of kinetic snapshots. Holds the velocity-space data they need.
class Diagnostics {
 public:
  Diagnostics(std::shared_ptr<const CollisionOperators> ops, const SpectralGrid& grid, const MuKappa& mk, double sigma);

  const SpectralGrid& grid() const { return grid_; }
  double sigma() const { return sigma_; }

  MomentFields moments(const KineticState& s) const;

  /// Sobolev-type functionals with |k|^{2j} weights in x and Gram matrices of v-derivatives.
  /// Velocity derivative order is capped at basis order - 1; dissipation terms of negative
  /// order are dropped.
  double energy_functional(const KineticState& s, int order) const;
  double dissipation_functional(const KineticState& s, int order) const;
  /// (1/eps^2) |P_perp G|^2_nu
  double micro_dissipation(const KineticState& s) const;

  ConservationIntegrals conservation_integrals(const KineticState& s, bool linearized = false) const;
  ConservationResiduals global_conservation_residuals(const KineticState& s, const KineticState& reference,
                                                     bool linearized = false) const;

  /// Seven local identities: rho, u, theta, n, Ampere, Faraday, and the two constraints.
  /// Time derivatives by differencing the pair, other terms averaged over it.
  std::array<double, 7> local_conservation_residuals(const KineticState& a, const KineticState& b) const;

  double ohm_residual(const MomentFields& m) const;
  double boussinesq_residual(const MomentFields& m) const;
  double energy_equiv_residual(const MomentFields& m) const;
  double incompressibility_residual(const MomentFields& m) const;
  double gauss_residual(const MomentFields& m) const;

  /// Everything except the local residuals (which need a pair of snapshots).
  MomentRecord record(const KineticState& s) const;

 private:
  std::array<Eigen::MatrixXcd, 6> identity_terms(const KineticState& s, const MomentFields& m) const;

  std::shared_ptr<const CollisionOperators> ops_;
  SpectralGrid grid_;
  double sigma_;
  KernelProjections proj_;
  Eigen::MatrixXd moment_rows_;  // 2N x rows
  Eigen::MatrixXd flux_A_;       // N x 9, column 3a+b gives <A_hat_ab, L g>
  Eigen::MatrixXd flux_B_;       // N x 3
  std::vector<Eigen::MatrixXd> velocity_gram_;   // sum over |beta| = j
  std::vector<Eigen::MatrixXd> velocity_gram_nu_;
};

/// Kinetic-vs-fluid comparison; times must agree.
ConvergenceReport moment_convergence(const std::vector<MomentFields>& kinetic, const std::vector<FluidState>& fluid,
                                     const SpectralGrid& grid);

}  // namespace vmb
