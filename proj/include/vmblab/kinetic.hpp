#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vmblab/collision.hpp"
#include "vmblab/fields.hpp"
#include "vmblab/spectral_grid.hpp"

namespace vmb {

/// Spectral two-species perturbation and electromagnetic fields.
struct KineticState {
  double time = 0;
  double eps = 1;
  Eigen::MatrixXcd G;  // 2N x modes
  Eigen::MatrixXcd E;  // 3 x modes
  Eigen::MatrixXcd B;  // 3 x modes
  bool finite() const;
};

enum class Splitting { Strang, Lie };
enum class CurrentCoupling { Explicit, Implicit };
enum class Preparation { Hydrodynamic, SlowManifold };

struct KineticOptions {
  double eps = 0.5;
  Splitting splitting = Splitting::Strang;
  CurrentCoupling coupling = CurrentCoupling::Explicit;
  bool nonlinear = true;       // false keeps only terms linear about (0, 0, mean B)
  bool enforce_gauss = true;   // reset longitudinal E from n and project B after every step
  double cfl_limit = 2.8;      // RK4 stability along the imaginary axis
  double smallness = 1e-1;     // warn when sqrt(E_0) of the initial data exceeds this
  Preparation preparation = Preparation::SlowManifold;
};

/// Time integrator for the perturbed two-species system.
/// Collisions (and optionally the current coupling) are advanced exactly by a cached
/// matrix exponential; everything else by explicit RK4 in spectral space.
class KineticSolver {
 public:
  KineticSolver(std::shared_ptr<const CollisionOperators> ops, const SpectralGrid& grid, const KineticOptions& opt);

  const SpectralGrid& grid() const { return grid_; }
  const VelocityBasis& basis() const { return ops_->basis(); }
  const CollisionOperators& operators() const { return *ops_; }
  const KineticOptions& options() const { return opt_; }
  double eps() const { return opt_.eps; }

  KineticState zero_state() const;
  /// Hydrodynamic profile built from the seed, optionally projected onto the slow
  /// subspace, followed by enforce_constraints.
  KineticState init_well_prepared(const FluidFields& seed) const;
  /// Linearized generator of one Fourier mode about the mean field, on (G, E, B).
  Eigen::MatrixXcd mode_generator(int m, const Eigen::Vector3d& mean_b) const;
  /// Drops the fast eigencomponents (acoustic, collisional) of each nonzero mode whose
  /// spectrum shows a gap above the slow_count smallest eigenvalues.
  /// Returns the number of modes left as they were for lack of a gap.
  int project_slow(KineticState& s) const;
  static constexpr int slow_count = 10;
  /// Gauss law for E, div B = 0 keeping the mean, and zero-mode shifts so the global
  /// integrals take their equilibrium values (all zero).
  void enforce_constraints(KineticState& s) const;
  void enforce_gauss(KineticState& s) const;

  /// One step; throws ArgumentError if dt violates the explicit stability limit and
  /// IntegrationError on non-finite values.
  void step(KineticState& s, double dt) const;
  double max_stable_dt(const KineticState& s) const;

  /// Time derivative of the explicit part (for diagnostics and tests).
  void explicit_rhs(const KineticState& s, Eigen::MatrixXcd& dG, Eigen::MatrixXcd& dE, Eigen::MatrixXcd& dB) const;
  /// Full right-hand side including collisions and current, as d/dt of (G, E, B).
  void full_rhs(const KineticState& s, Eigen::MatrixXcd& dG, Eigen::MatrixXcd& dE, Eigen::MatrixXcd& dB) const;

  /// Coefficient vectors of q1 v_a sqrt(M), 2N x 3.
  const Eigen::MatrixXd& current_functionals() const { return C1_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void collide(KineticState& s, double h) const;
  const Eigen::MatrixXd& propagator(double h) const;

  std::shared_ptr<const CollisionOperators> ops_;
  SpectralGrid grid_;
  KineticOptions opt_;
  int n_;
  std::array<Eigen::MatrixXd, 3> V_, W_, R_;
  Eigen::MatrixXd C1_;
  Eigen::MatrixXd L_evecs_;
  Eigen::VectorXd L_evals_;
  Eigen::MatrixXd stiff_;  // implicit-coupling generator, (2N + 3) square
  double vmax_ = 0, rmax_ = 0;
  mutable std::map<double, Eigen::MatrixXd> propagators_;
  mutable std::vector<std::string> warnings_;
};

}  // namespace vmb
