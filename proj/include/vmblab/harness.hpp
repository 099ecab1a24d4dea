#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "vmblab/config.hpp"
#include "vmblab/diagnostics.hpp"
#include "vmblab/fluid.hpp"
#include "vmblab/kinetic.hpp"
#include "vmblab/transport.hpp"

namespace vmb {

constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitPass = 0, kExitThresholds = 1, kExitError = 2 };

/// Velocity basis, collision operators and transport data shared by all runs of a study.
struct OperatorBundle {
  std::shared_ptr<const VelocityBasis> basis;
  std::shared_ptr<const CollisionOperators> ops;
  MuKappa mu_kappa;
  SigmaLambda sigma_lambda;
  bool tensor_from_cache = false;
};

OperatorBundle build_operators(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Fluid coefficients: config overrides where given, otherwise the limit of the kinetic ones.
FluidCoefficients resolve_fluid_coefficients(const ExperimentConfig& cfg, const OperatorBundle* bundle);

struct KineticRun {
  double eps = 0;
  bool ok = false;
  std::string error;
  std::vector<MomentRecord> records;  // every output_every steps, local residuals from the last step pair
  std::vector<MomentFields> window;   // snapshots at output times inside the comparison window
  KineticState initial, final;
  double max_conservation_drift = 0;
  double max_gauss_drift = 0;       // max over steps of |div E - n| / (|n| + |div E| + 1e-30)
  double energy_ratio_max = 0;      // sup_t E_0(t) / E_0(0)
  double micro_dissipation_integral = 0;
  std::vector<std::string> warnings;
};

struct FluidRecord {
  double t = 0;
  double u = 0, theta = 0, n = 0, E = 0, B = 0, j = 0;
  double energy = 0, dissipation = 0, div_u = 0, div_B = 0, gauss = 0;
  static std::string csv_header();
  std::string csv_row() const;
};

struct FluidRun {
  bool ok = false;
  std::string error;
  FluidCoefficients coeffs;
  std::vector<FluidRecord> records;
  std::vector<FluidState> window;
  FluidState initial, final;
};

/// Output times are step indices that are multiples of output_every, plus the last step.
bool is_output_step(long step, long total, int every);
bool in_window(double t, const ExperimentConfig& cfg);

KineticRun run_kinetic(const OperatorBundle& bundle, const ExperimentConfig& cfg, double eps);
FluidRun run_fluid(const ExperimentConfig& cfg, const FluidCoefficients& coeffs);

/// Names of the compared quantities, in SweepRow order.
extern const std::array<const char*, 8> kSweepQuantities;  // ohm, bsq, w, u, theta, n, E, B

/// Per-eps comparison against the limit at the final common time, plus the sup over the window.
struct SweepRow {
  double eps = 0;
  std::array<double, 8> final{}, sup{};
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<std::array<double, 8>> ratios;      // rows[i + 1].final / rows[i].final
  std::vector<std::array<double, 8>> sup_ratios;  // same for the window sup
  bool sufficient = false;
  bool monotone = false;
  bool ohm_contracts = false, bsq_contracts = false;
};

SweepReport compare_sweep(const std::vector<KineticRun>& runs, const FluidRun& fluid, const Diagnostics& diag,
                          const ExperimentConfig& cfg);

/// Runs fn(i) for i in [0, count) on a pool of `workers` threads; results are written by index.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

/// Executes the configured mode, writing artifacts into cfg.out_dir. Returns an ExitCode.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

std::string eps_tag(double eps);

}  // namespace vmb
