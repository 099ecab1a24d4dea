#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vmb {

enum class Mode { Coeffs, SimulateKinetic, SimulateFluid, Converge };

std::string mode_name(Mode m);

struct Thresholds {
  double conservation_drift = 1e-6;
  double gauss_drift = 1e-8;
  double energy_growth = 2.0;        // sup_t E_0(t) / E_0(0)
  double dissipation_spread = 3.0;   // max/min over eps of the time-integrated micro dissipation
  double ohm_contraction = 0.9;
  double bsq_contraction = 0.9;
  double coefficient_refinement = 0.02;
  double isotropy = 1e-6;
};

/// Resolved experiment description. Text form:
///
///   # comment
///   mode = converge
///   [grid]      dim, modes
///   [basis]     order, quadrature_nodes
///   [run]       eps (comma list), dt, t_end, output_every, splitting (strang|lie),
///               coupling (explicit|implicit), nonlinear, enforce_gauss
///   [seed]      profile, amplitude, boussinesq, mean_b (3 numbers), prepare (slow|hydro), smallness
///   [fluid]     mu, kappa, sigma (auto or a positive number)
///   [study]     workers, window
///   [thresholds] conservation_drift, gauss_drift, energy_growth, dissipation_spread,
///               ohm_contraction, bsq_contraction, coefficient_refinement, isotropy
///   [output]    dir, tensor_cache, checkpoints
struct ExperimentConfig {
  Mode mode = Mode::Converge;
  int dim = 1;
  int modes = 32;
  int order = 4;
  int quadrature_nodes = 20;
  std::vector<double> eps{0.5, 0.25, 0.125};
  double dt = 1e-3;
  double t_end = 1.0;
  int output_every = 50;
  std::string splitting = "strang";
  std::string coupling = "explicit";
  bool nonlinear = true;
  bool enforce_gauss = true;
  std::string profile = "wave";
  double amplitude = 1e-2;
  bool boussinesq = true;
  Eigen::Vector3d mean_b = Eigen::Vector3d::Zero();
  std::string prepare = "slow";
  double smallness = 0.1;
  std::optional<double> mu, kappa, sigma;
  int workers = 1;
  double window = 0.5;  // comparisons use sup over [(1 - window) t_end, t_end]
  Thresholds thresholds;
  std::string out_dir = "out";
  std::string tensor_cache;
  bool checkpoints = true;

  std::set<std::string> explicit_keys;  // section.key entries that were given

  /// Every key in canonical form; parse_config(render()) reproduces the config.
  std::string render() const;
  std::vector<std::string> defaulted_keys() const;
};

/// Throws ParseError (with 1-based line) on syntax errors, unknown keys and bad values.
ExperimentConfig parse_config(std::string_view text);

/// Applies one "section.key" = value assignment (used for command-line overrides).
/// Throws ConfigurationError.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Cross-field checks; throws ConfigurationError.
void validate(const ExperimentConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace vmb
