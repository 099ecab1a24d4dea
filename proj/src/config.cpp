#include "vmblab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "vmblab/error.hpp"
#include "vmblab/fields.hpp"

namespace vmb {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  double x = 0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [p, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || p != last) throw ConfigurationError("'" + v + "' is not a number");
  return x;
}

int to_int(const std::string& v) {
  int x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigurationError("'" + v + "' is not an integer");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigurationError("'" + v + "' is not a boolean");
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw ConfigurationError("empty list");
  return out;
}

void range(double x, double lo, double hi, const std::string& what) {
  if (!(x >= lo && x <= hi))
    throw ConfigurationError(what + " = " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
}

void positive(double x, const std::string& what) {
  if (!(x > 0.0)) throw ConfigurationError(what + " must be positive");
}

std::optional<double> to_coeff(const std::string& v, const std::string& what) {
  if (v == "auto") return std::nullopt;
  const double x = to_double(v);
  positive(x, what);
  return x;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s{
      {"mode",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "coeffs") c.mode = Mode::Coeffs;
         else if (v == "simulate-kinetic") c.mode = Mode::SimulateKinetic;
         else if (v == "simulate-fluid") c.mode = Mode::SimulateFluid;
         else if (v == "converge") c.mode = Mode::Converge;
         else throw ConfigurationError("unknown mode '" + v + "'");
       }},
      {"grid.dim", [](ExperimentConfig& c, const std::string& v) { c.dim = to_int(v); range(c.dim, 1, 3, "grid.dim"); }},
      {"grid.modes",
       [](ExperimentConfig& c, const std::string& v) {
         c.modes = to_int(v);
         range(c.modes, 4, 256, "grid.modes");
       }},
      {"basis.order",
       [](ExperimentConfig& c, const std::string& v) {
         c.order = to_int(v);
         range(c.order, 3, 8, "basis.order");
       }},
      {"basis.quadrature_nodes",
       [](ExperimentConfig& c, const std::string& v) {
         c.quadrature_nodes = to_int(v);
         range(c.quadrature_nodes, 8, 40, "basis.quadrature_nodes");
       }},
      {"run.eps",
       [](ExperimentConfig& c, const std::string& v) {
         auto l = to_list(v);
         for (double e : l)
           if (!(e > 0.0 && e <= 1.0)) throw ConfigurationError("eps = " + fmt(e) + " outside (0, 1]");
         std::sort(l.begin(), l.end(), std::greater<>());
         if (std::adjacent_find(l.begin(), l.end()) != l.end()) throw ConfigurationError("eps list has duplicates");
         c.eps = l;
       }},
      {"run.dt", [](ExperimentConfig& c, const std::string& v) { c.dt = to_double(v); positive(c.dt, "run.dt"); }},
      {"run.t_end",
       [](ExperimentConfig& c, const std::string& v) {
         c.t_end = to_double(v);
         range(c.t_end, 0.0, 1e3, "run.t_end");
       }},
      {"run.output_every",
       [](ExperimentConfig& c, const std::string& v) {
         c.output_every = to_int(v);
         range(c.output_every, 1, 1e9, "run.output_every");
       }},
      {"run.splitting",
       [](ExperimentConfig& c, const std::string& v) {
         if (v != "strang" && v != "lie") throw ConfigurationError("splitting must be strang or lie");
         c.splitting = v;
       }},
      {"run.coupling",
       [](ExperimentConfig& c, const std::string& v) {
         if (v != "explicit" && v != "implicit") throw ConfigurationError("coupling must be explicit or implicit");
         c.coupling = v;
       }},
      {"run.nonlinear", [](ExperimentConfig& c, const std::string& v) { c.nonlinear = to_bool(v); }},
      {"run.enforce_gauss", [](ExperimentConfig& c, const std::string& v) { c.enforce_gauss = to_bool(v); }},
      {"seed.profile",
       [](ExperimentConfig& c, const std::string& v) {
         const auto& p = seed_profiles();
         if (std::find(p.begin(), p.end(), v) == p.end()) throw ConfigurationError("unknown seed profile '" + v + "'");
         c.profile = v;
       }},
      {"seed.amplitude",
       [](ExperimentConfig& c, const std::string& v) {
         c.amplitude = to_double(v);
         range(c.amplitude, 0.0, 1.0, "seed.amplitude");
       }},
      {"seed.boussinesq", [](ExperimentConfig& c, const std::string& v) { c.boussinesq = to_bool(v); }},
      {"seed.mean_b",
       [](ExperimentConfig& c, const std::string& v) {
         const auto l = to_list(v);
         if (l.size() != 3) throw ConfigurationError("seed.mean_b needs three numbers");
         c.mean_b = {l[0], l[1], l[2]};
       }},
      {"seed.prepare",
       [](ExperimentConfig& c, const std::string& v) {
         if (v != "slow" && v != "hydro") throw ConfigurationError("seed.prepare must be slow or hydro");
         c.prepare = v;
       }},
      {"seed.smallness",
       [](ExperimentConfig& c, const std::string& v) {
         c.smallness = to_double(v);
         positive(c.smallness, "seed.smallness");
       }},
      {"fluid.mu", [](ExperimentConfig& c, const std::string& v) { c.mu = to_coeff(v, "fluid.mu"); }},
      {"fluid.kappa", [](ExperimentConfig& c, const std::string& v) { c.kappa = to_coeff(v, "fluid.kappa"); }},
      {"fluid.sigma", [](ExperimentConfig& c, const std::string& v) { c.sigma = to_coeff(v, "fluid.sigma"); }},
      {"study.workers",
       [](ExperimentConfig& c, const std::string& v) {
         c.workers = to_int(v);
         range(c.workers, 1, 64, "study.workers");
       }},
      {"study.window",
       [](ExperimentConfig& c, const std::string& v) {
         c.window = to_double(v);
         range(c.window, 0.0, 1.0, "study.window");
       }},
      {"thresholds.conservation_drift",
       [](ExperimentConfig& c, const std::string& v) { c.thresholds.conservation_drift = to_double(v); }},
      {"thresholds.gauss_drift", [](ExperimentConfig& c, const std::string& v) { c.thresholds.gauss_drift = to_double(v); }},
      {"thresholds.energy_growth",
       [](ExperimentConfig& c, const std::string& v) { c.thresholds.energy_growth = to_double(v); }},
      {"thresholds.dissipation_spread",
       [](ExperimentConfig& c, const std::string& v) { c.thresholds.dissipation_spread = to_double(v); }},
      {"thresholds.ohm_contraction",
       [](ExperimentConfig& c, const std::string& v) { c.thresholds.ohm_contraction = to_double(v); }},
      {"thresholds.bsq_contraction",
       [](ExperimentConfig& c, const std::string& v) { c.thresholds.bsq_contraction = to_double(v); }},
      {"thresholds.coefficient_refinement",
       [](ExperimentConfig& c, const std::string& v) { c.thresholds.coefficient_refinement = to_double(v); }},
      {"thresholds.isotropy", [](ExperimentConfig& c, const std::string& v) { c.thresholds.isotropy = to_double(v); }},
      {"output.dir",
       [](ExperimentConfig& c, const std::string& v) {
         if (v.empty()) throw ConfigurationError("output.dir is empty");
         c.out_dir = v;
       }},
      {"output.tensor_cache", [](ExperimentConfig& c, const std::string& v) { c.tensor_cache = v; }},
      {"output.checkpoints", [](ExperimentConfig& c, const std::string& v) { c.checkpoints = to_bool(v); }},
  };
  return s;
}

}  // namespace

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Coeffs: return "coeffs";
    case Mode::SimulateKinetic: return "simulate-kinetic";
    case Mode::SimulateFluid: return "simulate-fluid";
    case Mode::Converge: return "converge";
  }
  return "?";
}

std::vector<std::string> config_keys() {
  std::vector<std::string> k;
  for (const auto& [name, _] : setters()) k.push_back(name);
  return k;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigurationError("unknown key '" + key + "'");
  it->second(cfg, value);
  cfg.explicit_keys.insert(key);
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find_first_of("#;")));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& k : config_keys()) known |= k.rfind(section + ".", 0) == 0;
      if (!known) throw ParseError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.explicit_keys.count(full)) throw ParseError(line_no, "duplicate key '" + full + "'");
    try {
      apply_setting(cfg, full, value);
    } catch (const ConfigurationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  try {
    validate(cfg);
  } catch (const ConfigurationError& e) {
    throw ParseError(line_no, e.what());
  }
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.eps.empty()) throw ConfigurationError("eps list is empty");
  if (cfg.dt > cfg.t_end && cfg.t_end > 0.0) throw ConfigurationError("run.dt exceeds run.t_end");
  const double steps = cfg.t_end / cfg.dt;
  if (cfg.t_end > 0.0 && std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps))
    throw ConfigurationError("run.t_end must be an integer multiple of run.dt");
  if (cfg.mode == Mode::SimulateKinetic || cfg.mode == Mode::Converge) {
    const long long dof = static_cast<long long>(std::pow(cfg.modes, cfg.dim));
    if (dof > 64 * 64 * 64) throw ConfigurationError("grid larger than 64^3 modes is outside the supported range");
  }
}

std::string ExperimentConfig::render() const {
  std::ostringstream os;
  auto coeff = [](const std::optional<double>& c) { return c ? fmt(*c) : std::string("auto"); };
  std::string eps_list;
  for (std::size_t i = 0; i < eps.size(); ++i) eps_list += (i ? ", " : "") + fmt(eps[i]);
  os << "mode = " << mode_name(mode) << "\n\n"
     << "[grid]\ndim = " << dim << "\nmodes = " << modes << "\n\n"
     << "[basis]\norder = " << order << "\nquadrature_nodes = " << quadrature_nodes << "\n\n"
     << "[run]\neps = " << eps_list << "\ndt = " << fmt(dt) << "\nt_end = " << fmt(t_end)
     << "\noutput_every = " << output_every << "\nsplitting = " << splitting << "\ncoupling = " << coupling
     << "\nnonlinear = " << (nonlinear ? "true" : "false") << "\nenforce_gauss = " << (enforce_gauss ? "true" : "false")
     << "\n\n"
     << "[seed]\nprofile = " << profile << "\namplitude = " << fmt(amplitude)
     << "\nboussinesq = " << (boussinesq ? "true" : "false") << "\nmean_b = " << fmt(mean_b(0)) << ", "
     << fmt(mean_b(1)) << ", " << fmt(mean_b(2)) << "\nprepare = " << prepare << "\nsmallness = " << fmt(smallness) << "\n\n"
     << "[fluid]\nmu = " << coeff(mu) << "\nkappa = " << coeff(kappa) << "\nsigma = " << coeff(sigma) << "\n\n"
     << "[study]\nworkers = " << workers << "\nwindow = " << fmt(window) << "\n\n"
     << "[thresholds]\nconservation_drift = " << fmt(thresholds.conservation_drift)
     << "\ngauss_drift = " << fmt(thresholds.gauss_drift) << "\nenergy_growth = " << fmt(thresholds.energy_growth)
     << "\ndissipation_spread = " << fmt(thresholds.dissipation_spread)
     << "\nohm_contraction = " << fmt(thresholds.ohm_contraction)
     << "\nbsq_contraction = " << fmt(thresholds.bsq_contraction)
     << "\ncoefficient_refinement = " << fmt(thresholds.coefficient_refinement)
     << "\nisotropy = " << fmt(thresholds.isotropy) << "\n\n"
     << "[output]\ndir = " << out_dir << "\ntensor_cache = " << tensor_cache
     << "\ncheckpoints = " << (checkpoints ? "true" : "false") << "\n";
  return os.str();
}

std::vector<std::string> ExperimentConfig::defaulted_keys() const {
  std::vector<std::string> out;
  for (const auto& k : config_keys())
    if (!explicit_keys.count(k)) out.push_back(k);
  return out;
}

}  // namespace vmb
