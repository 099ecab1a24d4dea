#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vmblab/config.hpp"
#include "vmblab/error.hpp"
#include "vmblab/harness.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::string eps;
  std::string modes;
  std::string order;
  std::string dt;
  std::string t_end;
  std::vector<std::string> set;
};

void add_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "configuration file");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--eps", o.eps, "comma separated eps list");
  cmd->add_option("--modes", o.modes, "Fourier modes per axis");
  cmd->add_option("--order", o.order, "velocity basis order");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--t-end", o.t_end, "final time");
  cmd->add_option("--set", o.set, "override section.key=value")->take_all();
}

vmb::ExperimentConfig resolve(const std::string& mode, const Overrides& o) {
  std::string text;
  if (!o.config.empty()) {
    std::ifstream f(o.config);
    if (!f) throw vmb::ConfigurationError("cannot read config '" + o.config + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  vmb::ExperimentConfig cfg = vmb::parse_config(text);
  vmb::apply_setting(cfg, "mode", mode);
  auto put = [&](const std::string& key, const std::string& v) {
    if (!v.empty()) vmb::apply_setting(cfg, key, v);
  };
  put("output.dir", o.out);
  put("run.eps", o.eps);
  put("grid.modes", o.modes);
  put("basis.order", o.order);
  put("run.dt", o.dt);
  put("run.t_end", o.t_end);
  for (const auto& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw vmb::ConfigurationError("--set expects section.key=value, got '" + kv + "'");
    vmb::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  vmb::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vmblab: kinetic and fluid runs for the two-species Vlasov-Maxwell-Boltzmann system"};
  app.set_version_flag("--version", std::string(vmb::kVersion));
  app.require_subcommand(1);
  bool keys = false;
  app.add_flag("--list-keys", keys, "print the configuration keys and exit");
  Overrides o;
  const char* modes[4][2] = {{"coeffs", "transport coefficients at order K and K+1"},
                             {"simulate-kinetic", "kinetic runs over the eps list"},
                             {"simulate-fluid", "limit fluid run"},
                             {"converge", "kinetic sweep compared with the fluid limit"}};
  for (auto& m : modes) add_flags(app.add_subcommand(m[0], m[1]), o);
  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vmb::kExitError;
  }
  if (keys) {
    for (const auto& k : vmb::config_keys()) std::cout << k << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return vmb::kExitError;
  }
  const std::string mode = app.get_subcommands().front()->get_name();
  vmb::ExperimentConfig cfg;
  try {
    cfg = resolve(mode, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vmb::kExitError;
  }
  return vmb::run_experiment(cfg, std::cout);
}
