#include "vmblab/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>

#include "vmblab/checkpoint.hpp"
#include "vmblab/error.hpp"

namespace vmb {

using nlohmann::json;

namespace {

constexpr double kFloor = 1e-30;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join_row(const std::vector<double>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += num(v[i]);
  }
  return out;
}

/// Text files are written atomically and recorded for the manifest.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  std::string path(const std::string& name) const { return dir_ + "/" + name; }

  void text(const std::string& name, const std::string& content) {
    const std::string p = path(name), tmp = p + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << content;
      if (!f) throw IntegrationError("cannot write '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, p, ec);
    if (ec) throw IntegrationError("cannot move '" + tmp + "' into place: " + ec.message());
    add(name);
  }

  void add(const std::string& name) {
    std::lock_guard<std::mutex> lock(mutex_);
    files_.push_back(name);
  }

  std::vector<std::string> files() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return files_;
  }

 private:
  std::string dir_;
  mutable std::mutex mutex_;
  std::vector<std::string> files_;
};

// csv_header "a,b,c" -> gnuplot header "# a b c", rows with spaces
std::string gnuplot(const std::string& header, const std::vector<std::string>& rows) {
  std::string out = "# " + header + "\n";
  for (char& c : out)
    if (c == ',') c = ' ';
  for (std::string r : rows) {
    for (char& c : r)
      if (c == ',') c = ' ';
    out += r + "\n";
  }
  return out;
}

struct Check {
  std::string name;
  double value;
  double limit;
  bool pass;
};

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks) a.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
  return a;
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

Check upper(const std::string& name, double value, double limit) { return {name, value, limit, value <= limit}; }

json coefficients_json(const CoefficientReport& r) {
  json j{{"order", r.order},
         {"mu", r.mu},
         {"kappa", r.kappa},
         {"sigma", r.sigma},
         {"lambda", r.lambda},
         {"sigma_weighted", r.sigma_weighted},
         {"mu_pointwise", r.mu_pointwise},
         {"kappa_pointwise", r.kappa_pointwise},
         {"max_residual", r.max_residual},
         {"kernel_defect", r.kernel_defect},
         {"isotropy_defect", r.isotropy_defect},
         {"offdiag_spread", r.offdiag_spread},
         {"radial_defect", r.radial_defect}};
  if (r.refinement_delta) j["refinement_delta"] = *r.refinement_delta;
  return j;
}

KineticOptions kinetic_options(const ExperimentConfig& cfg, double eps) {
  KineticOptions o;
  o.eps = eps;
  o.splitting = cfg.splitting == "lie" ? Splitting::Lie : Splitting::Strang;
  o.coupling = cfg.coupling == "implicit" ? CurrentCoupling::Implicit : CurrentCoupling::Explicit;
  o.nonlinear = cfg.nonlinear;
  o.enforce_gauss = cfg.enforce_gauss;
  o.smallness = cfg.smallness;
  o.preparation = cfg.prepare == "hydro" ? Preparation::Hydrodynamic : Preparation::SlowManifold;
  return o;
}

SeedSpec seed_spec(const ExperimentConfig& cfg) {
  SeedSpec s;
  s.profile = cfg.profile;
  s.amplitude = cfg.amplitude;
  s.boussinesq = cfg.boussinesq;
  s.mean_b = cfg.mean_b;
  return s;
}

long total_steps(const ExperimentConfig& cfg) { return std::lround(cfg.t_end / cfg.dt); }

double gauss_drift(const SpectralGrid& grid, const MomentFields& m) {
  const double d = grid.l2_norm(grid.divergence(m.E) - m.n);
  return d / (grid.l2_norm(m.n) + grid.l2_norm(grid.divergence(m.E)) + kFloor);
}

}  // namespace

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", eps);
  return buf;
}

std::string FluidRecord::csv_header() { return "t,u,theta,n,E,B,j,energy,dissipation,div_u,div_B,gauss"; }

std::string FluidRecord::csv_row() const {
  return join_row({t, u, theta, n, E, B, j, energy, dissipation, div_u, div_B, gauss}, ',');
}

bool is_output_step(long step, long total, int every) { return step % every == 0 || step == total; }

bool in_window(double t, const ExperimentConfig& cfg) {
  return t >= (1.0 - cfg.window) * cfg.t_end - 1e-9 * std::max(1.0, cfg.t_end);
}

OperatorBundle build_operators(const ExperimentConfig& cfg, std::ostream* log) {
  OperatorBundle b;
  auto basis = std::make_shared<const VelocityBasis>(cfg.order, QuadratureSpec{cfg.quadrature_nodes});
  const CollisionQuadratureSpec spec = resolve_collision_quadrature(cfg.order, {});
  const std::string spec_string = CollisionOperators::spec_string_for(*basis, spec);
  Eigen::MatrixXd tensor;
  if (!cfg.tensor_cache.empty() && load_cached_tensor(cfg.tensor_cache, spec_string, tensor)) {
    b.ops = std::make_shared<const CollisionOperators>(basis, spec, std::move(tensor));
    b.tensor_from_cache = true;
  } else {
    b.ops = std::make_shared<const CollisionOperators>(basis, spec);
    if (!cfg.tensor_cache.empty()) store_cached_tensor(cfg.tensor_cache, spec_string, b.ops->gamma_tensor());
  }
  b.basis = basis;
  if (log) *log << "operators: " << b.ops->spec_string() << (b.tensor_from_cache ? " (cached)" : "") << "\n";
  b.mu_kappa = compute_mu_kappa(*b.ops);
  b.sigma_lambda = compute_sigma_lambda(*b.ops);
  return b;
}

FluidCoefficients resolve_fluid_coefficients(const ExperimentConfig& cfg, const OperatorBundle* bundle) {
  FluidCoefficients c;
  if (bundle)
    c = limit_coefficients(bundle->mu_kappa.mu, bundle->mu_kappa.kappa, bundle->sigma_lambda.sigma);
  else if (!(cfg.mu && cfg.kappa && cfg.sigma))
    throw ConfigurationError("fluid coefficients need the kinetic operators unless mu, kappa and sigma are all given");
  if (cfg.mu) c.mu = *cfg.mu;
  if (cfg.kappa) c.kappa = *cfg.kappa;
  if (cfg.sigma) c.sigma = *cfg.sigma;
  return c;
}

KineticRun run_kinetic(const OperatorBundle& bundle, const ExperimentConfig& cfg, double eps) {
  KineticRun r;
  r.eps = eps;
  try {
    const SpectralGrid grid(cfg.dim, cfg.modes);
    const KineticSolver ks(bundle.ops, grid, kinetic_options(cfg, eps));
    const Diagnostics diag(bundle.ops, grid, bundle.mu_kappa, bundle.sigma_lambda.sigma);
    KineticState s = ks.init_well_prepared(make_seed(grid, seed_spec(cfg)));
    r.warnings = ks.warnings();
    r.initial = s;
    const long total = total_steps(cfg);
    const bool linear = !cfg.nonlinear;
    const double e0 = diag.energy_functional(s, 0);
    r.energy_ratio_max = 1.0;
    r.records.push_back(diag.record(s));
    if (in_window(s.time, cfg)) r.window.push_back(diag.moments(s));
    r.max_gauss_drift = gauss_drift(grid, diag.moments(s));
    double dprev = diag.micro_dissipation(s);
    KineticState prev;
    for (long step = 1; step <= total; ++step) {
      const bool out = is_output_step(step, total, cfg.output_every);
      if (out) prev = s;
      ks.step(s, cfg.dt);
      s.time = step * cfg.dt;
      r.max_conservation_drift =
          std::max(r.max_conservation_drift, diag.global_conservation_residuals(s, r.initial, linear).max());
      const MomentFields m = diag.moments(s);
      r.max_gauss_drift = std::max(r.max_gauss_drift, gauss_drift(grid, m));
      if (e0 > 0.0) r.energy_ratio_max = std::max(r.energy_ratio_max, diag.energy_functional(s, 0) / e0);
      const double d = diag.micro_dissipation(s);
      r.micro_dissipation_integral += 0.5 * cfg.dt * (d + dprev);
      dprev = d;
      if (out) {
        MomentRecord rec = diag.record(s);
        rec.local = diag.local_conservation_residuals(prev, s);
        r.records.push_back(rec);
        if (in_window(s.time, cfg)) r.window.push_back(m);
      }
    }
    r.final = s;
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

FluidRun run_fluid(const ExperimentConfig& cfg, const FluidCoefficients& coeffs) {
  FluidRun r;
  r.coeffs = coeffs;
  try {
    const SpectralGrid grid(cfg.dim, cfg.modes);
    FluidOptions opt;
    opt.coeffs = coeffs;
    opt.nonlinear = cfg.nonlinear;
    const FluidSolver fs(grid, opt);
    FluidState s = fs.from_seed(make_seed(grid, seed_spec(cfg)));
    r.initial = s;
    auto record = [&](const FluidState& st) {
      FluidRecord q;
      q.t = st.time;
      q.u = grid.l2_norm(st.u);
      q.theta = grid.l2_norm(st.theta);
      q.n = grid.l2_norm(st.n);
      q.E = grid.l2_norm(st.E);
      q.B = grid.l2_norm(st.B);
      q.j = grid.l2_norm(fs.current(st));
      q.energy = fs.energy(st);
      q.dissipation = fs.dissipation(st);
      q.div_u = grid.l2_norm(grid.divergence(st.u));
      q.div_B = grid.l2_norm(grid.divergence(st.B));
      q.gauss = grid.l2_norm(grid.divergence(st.E) - st.n);
      return q;
    };
    r.records.push_back(record(s));
    if (in_window(s.time, cfg)) r.window.push_back(s);
    const long total = total_steps(cfg);
    for (long step = 1; step <= total; ++step) {
      fs.step(s, cfg.dt);
      s.time = step * cfg.dt;
      if (is_output_step(step, total, cfg.output_every)) {
        r.records.push_back(record(s));
        if (in_window(s.time, cfg)) r.window.push_back(s);
      }
    }
    r.final = s;
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

const std::array<const char*, 8> kSweepQuantities{"ohm", "bsq", "w", "u", "theta", "n", "E", "B"};

SweepReport compare_sweep(const std::vector<KineticRun>& runs, const FluidRun& fluid, const Diagnostics& diag,
                          const ExperimentConfig& cfg) {
  SweepReport rep;
  for (const auto& run : runs) {
    if (!run.ok || run.window.empty()) continue;
    SweepRow row;
    row.eps = run.eps;
    for (const auto& m : run.window) {
      row.sup[0] = std::max(row.sup[0], diag.ohm_residual(m));
      row.sup[1] = std::max(row.sup[1], diag.boussinesq_residual(m));
      row.sup[2] = std::max(row.sup[2], diag.energy_equiv_residual(m));
    }
    const MomentFields& last = run.window.back();
    row.final[0] = diag.ohm_residual(last);
    row.final[1] = diag.boussinesq_residual(last);
    row.final[2] = diag.energy_equiv_residual(last);
    const ConvergenceReport c = moment_convergence(run.window, fluid.window, diag.grid());
    row.sup[3] = c.sup.u;
    row.sup[4] = c.sup.theta;
    row.sup[5] = c.sup.n;
    row.sup[6] = c.sup.E;
    row.sup[7] = c.sup.B;
    const ConvergenceReport f = moment_convergence({last}, {fluid.window.back()}, diag.grid());
    row.final[3] = f.sup.u;
    row.final[4] = f.sup.theta;
    row.final[5] = f.sup.n;
    row.final[6] = f.sup.E;
    row.final[7] = f.sup.B;
    rep.rows.push_back(row);
  }
  rep.sufficient = rep.rows.size() >= 2;
  rep.monotone = rep.sufficient;
  rep.ohm_contracts = rep.bsq_contracts = rep.sufficient;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    const SweepRow &a = rep.rows[i], &b = rep.rows[i + 1];
    std::array<double, 8> ratio{}, sup_ratio{};
    for (int k = 0; k < 8; ++k) {
      ratio[k] = b.final[k] / (a.final[k] + kFloor);
      sup_ratio[k] = b.sup[k] / (a.sup[k] + kFloor);
      if (b.final[k] > a.final[k]) rep.monotone = false;
    }
    if (ratio[0] > cfg.thresholds.ohm_contraction) rep.ohm_contracts = false;
    if (ratio[1] > cfg.thresholds.bsq_contraction) rep.bsq_contracts = false;
    rep.ratios.push_back(ratio);
    rep.sup_ratios.push_back(sup_ratio);
  }
  return rep;
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  const int n = std::max(1, std::min(workers, count));
  if (n == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

json basis_json(const OperatorBundle& b) {
  return {{"basis", b.basis->spec_string()},
          {"basis_hash", b.basis->hash()},
          {"collision", b.ops->spec_string()},
          {"collision_hash", b.ops->hash()},
          {"tensor_from_cache", b.tensor_from_cache}};
}

void write_kinetic_outputs(ArtifactWriter& out, const KineticRun& run, const OperatorBundle& bundle,
                           const ExperimentConfig& cfg) {
  const std::string tag = "kinetic_eps_" + eps_tag(run.eps);
  std::string csv = MomentRecord::csv_header() + "\n";
  std::vector<std::string> rows;
  for (const auto& r : run.records) {
    rows.push_back(r.csv_row());
    csv += rows.back() + "\n";
  }
  out.text(tag + ".csv", csv);
  out.text(tag + ".dat", gnuplot(MomentRecord::csv_header(), rows));
  if (cfg.checkpoints && run.ok) {
    const SpectralGrid grid(cfg.dim, cfg.modes);
    save_checkpoint(out.path(tag + ".ckpt"), run.final, grid, *bundle.ops);
    out.add(tag + ".ckpt");
  }
}

json kinetic_json(const KineticRun& r) {
  return {{"eps", r.eps},
          {"ok", r.ok},
          {"error", r.error},
          {"warnings", r.warnings},
          {"max_conservation_drift", r.max_conservation_drift},
          {"max_gauss_drift", r.max_gauss_drift},
          {"energy_ratio_max", r.energy_ratio_max},
          {"micro_dissipation_integral", r.micro_dissipation_integral},
          {"final_time", r.ok ? r.final.time : 0.0}};
}

void kinetic_checks(const std::vector<KineticRun>& runs, const ExperimentConfig& cfg, std::vector<Check>& checks) {
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
  for (const auto& r : runs) {
    if (!r.ok) continue;
    const std::string t = "eps=" + eps_tag(r.eps) + " ";
    checks.push_back(upper(t + "conservation drift", r.max_conservation_drift, cfg.thresholds.conservation_drift));
    if (cfg.enforce_gauss) checks.push_back(upper(t + "gauss drift", r.max_gauss_drift, cfg.thresholds.gauss_drift));
    checks.push_back(upper(t + "energy growth", r.energy_ratio_max, cfg.thresholds.energy_growth));
    dmin = std::min(dmin, r.micro_dissipation_integral);
    dmax = std::max(dmax, r.micro_dissipation_integral);
  }
  if (runs.size() >= 2 && dmax > 0.0)
    checks.push_back(upper("dissipation spread", dmax / std::max(dmin, kFloor), cfg.thresholds.dissipation_spread));
}

std::vector<KineticRun> sweep_kinetic(const OperatorBundle& bundle, const ExperimentConfig& cfg, std::ostream& log) {
  std::vector<KineticRun> runs(cfg.eps.size());
  std::mutex log_mutex;
  parallel_for(static_cast<int>(cfg.eps.size()), cfg.workers, [&](int i) {
    runs[i] = run_kinetic(bundle, cfg, cfg.eps[i]);
    std::lock_guard<std::mutex> lock(log_mutex);
    log << "kinetic eps=" << eps_tag(cfg.eps[i]) << (runs[i].ok ? " done" : " FAILED: " + runs[i].error) << "\n";
    for (const auto& w : runs[i].warnings) log << "  warning: " << w << "\n";
  });
  return runs;
}

int finish(ArtifactWriter& out, json manifest, json summary, const std::vector<Check>& checks, bool failed_subrun,
           std::ostream& log) {
  summary["checks"] = checks_json(checks);
  const bool pass = all_pass(checks) && !failed_subrun && !checks.empty();
  summary["status"] = failed_subrun ? "partial" : (pass ? "pass" : "fail");
  out.text("summary.json", summary.dump(2) + "\n");
  manifest["status"] = summary["status"];
  manifest["files"] = out.files();
  out.text("manifest.json", manifest.dump(2) + "\n");
  for (const auto& c : checks)
    log << (c.pass ? "  ok   " : "  FAIL ") << c.name << ": " << num(c.value) << " (limit " << num(c.limit) << ")\n";
  if (failed_subrun) return kExitError;
  return pass ? kExitPass : kExitThresholds;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  json manifest{{"tool", "vmblab"},
                {"version", kVersion},
                {"mode", mode_name(cfg.mode)},
                {"system", cfg.mode == Mode::SimulateFluid ? "fluid" : "kinetic"},
                {"config", cfg.render()},
                {"defaulted", cfg.defaulted_keys()}};
  std::unique_ptr<ArtifactWriter> out;
  try {
    validate(cfg);
    out = std::make_unique<ArtifactWriter>(cfg.out_dir);
    std::vector<Check> checks;
    json summary{{"mode", mode_name(cfg.mode)}};

    if (cfg.mode == Mode::Coeffs) {
      const OperatorBundle b = build_operators(cfg, &log);
      ExperimentConfig finer = cfg;
      finer.order = cfg.order + 1;
      const OperatorBundle bf = build_operators(finer, &log);
      manifest["operators"] = basis_json(b);
      CoefficientReport rep = compute_transport_coefficients(*b.ops);
      const CoefficientReport refined = compute_transport_coefficients(*bf.ops);
      attach_refinement(rep, refined);
      summary["coefficients"] = coefficients_json(rep);
      summary["refined"] = coefficients_json(refined);
      const FluidCoefficients lim = limit_coefficients(rep.mu, rep.kappa, rep.sigma);
      summary["limit_coefficients"] = {{"mu", lim.mu}, {"kappa", lim.kappa}, {"sigma", lim.sigma}};
      const char* names[4] = {"mu", "kappa", "sigma", "lambda"};
      const double vals[4] = {rep.mu, rep.kappa, rep.sigma, rep.lambda};
      for (int i = 0; i < 4; ++i) {
        checks.push_back({std::string(names[i]) + " positive", vals[i], 0.0, vals[i] > 0.0});
        checks.push_back(upper(std::string(names[i]) + " refinement", (*rep.refinement_delta)[i],
                               cfg.thresholds.coefficient_refinement));
      }
      checks.push_back(upper("isotropy", rep.isotropy_defect, cfg.thresholds.isotropy));
      std::string csv = "order,mu,kappa,sigma,lambda\n";
      for (const CoefficientReport* r : {static_cast<const CoefficientReport*>(&rep), &refined})
        csv += std::to_string(r->order) + "," + join_row({r->mu, r->kappa, r->sigma, r->lambda}, ',') + "\n";
      out->text("coefficients.csv", csv);
      return finish(*out, manifest, summary, checks, false, log);
    }

    if (cfg.mode == Mode::SimulateFluid) {
      std::unique_ptr<OperatorBundle> b;
      if (!(cfg.mu && cfg.kappa && cfg.sigma)) {
        b = std::make_unique<OperatorBundle>(build_operators(cfg, &log));
        manifest["operators"] = basis_json(*b);
      }
      const FluidRun run = run_fluid(cfg, resolve_fluid_coefficients(cfg, b.get()));
      summary["coefficients"] = {{"mu", run.coeffs.mu}, {"kappa", run.coeffs.kappa}, {"sigma", run.coeffs.sigma}};
      summary["ok"] = run.ok;
      summary["error"] = run.error;
      std::string csv = FluidRecord::csv_header() + "\n";
      std::vector<std::string> rows;
      double div_u = 0, div_b = 0, gauss = 0, scale = kFloor;
      for (const auto& r : run.records) {
        rows.push_back(r.csv_row());
        csv += rows.back() + "\n";
        div_u = std::max(div_u, r.div_u);
        div_b = std::max(div_b, r.div_B);
        gauss = std::max(gauss, r.gauss);
        scale = std::max({scale, r.u, r.B, r.n});
      }
      out->text("fluid.csv", csv);
      out->text("fluid.dat", gnuplot(FluidRecord::csv_header(), rows));
      if (run.ok && cfg.checkpoints) {
        save_fluid_checkpoint(out->path("fluid.ckpt"), run.final, SpectralGrid(cfg.dim, cfg.modes));
        out->add("fluid.ckpt");
      }
      if (run.ok) {
        checks.push_back(upper("div u", div_u / scale, 1e-12));
        checks.push_back(upper("div B", div_b / scale, 1e-12));
        checks.push_back(upper("gauss", gauss, 1e-10));
      }
      if (!run.ok) log << "fluid run FAILED: " << run.error << "\n";
      return finish(*out, manifest, summary, checks, !run.ok, log);
    }

    const OperatorBundle b = build_operators(cfg, &log);
    manifest["operators"] = basis_json(b);
    const std::vector<KineticRun> runs = sweep_kinetic(b, cfg, log);
    bool failed = false;
    json kin = json::array();
    for (const auto& r : runs) {
      failed |= !r.ok;
      kin.push_back(kinetic_json(r));
      write_kinetic_outputs(*out, r, b, cfg);
    }
    summary["kinetic"] = kin;
    kinetic_checks(runs, cfg, checks);

    if (cfg.mode == Mode::Converge) {
      const FluidCoefficients fc = resolve_fluid_coefficients(cfg, &b);
      const FluidRun fluid = run_fluid(cfg, fc);
      if (!fluid.ok) throw IntegrationError("fluid reference run failed: " + fluid.error);
      summary["fluid_coefficients"] = {{"mu", fc.mu}, {"kappa", fc.kappa}, {"sigma", fc.sigma}};
      std::string fcsv = FluidRecord::csv_header() + "\n";
      for (const auto& r : fluid.records) fcsv += r.csv_row() + "\n";
      out->text("fluid.csv", fcsv);
      const SpectralGrid grid(cfg.dim, cfg.modes);
      if (cfg.checkpoints) {
        save_fluid_checkpoint(out->path("fluid.ckpt"), fluid.final, grid);
        out->add("fluid.ckpt");
      }
      const Diagnostics diag(b.ops, grid, b.mu_kappa, b.sigma_lambda.sigma);
      const SweepReport rep = compare_sweep(runs, fluid, diag, cfg);
      std::string header = "eps";
      for (const char* q : kSweepQuantities) header += std::string(",") + q;
      for (const char* q : kSweepQuantities) header += std::string(",") + q + "_sup";
      std::string csv = header + "\n";
      std::vector<std::string> rows;
      json jr = json::array();
      for (const auto& r : rep.rows) {
        std::vector<double> vals{r.eps};
        vals.insert(vals.end(), r.final.begin(), r.final.end());
        vals.insert(vals.end(), r.sup.begin(), r.sup.end());
        rows.push_back(join_row(vals, ','));
        csv += rows.back() + "\n";
        json fin, sup;
        for (int k = 0; k < 8; ++k) {
          fin[kSweepQuantities[k]] = r.final[k];
          sup[kSweepQuantities[k]] = r.sup[k];
        }
        jr.push_back({{"eps", r.eps}, {"final", fin}, {"sup", sup}});
      }
      out->text("sweep.csv", csv);
      out->text("sweep.dat", gnuplot(header, rows));
      summary["sweep"] = jr;
      summary["ratios"] = rep.ratios;
      summary["sup_ratios"] = rep.sup_ratios;
      summary["sufficient"] = rep.sufficient;
      if (!rep.sufficient) {
        summary["note"] = "insufficient sweep";
        log << "insufficient sweep: need at least two successful eps values\n";
        checks.push_back({"sweep size", static_cast<double>(rep.rows.size()), 2.0, false});
      } else {
        checks.push_back({"monotone across eps", rep.monotone ? 1.0 : 0.0, 1.0, rep.monotone});
        double ro = 0, rb = 0;
        for (const auto& r : rep.ratios) {
          ro = std::max(ro, r[0]);
          rb = std::max(rb, r[1]);
        }
        checks.push_back(upper("ohm contraction", ro, cfg.thresholds.ohm_contraction));
        checks.push_back(upper("boussinesq contraction", rb, cfg.thresholds.bsq_contraction));
      }
    }
    return finish(*out, manifest, summary, checks, failed, log);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    manifest["status"] = "error";
    manifest["error"] = e.what();
    try {
      if (!out) out = std::make_unique<ArtifactWriter>(cfg.out_dir);
      manifest["files"] = out->files();
      out->text("manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e2) {
      log << "error: manifest could not be written: " << e2.what() << "\n";
    }
    return kExitError;
  }
}

}  // namespace vmb
