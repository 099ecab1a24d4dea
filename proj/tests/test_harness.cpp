#include <catch_amalgamated.hpp>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vmblab/harness.hpp"

using namespace vmb;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

json read_json(const std::string& path) { return json::parse(slurp(path)); }

ExperimentConfig small(const std::string& name, Mode mode = Mode::Converge) {
  ExperimentConfig c;
  c.mode = mode;
  c.order = 3;
  c.modes = 8;
  c.dt = 1e-3;
  c.t_end = 0.02;
  c.output_every = 5;
  c.eps = {0.5, 0.25};
  const fs::path p = fs::temp_directory_path() / ("vmblab_harness_" + name);
  fs::remove_all(p);
  c.out_dir = p.string();
  c.tensor_cache = (fs::temp_directory_path() / "vmblab_harness_cache").string();
  return c;
}

int run(const ExperimentConfig& c, std::string* log = nullptr) {
  std::ostringstream os;
  const int code = run_experiment(c, os);
  if (log) *log = os.str();
  return code;
}

}  // namespace

TEST_CASE("output cadence and comparison window") {
  CHECK(is_output_step(10, 1000, 5));
  CHECK(!is_output_step(11, 1000, 5));
  CHECK(is_output_step(1000, 1000, 7));
  ExperimentConfig c;
  c.t_end = 1.0;
  c.window = 0.5;
  CHECK(in_window(0.5, c));
  CHECK(in_window(1.0, c));
  CHECK(!in_window(0.49, c));
  CHECK(eps_tag(0.125) == "0.125");
}

TEST_CASE("worker pool visits every index and reports failures") {
  std::vector<std::atomic<int>> hits(17);
  parallel_for(17, 4, [&](int i) { hits[i]++; });
  for (auto& h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(5, 2, [](int i) {
                    if (i == 3) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("converge run writes the manifest and artifacts") {
  const ExperimentConfig c = small("converge");
  std::string log;
  const int code = run(c, &log);
  CHECK((code == kExitPass || code == kExitThresholds));
  const json manifest = read_json(c.out_dir + "/manifest.json");
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["mode"] == "converge");
  CHECK(manifest["config"].get<std::string>() == c.render());
  CHECK(manifest["operators"]["basis_hash"].get<std::string>().size() == 64);
  CHECK(!manifest["defaulted"].empty());
  for (const auto& f : manifest["files"]) CHECK(fs::exists(c.out_dir + "/" + f.get<std::string>()));
  for (const char* f : {"kinetic_eps_0.5.csv", "kinetic_eps_0.25.dat", "kinetic_eps_0.25.ckpt", "fluid.csv",
                        "fluid.ckpt", "sweep.csv", "sweep.dat", "summary.json"})
    CHECK(fs::exists(c.out_dir + "/" + f));
  const json summary = read_json(c.out_dir + "/summary.json");
  CHECK(summary["sweep"].size() == 2);
  CHECK(summary["ratios"].size() == 1);
  CHECK(summary["ratios"][0].size() == 8);
  CHECK(summary["sup_ratios"].size() == 1);
  CHECK(summary["sweep"][0]["final"].size() == 8);
  CHECK(summary["sweep"][0]["sup"]["bsq"].get<double>() >= summary["sweep"][0]["final"]["bsq"].get<double>());
  const std::string sweep = slurp(c.out_dir + "/sweep.csv");
  const std::string head = sweep.substr(0, sweep.find('\n'));
  CHECK(std::count(head.begin(), head.end(), ',') == 16);
  // t = 0, 5, 10, 15, 20 steps
  const std::string csv = slurp(c.out_dir + "/kinetic_eps_0.5.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("identical configs give identical files, with or without workers") {
  ExperimentConfig a = small("repeat_a"), b = small("repeat_b");
  b.workers = 2;
  run(a);
  run(b);
  for (const char* f : {"kinetic_eps_0.5.csv", "kinetic_eps_0.25.csv", "fluid.csv", "sweep.csv",
                        "kinetic_eps_0.25.ckpt"})
    CHECK(slurp(a.out_dir + "/" + f) == slurp(b.out_dir + "/" + f));
}

TEST_CASE("a single eps is an insufficient sweep") {
  ExperimentConfig c = small("single");
  c.eps = {0.5};
  std::string log;
  CHECK(run(c, &log) == kExitThresholds);
  CHECK(log.find("insufficient sweep") != std::string::npos);
  const json summary = read_json(c.out_dir + "/summary.json");
  CHECK(summary["note"] == "insufficient sweep");
  CHECK(summary["ratios"].empty());
}

TEST_CASE("a failing sub-run is recorded and the study continues") {
  ExperimentConfig c = small("partial", Mode::SimulateKinetic);
  c.eps = {0.5, 0.001};
  CHECK(run(c) == kExitError);
  const json summary = read_json(c.out_dir + "/summary.json");
  CHECK(summary["status"] == "partial");
  CHECK(summary["kinetic"][0]["ok"] == true);
  CHECK(summary["kinetic"][1]["ok"] == false);
  CHECK(summary["kinetic"][1]["error"].get<std::string>().find("stability") != std::string::npos);
  CHECK(fs::exists(c.out_dir + "/kinetic_eps_0.5.ckpt"));
}

TEST_CASE("fluid-only run with given coefficients") {
  ExperimentConfig c = small("fluid", Mode::SimulateFluid);
  c.mu = 0.3;
  c.kappa = 0.4;
  c.sigma = 0.6;
  CHECK(run(c) == kExitPass);
  const json manifest = read_json(c.out_dir + "/manifest.json");
  CHECK(!manifest.contains("operators"));
  CHECK(manifest["system"] == "fluid");
  const json summary = read_json(c.out_dir + "/summary.json");
  CHECK(summary["coefficients"]["mu"] == 0.3);
  CHECK(fs::exists(c.out_dir + "/fluid.ckpt"));
}

TEST_CASE("coefficient mode reports both orders") {
  ExperimentConfig c = small("coeffs", Mode::Coeffs);
  const int code = run(c);
  CHECK((code == kExitPass || code == kExitThresholds));
  const json summary = read_json(c.out_dir + "/summary.json");
  CHECK(summary["coefficients"]["order"] == 3);
  CHECK(summary["refined"]["order"] == 4);
  CHECK(summary["limit_coefficients"]["mu"].get<double>() == summary["coefficients"]["mu"].get<double>() / 2);
  CHECK(fs::exists(c.out_dir + "/coefficients.csv"));
}

TEST_CASE("execution errors exit with code 2 and still leave a manifest") {
  ExperimentConfig c = small("bad");
  c.dt = 0.3;
  CHECK(run(c) == kExitError);
  const json manifest = read_json(c.out_dir + "/manifest.json");
  CHECK(manifest["status"] == "error");
  ExperimentConfig d = small("blocked");
  fs::create_directories(fs::path(d.out_dir).parent_path());
  std::ofstream(d.out_dir) << "a file, not a directory";
  CHECK(run(d) == kExitError);
  fs::remove(d.out_dir);
}
