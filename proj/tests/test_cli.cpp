#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "fano/error.hpp"

using namespace fano;
using namespace fano::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fano_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(FANO_LAB_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const FanoError& e) {
    return e.kind();
  }
  return ErrorKind::NoBic;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-2.0) == "-2");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("spectral tables") {
  RunConfig cfg;
  cfg.out_dir = scratch("spectral");
  cfg.n0_list = {1, 2, 3, 12};
  const SpectralResult r = cmd_spectral(cfg);
  REQUIRE(r.files.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(fs::exists(r.files[i].data));
    CHECK(fs::exists(r.files[i].sidecar));
    CHECK(r.delta_sign_changes[i] == 2 * cfg.n0_list[i] - 1);
  }
  const std::string text = slurp(r.files[3].data);
  CHECK(text.rfind("# fano-lab 0.1.0\n# command: spectral\n# metadata: spectral_n0_12.meta.json\n", 0) == 0);
  CHECK(text.find("omega_over_kappa0,G_over_kappa0,Delta_over_kappa0\n") != std::string::npos);

  const auto meta = nlohmann::json::parse(slurp(r.files[3].sidecar));
  CHECK(meta["n0"] == 12);
  CHECK(meta["model"]["kappa_a"] == 0.2);

  // Same input, same bytes.
  const std::string first = slurp(r.files[0].data);
  cmd_spectral(cfg);
  CHECK(slurp(r.files[0].data) == first);

  RunConfig tiny = cfg;
  tiny.out_dir = scratch("spectral_tiny");
  tiny.n0_list = {3};
  tiny.grid = 2;
  const auto minimal = cmd_spectral(tiny);
  std::ifstream in(minimal.files[0].data);
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 3 + 1 + 2);

  tiny.grid = 1;
  CHECK(kind_of([&] { cmd_spectral(tiny); }) == ErrorKind::ConfigError);

  RunConfig json_cfg = tiny;
  json_cfg.grid = 5;
  json_cfg.format = OutputFormat::Json;
  const auto js = cmd_spectral(json_cfg);
  const auto doc = nlohmann::json::parse(slurp(js.files[0].data));
  CHECK(doc["rows"].size() == 5);
  CHECK(doc["columns"][1] == "G_over_kappa0");
}

TEST_CASE("unwritable output is an IO error") {
  const fs::path blocker = scratch("blocker");
  { std::ofstream(blocker) << "x"; }
  RunConfig cfg;
  cfg.out_dir = blocker / "sub";
  CHECK(kind_of([&] { cmd_spectral(cfg); }) == ErrorKind::IOError);
}

TEST_CASE("bound-states report") {
  RunConfig cfg;
  cfg.out_dir = scratch("bound");
  cfg.model = {1.0, 0.2, 12, 0.0};
  auto r = cmd_bound_states(cfg);
  CHECK(r.report["outside_states"].empty());
  REQUIRE(r.report["bic"].size() == 1);
  CHECK(r.report["bic"][0]["m"] == 6);
  CHECK(r.report["bic"][0]["weight"].get<double>() == doctest::Approx(1 / 1.24));
  CHECK(fs::exists(cfg.out_dir / "bound_states_report.json"));

  cfg.model.omega_a = 1.9;
  r = cmd_bound_states(cfg);
  REQUIRE(r.report["outside_states"].size() == 1);
  CHECK(r.report["outside_states"][0]["kind"] == "AboveBand");
  CHECK(r.report["outside_states"][0]["residual"].get<double>() < 1e-10);
  CHECK(r.report["bic"].empty());

  cfg.model.omega_a = 0.15;
  r = cmd_bound_states(cfg);
  CHECK(r.report["outside_states"].empty());
  CHECK(r.report["bic"].empty());
  CHECK(r.report["window"]["contains_omega_a"] == true);
}

TEST_CASE("decay runs reproduce the trapped and the diffusive case") {
  RunConfig cfg;
  cfg.out_dir = scratch("decay");
  cfg.model = {1.0, 0.2, 12, 0.0};
  cfg.absorber = true;
  cfg.sim.t_max = 200;
  const DecayResult fig5 = cmd_decay(cfg);
  CHECK(std::abs(fig5.summary.plateau.plateau_mean - 0.8065) < 0.01);
  CHECK(fig5.summary.predicted_weight == doctest::Approx(1 / 1.24));
  CHECK(fs::exists(cfg.out_dir / "decay.csv"));
  CHECK(fs::exists(cfg.out_dir / "decay.meta.json"));
  CHECK(fs::exists(cfg.out_dir / "decay_report.json"));
  CHECK_FALSE(fs::exists(cfg.out_dir / "decay_sites.csv"));

  cfg.model.omega_a = 0.15;
  cfg.sites = true;
  cfg.sim.snapshot_stride = 1.0;
  const DecayResult fig4 = cmd_decay(cfg);
  CHECK(std::abs(fig4.summary.trace.ca_series.back()) < 0.05);
  CHECK(fig4.summary.leaked_final > 0.9);
  CHECK(fs::exists(cfg.out_dir / "decay_sites.csv"));
  CHECK(fig4.report["final"]["abs_ca"].get<double>() < 0.05);

  RunConfig zero = cfg;
  zero.out_dir = scratch("decay_zero");
  zero.sim.t_max = 0.0;
  zero.sites = false;
  const DecayResult z = cmd_decay(zero);
  REQUIRE(z.summary.trace.times.size() == 1);
  CHECK(std::abs(z.summary.trace.ca_series[0]) == 1.0);
}

TEST_CASE("decay with analytic overlay") {
  RunConfig cfg;
  cfg.out_dir = scratch("decay_analytic");
  cfg.model = {1.0, 0.2, 12, 0.15};
  cfg.sim.t_max = 30;
  cfg.sim.lattice_size = 200;
  cfg.analytic = true;
  const DecayResult r = cmd_decay(cfg);
  REQUIRE(r.summary.comparison);
  CHECK(r.summary.comparison->max_error < 1e-3);
  CHECK(slurp(cfg.out_dir / "decay.csv").find("abs_ca_analytic") != std::string::npos);

  cfg.model.omega_a = 1.9;
  CHECK(kind_of([&] { cmd_decay(cfg); }) == ErrorKind::OutsideBoundStatePresent);
}

TEST_CASE("sweep over omega_a peaks at the resonances") {
  RunConfig cfg;
  cfg.out_dir = scratch("sweep");
  cfg.model = {1.0, 0.2, 12, 0.0};
  cfg.sim.t_max = 400;
  cfg.sweep_values = {1.0, -0.5, 0.0, 0.5, -1.0};
  cfg.sweep_parameter = SweepParameter::OmegaA;
  const SweepResult r = cmd_sweep(cfg);
  REQUIRE(r.rows.size() == 5);
  for (std::size_t i = 0; i + 1 < 5; ++i) CHECK(r.rows[i].value < r.rows[i + 1].value);
  CHECK(r.rows[0].resonant);
  CHECK_FALSE(r.rows[1].resonant);
  CHECK(r.rows[2].resonant);
  CHECK(r.rows[1].tail_abs_ca < r.rows[0].tail_abs_ca);
  CHECK(r.rows[1].tail_abs_ca < r.rows[2].tail_abs_ca);
  CHECK(r.rows[3].tail_abs_ca < r.rows[2].tail_abs_ca);
  CHECK(r.rows[3].tail_abs_ca < r.rows[4].tail_abs_ca);
  CHECK(r.rows[2].predicted_weight == doctest::Approx(1 / 1.24));
  CHECK(r.rows[1].predicted_weight == 0.0);
  CHECK(fs::exists(r.files[0].sidecar));
}

TEST_CASE("sweep edge cases and threading") {
  RunConfig cfg;
  cfg.out_dir = scratch("sweep_small");
  cfg.sim.t_max = 20;
  CHECK(kind_of([&] { cmd_sweep(cfg); }) == ErrorKind::EmptySweep);

  cfg.sweep_values = {0.3};
  const SweepResult one = cmd_sweep(cfg);
  CHECK(one.rows.size() == 1);

  cfg.sweep_values = {0.1, 0.3, 0.2, 0.4};
  const std::string serial = slurp(cmd_sweep(cfg).files[0].data);
  cfg.jobs = 3;
  const std::string threaded = slurp(cmd_sweep(cfg).files[0].data);
  const auto strip_meta = [](std::string s) { return s.substr(s.find('\n', s.find("# metadata"))); };
  CHECK(strip_meta(serial) == strip_meta(threaded));

  cfg.sweep_parameter = SweepParameter::N0;
  cfg.sweep_values = {2.5};
  CHECK(kind_of([&] { cmd_sweep(cfg); }) == ErrorKind::ConfigError);
}

TEST_CASE("executable exit codes") {
  const std::string out = scratch("exe").string();
  CHECK(run_tool("spectral --n0 3 --grid 11 --out " + out) == 0);
  CHECK(fs::exists(fs::path(out) / "spectral_n0_3.csv"));
  CHECK(run_tool("bound-states --omega-a 1.9 --out " + out) == 0);
  CHECK(run_tool("decay --t-max 0 --out " + out) == 0);
  CHECK(run_tool("decay --kappa0 0 --out " + out) == 1);
  CHECK(run_tool("bound-states --n0 0 --out " + out) == 1);
  CHECK(run_tool("spectral --grid 1 --out " + out) == 2);
  CHECK(run_tool("sweep --out " + out) == 2);
  CHECK(run_tool("decay --lattice-size 5 --out " + out) == 2);
  CHECK(run_tool("frobnicate") == 2);
  CHECK(run_tool("decay --format xml") == 2);

  const fs::path blocker = scratch("exe_blocker");
  { std::ofstream(blocker) << "x"; }
  CHECK(run_tool("spectral --out " + (blocker / "sub").string()) == 2);
}
