// fano-lab: spectral tables, bound states and decay dynamics of a discrete
// level side-coupled to a semi-infinite tight-binding chain.

#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "commands.hpp"
#include "fano/error.hpp"

namespace {

using fano::cli::RunConfig;

void add_model_flags(CLI::App& cmd, RunConfig& cfg, bool multi_n0) {
  cmd.add_option("--kappa0", cfg.model.kappa0, "hopping rate kappa0")->capture_default_str();
  cmd.add_option("--kappa-a", cfg.model.kappaa, "level-lattice coupling kappa_a")->capture_default_str();
  if (multi_n0) {
    cmd.add_option("--n0", cfg.n0_list, "attachment site(s); one table per value")->expected(1, -1);
  } else {
    cmd.add_option("--n0", cfg.model.n0, "attachment site index")->capture_default_str();
  }
  cmd.add_option("--omega-a", cfg.model.omega_a, "level frequency omega_a")->capture_default_str();
  cmd.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  cmd.add_option("--format", cfg.format, "csv or json")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, fano::cli::OutputFormat>{{"csv", fano::cli::OutputFormat::Csv},
                                                         {"json", fano::cli::OutputFormat::Json}}));
  cmd.add_option("--residue", cfg.residue, "pole weight formula: paper, overlap or auto")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, fano::ResidueFormula>{{"paper", fano::ResidueFormula::PaperEq25},
                                                      {"overlap", fano::ResidueFormula::EigenvectorOverlap},
                                                      {"auto", fano::ResidueFormula::AutoResolve}}));
  cmd.add_option("--resonance-tol", cfg.resonance_tol,
                 "match omega_a to a resonance within this tolerance instead of exactly");
}

void add_sim_flags(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--t-max", cfg.sim.t_max, "final time")->capture_default_str();
  cmd.add_option("--rk-tol", cfg.sim.rk_tol, "local error tolerance of the integrator")->capture_default_str();
  cmd.add_option("--lattice-size", cfg.sim.lattice_size, "number of lattice sites (0: automatic)")
      ->capture_default_str();
  cmd.add_option("--stride", cfg.sim.snapshot_stride, "recording interval")->capture_default_str();
  cmd.add_flag("--absorber", cfg.absorber, "damp the last quarter of the lattice");
  cmd.add_option("--absorber-start", cfg.absorber_start, "first absorbing site");
  cmd.add_option("--absorber-strength", cfg.absorber_strength, "peak damping rate");
  cmd.add_option("--absorber-power", cfg.absorber_power, "ramp exponent");
  cmd.add_option("--tail-fraction", cfg.tail_fraction, "plateau window starts at this fraction of t-max")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound states and decay of a level side-coupled to a semi-infinite tight-binding chain"};
  app.set_version_flag("--version", std::string(fano::cli::kToolVersion));
  app.require_subcommand(1);

  RunConfig spectral_cfg;
  spectral_cfg.n0_list.clear();
  auto* spectral = app.add_subcommand("spectral", "tables of G(omega) and Delta(omega) per n0");
  add_model_flags(*spectral, spectral_cfg, true);
  spectral->add_option("--grid", spectral_cfg.grid, "number of frequency samples on [-3 kappa0, 3 kappa0]")
      ->capture_default_str();

  RunConfig bound_cfg;
  auto* bound = app.add_subcommand("bound-states", "bound states outside and inside the band");
  add_model_flags(*bound, bound_cfg, false);

  RunConfig decay_cfg;
  auto* decay = app.add_subcommand("decay", "lattice simulation of the level amplitude");
  add_model_flags(*decay, decay_cfg, false);
  add_sim_flags(*decay, decay_cfg);
  decay->add_flag("--analytic", decay_cfg.analytic, "add the exact decay law as overlay columns");
  decay->add_flag("--sites", decay_cfg.sites, "write the |c_n(t)| grid");

  RunConfig sweep_cfg;
  sweep_cfg.sim.t_max = 400.0;
  auto* sweep = app.add_subcommand("sweep", "tail |c_a| over a parameter grid");
  add_model_flags(*sweep, sweep_cfg, false);
  add_sim_flags(*sweep, sweep_cfg);
  sweep->add_option("--sweep", sweep_cfg.sweep_parameter, "parameter to scan: omega-a, n0 or kappa-a")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, fano::cli::SweepParameter>{{"omega-a", fano::cli::SweepParameter::OmegaA},
                                                           {"n0", fano::cli::SweepParameter::N0},
                                                           {"kappa-a", fano::cli::SweepParameter::KappaA}}));
  sweep->add_option("--values", sweep_cfg.sweep_values, "grid values (kappa-a in units of kappa0)")
      ->delimiter(',');
  sweep->add_option("--jobs", sweep_cfg.jobs, "concurrent sweep points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*spectral) {
      const auto result = fano::cli::cmd_spectral(spectral_cfg);
      for (const auto& f : result.files) std::cout << f.data.string() << "\n";
    } else if (*bound) {
      const auto result = fano::cli::cmd_bound_states(bound_cfg);
      std::cout << result.report.dump(2) << "\n";
    } else if (*decay) {
      const auto result = fano::cli::cmd_decay(decay_cfg);
      std::cout << result.report.dump(2) << "\n";
    } else if (*sweep) {
      const auto result = fano::cli::cmd_sweep(sweep_cfg);
      for (const auto& f : result.files) std::cout << f.data.string() << "\n";
    }
  } catch (const fano::FanoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fano::is_config_error(e.kind()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
