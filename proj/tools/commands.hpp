#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fano/decay.hpp"
#include "fano/lattice.hpp"
#include "fano/model.hpp"

namespace fano::cli {

inline constexpr const char* kToolName = "fano-lab";
inline constexpr const char* kToolVersion = "0.1.0";

enum class OutputFormat { Csv, Json };

enum class SweepParameter { OmegaA, N0, KappaA };

struct RunConfig {
  ModelParams model{1.0, 0.2, 12, 0.0};
  OutputFormat format = OutputFormat::Csv;
  std::filesystem::path out_dir = ".";

  // spectral
  std::vector<int> n0_list;
  int grid = 601;

  // decay / sweep
  SimConfig sim;
  bool absorber = false;
  std::optional<int> absorber_start;
  std::optional<double> absorber_strength;
  std::optional<int> absorber_power;
  bool analytic = false;
  bool sites = false;
  /// Plateau statistics are taken over [tail_fraction t_max, t_max].
  double tail_fraction = 0.75;

  ResidueFormula residue = ResidueFormula::AutoResolve;
  std::optional<double> resonance_tol;

  SweepParameter sweep_parameter = SweepParameter::OmegaA;
  std::vector<double> sweep_values;
  int jobs = 1;
};

/// A written table: its path and its sidecar.
struct WrittenFile {
  std::filesystem::path data;
  std::filesystem::path sidecar;
};

struct SpectralResult {
  std::vector<WrittenFile> files;
  /// Sign changes of Delta on the open band, per n0 in input order.
  std::vector<int> delta_sign_changes;
};

struct DecaySummary {
  DecayTrace trace;
  ErrorReport plateau;
  double escaped_max_tail = 0.0;
  double leaked_final = 0.0;
  std::optional<ErrorReport> comparison;
  double predicted_weight = 0.0;
};

struct DecayResult {
  std::vector<WrittenFile> files;
  DecaySummary summary;
  nlohmann::json report;
};

struct SweepRow {
  double value = 0.0;
  double tail_abs_ca = 0.0;
  double final_abs_ca = 0.0;
  double predicted_weight = 0.0;
  bool resonant = false;
};

struct SweepResult {
  std::vector<WrittenFile> files;
  std::vector<SweepRow> rows;
};

struct BoundStatesResult {
  std::vector<WrittenFile> files;
  nlohmann::json report;
};

/// Full parameter record written into every sidecar and JSON table.
nlohmann::json metadata(const std::string& command, const RunConfig& config);

/// Fixed-width round-trip formatting used for every number in CSV output.
std::string format_double(double value);

SpectralResult cmd_spectral(const RunConfig& config);
BoundStatesResult cmd_bound_states(const RunConfig& config);
DecayResult cmd_decay(const RunConfig& config);
SweepResult cmd_sweep(const RunConfig& config);

/// Runs the lattice for one parameter set and gathers plateau and leakage
/// statistics (no files).
DecaySummary run_decay(const ModelParams& model, const RunConfig& config);

}  // namespace fano::cli
