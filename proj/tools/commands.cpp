#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>
#include <variant>

#include "fano/error.hpp"
#include "fano/spectral.hpp"

namespace fano::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw FanoError(ErrorKind::IOError, "cannot create output directory " + dir.string());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FanoError(ErrorKind::IOError, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw FanoError(ErrorKind::IOError, "write to " + path.string() + " failed");
}

std::string format_extension(OutputFormat f) { return f == OutputFormat::Csv ? ".csv" : ".json"; }

// Writes `<stem>.csv|json` and `<stem>.meta.json` under config.out_dir.
WrittenFile write_table(const RunConfig& config, const std::string& stem, const Table& table,
                        const json& meta) {
  ensure_directory(config.out_dir);
  WrittenFile wf{config.out_dir / (stem + format_extension(config.format)),
                 config.out_dir / (stem + ".meta.json")};
  std::string body;
  if (config.format == OutputFormat::Csv) {
    body += std::string("# ") + kToolName + " " + kToolVersion + "\n";
    body += "# command: " + meta.at("command").get<std::string>() + "\n";
    body += "# metadata: " + wf.sidecar.filename().string() + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      body += (i ? "," : "") + table.columns[i];
    }
    body += "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) body += ",";
        body += cell_text(row[i]);
      }
      body += "\n";
    }
  } else {
    json doc;
    doc["metadata"] = meta;
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const Cell& c : row) r.push_back(cell_json(c));
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    body = doc.dump(1) + "\n";
  }
  write_text(wf.data, body);
  write_text(wf.sidecar, meta.dump(2) + "\n");
  return wf;
}

json model_json(const ModelParams& m) {
  return {{"kappa0", m.kappa0}, {"kappa_a", m.kappaa}, {"n0", m.n0}, {"omega_a", m.omega_a}};
}

// The sim config after defaults and absorber overrides are applied.
SimConfig effective_sim(const ModelParams& model, const RunConfig& config) {
  SimConfig sim = config.sim;
  if (config.absorber) {
    sim.absorber = Absorber{};
    if (sim.lattice_size == 0) sim.lattice_size = default_lattice_size(model, sim);
    Absorber a = default_absorber(model, sim.lattice_size);
    if (config.absorber_start) a.start = *config.absorber_start;
    if (config.absorber_strength) a.strength = *config.absorber_strength;
    if (config.absorber_power) a.power = *config.absorber_power;
    sim.absorber = a;
  } else {
    sim.absorber.reset();
  }
  return resolve(model, sim);
}

double predicted_weight(const ModelParams& model, const RunConfig& config) {
  const std::optional<int> m = match_bic(model, config.resonance_tol);
  if (!m) return 0.0;
  ModelParams resonant = model;
  resonant.omega_a = bic_frequencies(model)[static_cast<std::size_t>(*m - 1)];
  return pole_amplitude(resonant, config.residue);
}

void require_grid(int grid) {
  if (grid < 2) throw FanoError(ErrorKind::ConfigError, "grid needs at least 2 points");
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

json metadata(const std::string& command, const RunConfig& config) {
  json meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["command"] = command;
  meta["model"] = model_json(config.model);
  meta["format"] = config.format == OutputFormat::Csv ? "csv" : "json";
  meta["residue_formula"] = to_string(config.residue);
  if (config.resonance_tol) meta["resonance_tol"] = *config.resonance_tol;
  if (command == "spectral") {
    meta["n0_list"] = config.n0_list;
    meta["grid"] = config.grid;
    meta["omega_range"] = {-3.0 * config.model.kappa0, 3.0 * config.model.kappa0};
  } else if (command == "decay" || command == "sweep") {
    json sim;
    sim["t_max"] = config.sim.t_max;
    sim["rk_tol"] = config.sim.rk_tol;
    sim["snapshot_stride"] = config.sim.snapshot_stride;
    sim["lattice_size"] = config.sim.lattice_size;
    sim["absorber"] = config.absorber;
    if (config.absorber_start) sim["absorber_start"] = *config.absorber_start;
    if (config.absorber_strength) sim["absorber_strength"] = *config.absorber_strength;
    if (config.absorber_power) sim["absorber_power"] = *config.absorber_power;
    sim["tail_fraction"] = config.tail_fraction;
    meta["sim"] = sim;
    if (command == "decay") {
      meta["analytic"] = config.analytic;
      meta["sites"] = config.sites;
    } else {
      const char* names[] = {"omega-a", "n0", "kappa-a"};
      meta["sweep"] = {{"parameter", names[static_cast<int>(config.sweep_parameter)]},
                       {"values", config.sweep_values},
                       {"jobs", config.jobs}};
    }
  }
  return meta;
}

SpectralResult cmd_spectral(const RunConfig& config) {
  require_grid(config.grid);
  std::vector<int> n0s = config.n0_list;
  if (n0s.empty()) n0s.push_back(config.model.n0);
  SpectralResult result;
  const json meta = metadata("spectral", config);
  const double k0 = config.model.kappa0;
  const double edge = 2.0 * k0;

  for (int n0 : n0s) {
    ModelParams p = config.model;
    p.n0 = n0;
    validate(p);
    Table table;
    table.columns = {"omega_over_kappa0", "G_over_kappa0", "Delta_over_kappa0"};
    int sign_changes = 0;
    double last_inside = 0.0;
    for (int i = 0; i < config.grid; ++i) {
      const double omega = -3.0 * k0 + 6.0 * k0 * i / (config.grid - 1);
      const bool inside = std::abs(omega) <= edge;
      const double g = inside ? spectral_density_G(p, omega) : 0.0;
      double delta;
      if (omega == edge) {
        delta = delta_edge_limit(p, BandSide::Upper);
      } else if (omega == -edge) {
        delta = delta_edge_limit(p, BandSide::Lower);
      } else {
        delta = level_shift_delta(p, omega);
      }
      if (std::abs(omega) < edge) {
        if (delta != 0.0) {
          if (last_inside != 0.0 && (delta > 0.0) != (last_inside > 0.0)) ++sign_changes;
          last_inside = delta;
        }
      }
      table.rows.push_back({omega / k0, g / k0, delta / k0});
    }
    json m = meta;
    m["n0"] = n0;
    result.files.push_back(write_table(config, "spectral_n0_" + std::to_string(n0), table, m));
    result.delta_sign_changes.push_back(sign_changes);
  }
  return result;
}

BoundStatesResult cmd_bound_states(const RunConfig& config) {
  const ModelParams& p = validate(config.model);
  json report;
  report["metadata"] = metadata("bound-states", config);

  const OutsideWindow w = outside_bound_state_window(p);
  report["window"] = {{"lower", w.lower},
                      {"upper", w.upper},
                      {"empty", w.empty},
                      {"contains_omega_a", w.contains_omega_a}};

  Table table;
  table.columns = {"kind", "omega", "m", "residual", "weight_paper_eq25", "weight_eigenvector_overlap"};

  json outside = json::array();
  for (const BoundState& s : find_outside_bound_states(p)) {
    outside.push_back({{"kind", to_string(s.kind)}, {"omega", s.omega}, {"residual", *s.residual}});
    table.rows.push_back({std::string(to_string(s.kind)), s.omega, 0LL, *s.residual, 0.0, 0.0});
  }
  report["outside_states"] = outside;

  json bics = json::array();
  BicOptions opts;
  opts.formula = config.residue;
  opts.tolerance = config.resonance_tol;
  for (const BoundState& s : bic_bound_states(p, opts)) {
    ModelParams resonant = p;
    resonant.omega_a = s.omega;
    const double paper = pole_amplitude(resonant, ResidueFormula::PaperEq25);
    const double overlap = pole_amplitude(resonant, ResidueFormula::EigenvectorOverlap);
    json b = {{"kind", to_string(s.kind)},
              {"omega", s.omega},
              {"m", *s.m_index},
              {"weight_paper_eq25", paper},
              {"weight_eigenvector_overlap", overlap},
              {"weight", *s.weight}};
    if (config.residue == ResidueFormula::AutoResolve) {
      const ResidueResolution& r = resolve_residue_formula();
      b["formula"] = to_string(r.winner);
      b["resolution"] = {{"plateau", r.plateau},
                         {"paper_value", r.paper_value},
                         {"overlap_value", r.overlap_value},
                         {"unique", r.unique}};
    } else {
      b["formula"] = to_string(config.residue);
    }
    bics.push_back(b);
    table.rows.push_back({std::string(to_string(s.kind)), s.omega, static_cast<long long>(*s.m_index), 0.0,
                          paper, overlap});
  }
  report["bic"] = bics;

  BoundStatesResult result;
  result.files.push_back(write_table(config, "bound_states", table, report["metadata"]));
  ensure_directory(config.out_dir);
  const fs::path report_path = config.out_dir / "bound_states_report.json";
  write_text(report_path, report.dump(2) + "\n");
  result.report = std::move(report);
  return result;
}

DecaySummary run_decay(const ModelParams& model, const RunConfig& config) {
  validate(model);
  const SimConfig sim = effective_sim(model, config);
  DecaySummary s;
  s.trace = simulate(model, sim);
  const double t_max = sim.t_max;
  const TimeWindow tail{config.tail_fraction * t_max, t_max};
  s.plateau = plateau_statistics(s.trace, tail);
  for (std::size_t i = 0; i < s.trace.times.size(); ++i) {
    if (s.trace.times[i] >= tail.begin - 1e-9) {
      s.escaped_max_tail = std::max(s.escaped_max_tail, s.trace.escaped_series[i]);
    }
  }
  s.leaked_final = 1.0 - s.trace.trapped_series.back();
  s.predicted_weight = predicted_weight(model, config);
  return s;
}

DecayResult cmd_decay(const RunConfig& config) {
  RunConfig cfg = config;
  cfg.sim.record_sites = config.sites;
  DecayResult result;
  result.summary = run_decay(config.model, cfg);
  const DecayTrace& trace = result.summary.trace;
  const json meta = metadata("decay", cfg);

  std::vector<Complex> analytic;
  if (config.analytic) {
    DecayLawConfig dl;
    dl.residue_formula = config.residue;
    dl.time_grid = trace.times;
    analytic = analytic_trace(config.model, dl);
    result.summary.comparison = compare_traces(trace, trace.times, analytic,
                                               {0.0, trace.times.back()},
                                               {config.tail_fraction * trace.times.back(), trace.times.back()});
  }

  Table table;
  table.columns = {"t", "abs_ca", "re_ca", "im_ca", "norm"};
  if (config.analytic) {
    table.columns.insert(table.columns.end(), {"abs_ca_analytic", "re_ca_analytic", "im_ca_analytic"});
  }
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const Complex c = trace.ca_series[i];
    std::vector<Cell> row{trace.times[i], std::abs(c), c.real(), c.imag(), trace.norm_series[i]};
    if (config.analytic) {
      row.insert(row.end(), {std::abs(analytic[i]), analytic[i].real(), analytic[i].imag()});
    }
    table.rows.push_back(std::move(row));
  }
  result.files.push_back(write_table(cfg, "decay", table, meta));

  if (config.sites) {
    Table sites;
    sites.columns.push_back("t");
    for (int n = 1; n <= trace.lattice_size; ++n) sites.columns.push_back("site_" + std::to_string(n));
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      std::vector<Cell> row{trace.times[i]};
      for (int n = 0; n < trace.lattice_size; ++n) {
        row.emplace_back(trace.site_snapshots(static_cast<Eigen::Index>(i), n));
      }
      sites.rows.push_back(std::move(row));
    }
    result.files.push_back(write_table(cfg, "decay_sites", sites, meta));
  }

  const DecaySummary& s = result.summary;
  json report;
  report["metadata"] = meta;
  report["lattice_size"] = trace.lattice_size;
  if (trace.absorber) {
    report["absorber"] = {{"start", trace.absorber->start},
                          {"strength", trace.absorber->strength},
                          {"power", trace.absorber->power}};
  }
  report["steps"] = {{"accepted", trace.steps_accepted}, {"rejected", trace.steps_rejected}};
  report["plateau"] = {{"window", {config.tail_fraction * trace.times.back(), trace.times.back()}},
                       {"mean_abs_ca", s.plateau.plateau_mean},
                       {"min_abs_ca", s.plateau.plateau_min},
                       {"max_abs_ca", s.plateau.plateau_max},
                       {"samples", s.plateau.plateau_samples}};
  report["final"] = {{"abs_ca", std::abs(trace.ca_series.back())},
                     {"norm", trace.norm_series.back()},
                     {"leaked_past_n0", s.leaked_final}};
  report["escaped_pre_absorber_max_tail"] = s.escaped_max_tail;
  report["predicted_weight"] = s.predicted_weight;
  if (s.comparison) {
    report["comparison"] = {{"max_error", s.comparison->max_error},
                            {"rms_error", s.comparison->rms_error},
                            {"samples", s.comparison->samples}};
  }
  ensure_directory(cfg.out_dir);
  write_text(cfg.out_dir / "decay_report.json", report.dump(2) + "\n");
  result.report = std::move(report);
  return result;
}

SweepResult cmd_sweep(const RunConfig& config) {
  if (config.sweep_values.empty()) throw FanoError(ErrorKind::EmptySweep, "sweep grid is empty");
  std::vector<double> values = config.sweep_values;
  std::stable_sort(values.begin(), values.end());

  std::vector<ModelParams> points;
  for (double v : values) {
    ModelParams p = config.model;
    switch (config.sweep_parameter) {
      case SweepParameter::OmegaA: p.omega_a = v; break;
      case SweepParameter::KappaA: p.kappaa = v * config.model.kappa0; break;
      case SweepParameter::N0:
        if (v != std::floor(v)) throw FanoError(ErrorKind::ConfigError, "n0 sweep values must be integers");
        p.n0 = static_cast<int>(v);
        break;
    }
    validate(p);
    points.push_back(p);
  }
  if (config.residue == ResidueFormula::AutoResolve) resolve_residue_formula();

  RunConfig cfg = config;
  cfg.sim.record_sites = false;
  std::vector<SweepRow> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  auto run_point = [&](std::size_t i) {
    try {
      const DecaySummary s = run_decay(points[i], cfg);
      rows[i].value = values[i];
      rows[i].tail_abs_ca = s.plateau.plateau_mean;
      rows[i].final_abs_ca = std::abs(s.trace.ca_series.back());
      rows[i].predicted_weight = s.predicted_weight;
      rows[i].resonant = match_bic(points[i], config.resonance_tol).has_value();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const auto jobs = static_cast<std::size_t>(std::max(1, config.jobs));
  if (jobs == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(jobs, points.size()); ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < points.size(); i = next++) run_point(i);
      });
    }
    for (auto& t : workers) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Table table;
  table.columns = {"value", "tail_abs_ca", "final_abs_ca", "predicted_pole_amplitude", "resonant"};
  for (const SweepRow& r : rows) {
    table.rows.push_back({r.value, r.tail_abs_ca, r.final_abs_ca, r.predicted_weight,
                          static_cast<long long>(r.resonant)});
  }
  SweepResult result;
  result.files.push_back(write_table(cfg, "sweep", table, metadata("sweep", cfg)));
  result.rows = std::move(rows);
  return result;
}

}  // namespace fano::cli
