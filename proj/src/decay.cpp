#include "fano/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fano/error.hpp"

namespace fano {

namespace {

constexpr Complex kI{0.0, 1.0};

double resonant_frequency(const ModelParams& params, int m) {
  return bic_frequencies(params)[static_cast<std::size_t>(m - 1)];
}

double paper_eq25_weight(const ModelParams& params, double omega) {
  const double x = omega / (2.0 * params.kappa0);
  const double ratio = params.kappaa / params.kappa0;
  return 1.0 / (1.0 + 0.5 * params.n0 * ratio * ratio / std::sqrt(1.0 - x * x));
}

double overlap_weight(const ModelParams& params, int m) {
  return std::norm(bic_state(params, m).ca);
}

}  // namespace

ResidueResolution resolve_residue_formula(const ModelParams& reference, double t_begin, double t_end) {
  const std::optional<int> m = match_bic(reference);
  if (!m) throw FanoError(ErrorKind::NoBic, "reference parameters carry no embedded resonance");
  ModelParams resonant = reference;
  resonant.omega_a = resonant_frequency(reference, *m);

  SimConfig config;
  config.t_max = t_end;
  config.record_sites = false;
  const DecayTrace trace = simulate(resonant, config);

  ResidueResolution out;
  out.reference = resonant;
  out.plateau = plateau_statistics(trace, {t_begin, t_end}).plateau_mean;
  out.paper_value = pole_amplitude(resonant, ResidueFormula::PaperEq25);
  out.overlap_value = pole_amplitude(resonant, ResidueFormula::EigenvectorOverlap);
  const bool paper_ok = std::abs(out.plateau - out.paper_value) <= kResidueMatchTolerance;
  const bool overlap_ok = std::abs(out.plateau - out.overlap_value) <= kResidueMatchTolerance;
  out.unique = paper_ok != overlap_ok;
  if (out.unique) {
    out.winner = paper_ok ? ResidueFormula::PaperEq25 : ResidueFormula::EigenvectorOverlap;
  } else {
    out.winner = std::abs(out.plateau - out.paper_value) < std::abs(out.plateau - out.overlap_value)
                     ? ResidueFormula::PaperEq25
                     : ResidueFormula::EigenvectorOverlap;
  }
  return out;
}

const ResidueResolution& resolve_residue_formula() {
  static const ResidueResolution cached = [] {
    ModelParams ref{1.0, 0.2, 12, 0.0};
    ref.omega_a = -2.0 * std::cos(4.0 * std::numbers::pi / 12.0);
    return resolve_residue_formula(ref, 150.0, 200.0);
  }();
  return cached;
}

double pole_amplitude(const ModelParams& params, ResidueFormula formula) {
  const std::optional<int> m = match_bic(params);
  if (!m) return 0.0;
  switch (formula) {
    case ResidueFormula::PaperEq25:
      return paper_eq25_weight(params, resonant_frequency(params, *m));
    case ResidueFormula::EigenvectorOverlap: {
      ModelParams resonant = params;
      resonant.omega_a = resonant_frequency(params, *m);
      return overlap_weight(resonant, *m);
    }
    case ResidueFormula::AutoResolve:
      return pole_amplitude(params, resolve_residue_formula().winner);
  }
  return 0.0;
}

Complex decay_integrand(const ModelParams& params, double t, double k) {
  const double k0 = params.kappa0;
  const double eps = params.kappaa * params.kappaa / (4.0 * k0 * k0);
  const double s = std::sin(params.n0 * k);
  const double real_part = params.omega_a / (2.0 * k0) + std::cos(k) - eps * sin_ratio(2 * params.n0, k);
  const double imag_part = 2.0 * eps * s * sin_ratio(params.n0, k);
  const double denom = real_part * real_part + imag_part * imag_part;
  const double ratio = params.kappaa / k0;
  const double prefactor = ratio * ratio / (2.0 * std::numbers::pi);
  return prefactor * s * s / denom * std::exp(kI * (2.0 * k0 * t * std::cos(k)));
}

Complex decay_integral(const ModelParams& params, double t, const QuadratureSettings& quadrature) {
  validate(params);
  if (!(t >= 0.0)) throw FanoError(ErrorKind::DomainError, "decay_integral needs t >= 0");
  auto f = [&](double k) { return decay_integrand(params, t, k); };
  std::vector<double> singular;
  if (const std::optional<int> m = match_bic(params)) {
    singular.push_back(*m * std::numbers::pi / params.n0);
  }
  return symmetric_excision(f, 0.0, std::numbers::pi, singular, quadrature);
}

Complex analytic_ca(const ModelParams& params, double t, const DecayLawConfig& config) {
  validate(params);
  if (!outside_bound_state_window(params).contains_omega_a) {
    throw FanoError(ErrorKind::OutsideBoundStatePresent,
                    "omega_a lies outside the window free of outside-band bound states");
  }
  const double weight = pole_amplitude(params, config.residue_formula);
  const Complex pole = weight * std::exp(-kI * (params.omega_a * t));
  return pole + decay_integral(params, t, config.quadrature);
}

std::vector<Complex> analytic_trace(const ModelParams& params, const DecayLawConfig& config) {
  for (std::size_t i = 0; i < config.time_grid.size(); ++i) {
    if (config.time_grid[i] < 0.0 || (i > 0 && !(config.time_grid[i] > config.time_grid[i - 1]))) {
      throw FanoError(ErrorKind::ConfigError, "time grid must be non-negative and increasing");
    }
  }
  std::vector<Complex> out;
  out.reserve(config.time_grid.size());
  for (double t : config.time_grid) out.push_back(analytic_ca(params, t, config));
  return out;
}

ErrorReport plateau_statistics(const DecayTrace& trace, TimeWindow tail) {
  ErrorReport r;
  double sum = 0.0;
  r.plateau_min = std::numeric_limits<double>::infinity();
  r.plateau_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    if (t < tail.begin - 1e-9 || t > tail.end + 1e-9) continue;
    const double a = std::abs(trace.ca_series[i]);
    sum += a;
    r.plateau_min = std::min(r.plateau_min, a);
    r.plateau_max = std::max(r.plateau_max, a);
    ++r.plateau_samples;
  }
  if (r.plateau_samples == 0) {
    throw FanoError(ErrorKind::GridMismatch, "tail window contains no samples");
  }
  r.plateau_mean = sum / static_cast<double>(r.plateau_samples);
  return r;
}

ErrorReport compare_traces(const DecayTrace& numeric, std::span<const double> analytic_times,
                           std::span<const Complex> analytic_values, TimeWindow window, TimeWindow tail) {
  if (analytic_times.size() != analytic_values.size()) {
    throw FanoError(ErrorKind::GridMismatch, "analytic times and values differ in length");
  }
  ErrorReport r = plateau_statistics(numeric, tail);
  std::size_t j = 0;
  double sq = 0.0;
  for (std::size_t i = 0; i < numeric.times.size(); ++i) {
    const double t = numeric.times[i];
    if (t < window.begin - 1e-9 || t > window.end + 1e-9) continue;
    while (j < analytic_times.size() && analytic_times[j] < t - 1e-9) ++j;
    if (j == analytic_times.size() || std::abs(analytic_times[j] - t) > 1e-9) {
      throw FanoError(ErrorKind::GridMismatch, "analytic grid has no sample at t = " + std::to_string(t));
    }
    const double e = std::abs(numeric.ca_series[i] - analytic_values[j]);
    r.max_error = std::max(r.max_error, e);
    sq += e * e;
    ++r.samples;
  }
  if (r.samples == 0) throw FanoError(ErrorKind::GridMismatch, "comparison window contains no samples");
  r.rms_error = std::sqrt(sq / static_cast<double>(r.samples));
  return r;
}

ErrorReport compare_traces(const DecayTrace& numeric, const std::function<Complex(double)>& analytic,
                           TimeWindow window, TimeWindow tail) {
  std::vector<double> times;
  std::vector<Complex> values;
  for (double t : numeric.times) {
    if (t < window.begin - 1e-9 || t > window.end + 1e-9) continue;
    times.push_back(t);
    values.push_back(analytic(t));
  }
  return compare_traces(numeric, times, values, window, tail);
}

}  // namespace fano
