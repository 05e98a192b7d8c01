#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "fano/lattice.hpp"
#include "fano/model.hpp"
#include "fano/quadrature.hpp"
#include "fano/spectral.hpp"

namespace fano {

struct DecayLawConfig {
  ResidueFormula residue_formula = ResidueFormula::AutoResolve;
  QuadratureSettings quadrature;
  std::vector<double> time_grid;
};

/// Outcome of settling which residue formula the lattice dynamics follow.
struct ResidueResolution {
  ResidueFormula winner = ResidueFormula::EigenvectorOverlap;
  /// Mean |c_a| over the tail window of the reference simulation.
  double plateau = 0.0;
  double paper_value = 0.0;
  double overlap_value = 0.0;
  /// True when exactly one candidate lies within the tolerance.
  bool unique = false;
  ModelParams reference;
};

inline constexpr double kResidueMatchTolerance = 0.005;

/// Runs the lattice at kappa0 = 1, kappaa = 0.2, n0 = 12, m = 4 (omega_a = -1)
/// and compares the mean |c_a| over t in [150, 200] with both residue
/// formulas. The first call simulates; later calls return the cached result.
const ResidueResolution& resolve_residue_formula();

/// Same comparison for an arbitrary resonant parameter set (uncached).
ResidueResolution resolve_residue_formula(const ModelParams& reference, double t_begin, double t_end);

/// Weight of the non-decaying term, or 0 when omega_a is not an embedded
/// resonance.
double pole_amplitude(const ModelParams& params, ResidueFormula formula);

/// The branch-cut contribution: (1/2 pi)(kappaa/kappa0)^2 times the k-integral
/// of sin^2(n0 k) exp(2 i kappa0 t cos k) over the squared modulus of the
/// resolvent denominator. At an embedded resonance the removable point
/// k = m pi / n0 is handled by symmetric excision.
Complex decay_integral(const ModelParams& params, double t, const QuadratureSettings& quadrature = {});

/// Integrand of decay_integral at momentum k (prefactor included).
Complex decay_integrand(const ModelParams& params, double t, double k);

/// pole_amplitude exp(-i omega_a t) + decay_integral(t). Throws
/// OutsideBoundStatePresent when omega_a is outside the no-outside-state window.
Complex analytic_ca(const ModelParams& params, double t, const DecayLawConfig& config = {});

std::vector<Complex> analytic_trace(const ModelParams& params, const DecayLawConfig& config);

struct TimeWindow {
  double begin;
  double end;
};

struct ErrorReport {
  double max_error = 0.0;
  double rms_error = 0.0;
  std::size_t samples = 0;
  double plateau_mean = 0.0;
  double plateau_min = 0.0;
  double plateau_max = 0.0;
  std::size_t plateau_samples = 0;
};

/// Compares c_a on the trace's own grid. `analytic_times` must equal the
/// trace times (to 1e-9) inside `window`; plateau statistics are taken from
/// |c_a| of the numeric trace over `tail`.
ErrorReport compare_traces(const DecayTrace& numeric, std::span<const double> analytic_times,
                           std::span<const Complex> analytic_values, TimeWindow window, TimeWindow tail);

/// Same, sampling the analytic side at the trace times inside the window.
ErrorReport compare_traces(const DecayTrace& numeric, const std::function<Complex(double)>& analytic,
                           TimeWindow window, TimeWindow tail);

/// Mean, min and max of |c_a| over a window of a trace.
ErrorReport plateau_statistics(const DecayTrace& trace, TimeWindow tail);

}  // namespace fano
