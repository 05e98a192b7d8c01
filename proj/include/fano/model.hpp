#pragma once

#include <vector>

namespace fano {

/// Parameters of the single-level model: a discrete level of frequency
/// `omega_a` side-coupled with rate `kappaa` to site `n0` of a semi-infinite
/// tight-binding chain with hopping `kappa0`.
struct ModelParams {
  double kappa0 = 1.0;
  double kappaa = 0.2;
  int n0 = 1;
  double omega_a = 0.0;

  double band_low() const noexcept { return -2.0 * kappa0; }
  double band_high() const noexcept { return 2.0 * kappa0; }
};

struct BandPoint {
  double k;
  double omega;
};

enum class BandSide { Lower, Upper };

/// Throws FanoError(NonPositiveRate | InvalidSiteIndex).
const ModelParams& validate(const ModelParams& params);

double dispersion(const ModelParams& params, double k);
BandPoint band_point(const ModelParams& params, double k);

double coupling(const ModelParams& params, double k);

/// 1/sqrt(4 kappa0^2 - omega^2); throws BandEdgeSingularity on or outside the edges.
double density_of_states(const ModelParams& params, double omega);

/// The n0-1 embedded resonance frequencies -2 kappa0 cos(m pi / n0), ascending.
std::vector<double> bic_frequencies(const ModelParams& params);

struct OutsideWindow {
  double lower;
  double upper;
  bool empty;
  /// True when omega_a lies strictly inside (lower, upper), i.e. no bound
  /// state exists on either side of the band.
  bool contains_omega_a;
  bool admits_below;
  bool admits_above;
};

OutsideWindow outside_bound_state_window(const ModelParams& params);

/// sin(n k) / sin(k), continued to its limits at k = 0 and k = pi.
double sin_ratio(int n, double k);

}  // namespace fano
