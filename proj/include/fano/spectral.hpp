#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "fano/model.hpp"

namespace fano {

using Complex = std::complex<double>;

struct SpectralSample {
  double omega;
  double value;
};

struct SelfEnergyPoint {
  Complex s;
  Complex sigma;
};

enum class BoundKind { BelowBand, InContinuum, AboveBand };

struct BoundState {
  double omega = 0.0;
  BoundKind kind = BoundKind::InContinuum;
  /// Spectral weight of the level in the bound state (embedded states only).
  std::optional<double> weight;
  /// Resonance index m (embedded states only).
  std::optional<int> m_index;
  /// |Omega - omega_a - Delta(Omega)| at the returned root (outside states only).
  std::optional<double> residual;
};

const char* to_string(BoundKind kind) noexcept;

/// Which closed form is used for the weight of the non-decaying term.
enum class ResidueFormula {
  /// Exponent -1/2 on [1 - (omega_a / 2 kappa0)^2], as printed in the literature.
  PaperEq25,
  /// |c_a|^2 of the normalized embedded eigenvector (exponent -1).
  EigenvectorOverlap,
  /// Whichever of the two matches the lattice plateau at a reference point.
  AutoResolve,
};

const char* to_string(ResidueFormula formula) noexcept;

/// G(omega) = rho(omega) |v(omega)|^2 on the closed band (0 at the edges).
double spectral_density_G(const ModelParams& params, double omega);

/// Level shift Delta(omega) off the band edges: the oscillating branch inside
/// the band and the decaying branches outside it.
double level_shift_delta(const ModelParams& params, double omega);

/// One-sided limit of Delta at a band edge: -kappaa^2 n0 / kappa0 at the
/// lower edge, +kappaa^2 n0 / kappa0 at the upper one.
double delta_edge_limit(const ModelParams& params, BandSide side);

/// Closed-form self-energy on the physical sheet. Throws OnBranchCut for
/// s = -i omega with |omega| <= 2 kappa0.
Complex self_energy(const ModelParams& params, Complex s);

enum class CutSide { Plus, Minus };

/// Sigma(-i omega +/- 0) = Delta(omega) -/+ i pi G(omega) on the open band.
Complex self_energy_boundary(const ModelParams& params, double omega, CutSide side);

/// Roots of Omega - omega_a = Delta(Omega) below and above the band.
std::vector<BoundState> find_outside_bound_states(const ModelParams& params);

/// Default tolerance for matching omega_a against a resonance frequency:
/// a few ulps of the band width, so that omega_a = -2 kappa0 cos(m pi / n0)
/// built by the caller matches even when cos rounds to a tiny nonzero value.
double default_resonance_tolerance(const ModelParams& params);

/// Index m of the embedded resonance matching omega_a, if any.
std::optional<int> match_bic(const ModelParams& params,
                             std::optional<double> tolerance = std::nullopt);

struct BicOptions {
  ResidueFormula formula = ResidueFormula::AutoResolve;
  std::optional<double> tolerance;
};

std::vector<BoundState> bic_bound_states(const ModelParams& params, const BicOptions& options = {});

// n0 -> infinity: sin^2(n0 k) replaced by its cycle average 1/2.
double flat_limit_G(const ModelParams& params, double omega);
double flat_limit_delta(const ModelParams& params, double omega);
Complex flat_limit_self_energy(const ModelParams& params, Complex s);

}  // namespace fano
