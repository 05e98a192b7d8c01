#include "fano/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fano/decay.hpp"
#include "fano/error.hpp"

namespace fano {

namespace {

constexpr Complex kI{0.0, 1.0};

Complex ipow(Complex base, int exponent) {
  Complex result{1.0, 0.0};
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

// sqrt(s^2 + 4 kappa0^2) continued analytically off the cut segment and
// asymptotic to s at infinity.
Complex band_root(const ModelParams& params, Complex s) {
  const double w2 = 4.0 * params.kappa0 * params.kappa0;
  return s * std::sqrt(1.0 + w2 / (s * s));
}

void require_off_cut(const ModelParams& params, Complex s) {
  if (s.real() == 0.0 && std::abs(s.imag()) <= 2.0 * params.kappa0) {
    throw FanoError(ErrorKind::OnBranchCut, "s lies on the branch cut of the self-energy");
  }
}

void require_closed_band(const ModelParams& params, double omega) {
  if (!(std::abs(omega) <= 2.0 * params.kappa0)) {
    throw FanoError(ErrorKind::DomainError, "omega outside the closed band");
  }
}

// Upper outer branch written through omega = 2 kappa0 cosh(theta) so that
// nothing cancels near the edge.
double delta_above(const ModelParams& params, double omega) {
  const double theta = std::acosh(omega / (2.0 * params.kappa0));
  const double ka2 = params.kappaa * params.kappaa;
  return ka2 * -std::expm1(-2.0 * params.n0 * theta) / (2.0 * params.kappa0 * std::sinh(theta));
}

}  // namespace

const char* to_string(BoundKind kind) noexcept {
  switch (kind) {
    case BoundKind::BelowBand: return "BelowBand";
    case BoundKind::InContinuum: return "InContinuum";
    case BoundKind::AboveBand: return "AboveBand";
  }
  return "?";
}

const char* to_string(ResidueFormula formula) noexcept {
  switch (formula) {
    case ResidueFormula::PaperEq25: return "PaperEq25";
    case ResidueFormula::EigenvectorOverlap: return "EigenvectorOverlap";
    case ResidueFormula::AutoResolve: return "AutoResolve";
  }
  return "?";
}

double spectral_density_G(const ModelParams& params, double omega) {
  require_closed_band(params, omega);
  const double edge = 2.0 * params.kappa0;
  if (std::abs(omega) == edge) return 0.0;
  const double theta = std::acos(omega / edge);
  const double ka2 = params.kappaa * params.kappaa;
  // (2 ka^2 / pi) sin^2(n0 theta) / (2 kappa0 sin theta)
  return ka2 / (std::numbers::pi * params.kappa0) * std::sin(params.n0 * theta) *
         sin_ratio(params.n0, theta);
}

double level_shift_delta(const ModelParams& params, double omega) {
  const double edge = 2.0 * params.kappa0;
  if (std::abs(omega) == edge) {
    throw FanoError(ErrorKind::BandEdge, "Delta at a band edge is a one-sided limit; use delta_edge_limit");
  }
  if (omega > edge) return delta_above(params, omega);
  if (omega < -edge) return -delta_above(params, -omega);
  const double theta = std::acos(omega / edge);
  const double ka2 = params.kappaa * params.kappaa;
  return ka2 / (2.0 * params.kappa0) * sin_ratio(2 * params.n0, theta);
}

double delta_edge_limit(const ModelParams& params, BandSide side) {
  const double value = params.kappaa * params.kappaa * params.n0 / params.kappa0;
  return side == BandSide::Upper ? value : -value;
}

Complex self_energy(const ModelParams& params, Complex s) {
  require_off_cut(params, s);
  const Complex root = band_root(params, s);
  // (i root - i s) / (2 kappa0) rewritten as 2 i kappa0 / (root + s).
  const Complex q = 2.0 * kI * params.kappa0 / (root + s);
  const double ka2 = params.kappaa * params.kappaa;
  return -kI * ka2 / root * (1.0 - ipow(q, 2 * params.n0));
}

Complex self_energy_boundary(const ModelParams& params, double omega, CutSide side) {
  if (!(std::abs(omega) < 2.0 * params.kappa0)) {
    throw FanoError(ErrorKind::DomainError, "boundary values exist only on the open band");
  }
  const double im = std::numbers::pi * spectral_density_G(params, omega);
  return {level_shift_delta(params, omega), side == CutSide::Plus ? -im : im};
}

std::vector<BoundState> find_outside_bound_states(const ModelParams& params) {
  validate(params);
  const double edge = 2.0 * params.kappa0;
  const double edge_shift = delta_edge_limit(params, BandSide::Upper);
  std::vector<BoundState> found;

  // Solve on the upper side for level frequency `level`; the lower side maps
  // onto it by Delta(-omega) = -Delta(omega).
  auto solve_upper = [&](double level, const char* label) -> std::optional<double> {
    auto residual = [&](double omega) { return omega - level - delta_above(params, omega); };
    if (!(edge - level - edge_shift < 0.0)) return std::nullopt;
    double lo = edge;
    double hi = edge + 10.0 * std::max(params.kappa0, edge_shift);
    int expansions = 0;
    while (residual(hi) <= 0.0) {
      lo = hi;
      hi = edge + 2.0 * (hi - edge);
      if (++expansions > 200 || !std::isfinite(hi)) {
        std::ostringstream msg;
        msg << label << " side: no sign change up to Omega = " << hi;
        throw FanoError(ErrorKind::RootFindFailure, msg.str());
      }
    }
    // Delta is monotone outside the band, so plain bisection is safe; it runs
    // until the bracket cannot shrink further.
    for (int iter = 0; iter < 2000; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (mid == edge || residual(mid) <= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double root = (lo == edge) ? hi : (std::abs(residual(lo)) < std::abs(residual(hi)) ? lo : hi);
    const double res = std::abs(residual(root));
    if (!(res < 1e-10 * std::max(1.0, std::abs(root)))) {
      std::ostringstream msg;
      msg << label << " side: bracket [" << lo << ", " << hi << "] converged with residual " << res;
      throw FanoError(ErrorKind::RootFindFailure, msg.str());
    }
    return root;
  };

  if (auto below = solve_upper(-params.omega_a, "lower")) {
    BoundState st;
    st.omega = -*below;
    st.kind = BoundKind::BelowBand;
    st.residual = std::abs(st.omega - params.omega_a - level_shift_delta(params, st.omega));
    found.push_back(st);
  }
  if (auto above = solve_upper(params.omega_a, "upper")) {
    BoundState st;
    st.omega = *above;
    st.kind = BoundKind::AboveBand;
    st.residual = std::abs(st.omega - params.omega_a - level_shift_delta(params, st.omega));
    found.push_back(st);
  }
  return found;
}

double default_resonance_tolerance(const ModelParams& params) {
  return 8.0 * std::numeric_limits<double>::epsilon() * 2.0 * params.kappa0;
}

std::optional<int> match_bic(const ModelParams& params, std::optional<double> tolerance) {
  validate(params);
  const double tol = tolerance.value_or(default_resonance_tolerance(params));
  const std::vector<double> resonances = bic_frequencies(params);
  std::optional<int> best;
  double best_gap = tol;
  for (std::size_t i = 0; i < resonances.size(); ++i) {
    const double gap = std::abs(params.omega_a - resonances[i]);
    if (gap <= best_gap) {
      best_gap = gap;
      best = static_cast<int>(i) + 1;
    }
  }
  return best;
}

std::vector<BoundState> bic_bound_states(const ModelParams& params, const BicOptions& options) {
  const std::optional<int> m = match_bic(params, options.tolerance);
  if (!m) return {};
  ModelParams resonant = params;
  resonant.omega_a = bic_frequencies(params)[static_cast<std::size_t>(*m - 1)];
  BoundState st;
  st.omega = resonant.omega_a;
  st.kind = BoundKind::InContinuum;
  st.m_index = *m;
  st.weight = pole_amplitude(resonant, options.formula);
  return {st};
}

double flat_limit_G(const ModelParams& params, double omega) {
  require_closed_band(params, omega);
  const double ka2 = params.kappaa * params.kappaa;
  return ka2 / std::numbers::pi * density_of_states(params, omega);
}

double flat_limit_delta(const ModelParams& params, double omega) {
  const double edge = 2.0 * params.kappa0;
  if (std::abs(omega) == edge) {
    throw FanoError(ErrorKind::BandEdge, "flat-limit Delta diverges at the band edges");
  }
  if (std::abs(omega) < edge) return 0.0;
  const double ka2 = params.kappaa * params.kappaa;
  const double value = ka2 / std::sqrt((omega - edge) * (omega + edge));
  return omega > 0.0 ? value : -value;
}

Complex flat_limit_self_energy(const ModelParams& params, Complex s) {
  require_off_cut(params, s);
  return -kI * params.kappaa * params.kappaa / band_root(params, s);
}

}  // namespace fano
