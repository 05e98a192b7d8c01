#include "fano/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fano/error.hpp"

namespace fano {

namespace {

void require_momentum(double k) {
  if (!(k >= 0.0 && k <= std::numbers::pi)) {
    throw FanoError(ErrorKind::DomainError, "momentum " + std::to_string(k) + " outside [0, pi]");
  }
}

}  // namespace

const ModelParams& validate(const ModelParams& params) {
  if (!(params.kappa0 > 0.0) || !(params.kappaa > 0.0)) {
    throw FanoError(ErrorKind::NonPositiveRate, "kappa0 and kappaa must be > 0");
  }
  if (params.n0 < 1) {
    throw FanoError(ErrorKind::InvalidSiteIndex, "n0 must be >= 1, got " + std::to_string(params.n0));
  }
  if (!std::isfinite(params.omega_a) || !std::isfinite(params.kappa0) || !std::isfinite(params.kappaa)) {
    throw FanoError(ErrorKind::DomainError, "parameters must be finite");
  }
  return params;
}

double dispersion(const ModelParams& params, double k) {
  require_momentum(k);
  return -2.0 * params.kappa0 * std::cos(k);
}

BandPoint band_point(const ModelParams& params, double k) { return {k, dispersion(params, k)}; }

double coupling(const ModelParams& params, double k) {
  require_momentum(k);
  return std::sqrt(2.0 / std::numbers::pi) * params.kappaa * std::sin(params.n0 * k);
}

double density_of_states(const ModelParams& params, double omega) {
  const double edge = 2.0 * params.kappa0;
  if (!(std::abs(omega) < edge)) {
    throw FanoError(ErrorKind::BandEdgeSingularity, "density of states diverges at |omega| >= 2 kappa0");
  }
  return 1.0 / std::sqrt((edge - omega) * (edge + omega));
}

std::vector<double> bic_frequencies(const ModelParams& params) {
  std::vector<double> out;
  if (params.n0 < 2) return out;
  out.reserve(static_cast<std::size_t>(params.n0 - 1));
  for (int m = 1; m < params.n0; ++m) {
    out.push_back(-2.0 * params.kappa0 * std::cos(m * std::numbers::pi / params.n0));
  }
  return out;
}

OutsideWindow outside_bound_state_window(const ModelParams& params) {
  const double shift = params.kappaa * params.kappaa * params.n0 / params.kappa0;
  OutsideWindow w{};
  w.lower = -2.0 * params.kappa0 + shift;
  w.upper = 2.0 * params.kappa0 - shift;
  w.empty = !(w.lower < w.upper);
  w.admits_below = params.omega_a < w.lower;
  w.admits_above = params.omega_a > w.upper;
  w.contains_omega_a = !w.empty && params.omega_a > w.lower && params.omega_a < w.upper;
  return w;
}

double sin_ratio(int n, double k) {
  const double s = std::sin(k);
  if (std::abs(s) > 1e-7) return std::sin(n * k) / s;
  // Near the endpoints sin(n k)/sin(k) -> n at k = 0 and n (-1)^(n+1) at k = pi.
  const bool near_pi = k > 0.5 * std::numbers::pi;
  const double sign = (near_pi && n % 2 == 0) ? -1.0 : 1.0;
  const double d = near_pi ? std::numbers::pi - k : k;
  // second-order expansion: n (1 - (n^2 - 1) d^2 / 6)
  return sign * n * (1.0 - (static_cast<double>(n) * n - 1.0) * d * d / 6.0);
}

}  // namespace fano
