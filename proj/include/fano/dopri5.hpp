#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "fano/error.hpp"

namespace fano {

struct DopriOptions {
  /// Mixed tolerance: component i is scaled by atol + rtol max(|y_i|, |y_new_i|).
  double rtol = 1e-9;
  double atol = 1e-9;
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

struct DopriStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// Dormand-Prince 5(4) with FSAL, PI step-size control and exact landing on
/// each requested output time. `f(t, y, dydt)` writes the derivative;
/// `observe(t, y)` is called at every output time, in order. Output times
/// must be non-decreasing and start at or after t0.
template <typename Scalar, typename Rhs, typename Observer>
DopriStats integrate_dopri5(Rhs&& f, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, double t0,
                            std::span<const double> output_times, const DopriOptions& opts,
                            Observer&& observe) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  // Gustafsson PI controller constants as used by Hairer's DOPRI5.
  constexpr double beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  constexpr double safety = 0.9;
  constexpr double fac_min = 0.2, fac_max = 10.0;

  const Eigen::Index n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  DopriStats stats;
  double t = t0;

  auto scaled_norm = [&](const Vec& e, const Vec& a, const Vec& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
      worst = std::max(worst, std::abs(e[i]) / sc);
    }
    return worst;
  };

  std::size_t next_out = 0;
  while (next_out < output_times.size() && output_times[next_out] <= t) {
    observe(t, static_cast<const Vec&>(y));
    ++next_out;
  }
  if (next_out == output_times.size()) return stats;

  f(t, y, k1);
  ++stats.evaluations;

  // Starting step from the size of y, y' and an explicit Euler probe.
  double h;
  {
    const Vec zero = Vec::Zero(n);
    const double d0 = scaled_norm(y, y, zero);
    const double d1 = scaled_norm(k1, y, zero);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    ytmp = y + h0 * k1;
    f(t + h0, ytmp, k2);
    ++stats.evaluations;
    const double d2 = scaled_norm(k2 - k1, y, zero) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h = std::min({100.0 * h0, h1, opts.h_max});
  }

  double fac_old = 1e-4;
  bool last_rejected = false;

  while (next_out < output_times.size()) {
    if (stats.accepted + stats.rejected >= opts.max_steps) {
      throw FanoError(ErrorKind::StepSizeUnderflow, "step budget exhausted at t = " + std::to_string(t));
    }
    const double target = output_times[next_out];
    const double h_free = h;
    bool clamped = false;
    if (t + h >= target) {
      h = target - t;
      clamped = true;
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      throw FanoError(ErrorKind::StepSizeUnderflow, "step size underflow at t = " + std::to_string(t));
    }

    ytmp = y + h * (a21 * k1);
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(t + h, ynew, k7);
    stats.evaluations += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double e = scaled_norm(err, y, ynew);
    const double fac11 = std::pow(std::max(e, 1e-300), expo1);
    if (e <= 1.0) {
      double fac = fac11 / std::pow(fac_old, beta);
      fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
      double h_next = h / fac;
      if (last_rejected) h_next = std::min(h_next, h);
      fac_old = std::max(e, 1e-4);
      t = clamped ? target : t + h;
      y.swap(ynew);
      k1.swap(k7);
      ++stats.accepted;
      last_rejected = false;
      if (clamped) {
        // The landing step was shortened artificially; resume from the
        // controller's unclamped proposal.
        h_next = std::max(h_next, h_free);
        while (next_out < output_times.size() && output_times[next_out] <= t) {
          observe(t, static_cast<const Vec&>(y));
          ++next_out;
        }
      }
      h = std::min(h_next, opts.h_max);
    } else {
      h /= std::min(1.0 / fac_min, fac11 / safety);
      ++stats.rejected;
      last_rejected = true;
    }
  }
  return stats;
}

}  // namespace fano
