#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "fano/error.hpp"

namespace fano {

struct QuadratureSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_depth = 40;
  /// Half-width of the symmetric excision around each interior pole, as a
  /// fraction of the interval length.
  double pv_window = 1e-2;
  /// Upper bound on the number of live subintervals.
  std::size_t max_segments = 200000;
};

/// Throws ConfigError unless every field is in range.
void validate(const QuadratureSettings& settings);

/// Positive half of the 40-point Gauss-Legendre rule on [-1, 1] as
/// (node, weight) pairs.
const std::vector<std::pair<double, double>>& gauss_legendre_half();

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
bool is_finite_value(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return std::isfinite(v);
  } else {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }
}

template <typename T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  int depth;
};

template <typename T, typename F>
Segment<T> kronrod15(F& f, double a, double b, int depth, std::size_t& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto sample = [&](double x) -> T {
    T v = f(x);
    ++evals;
    if (!is_finite_value(v)) {
      throw FanoError(ErrorKind::NonFiniteIntegrand, "integrand not finite at x = " + std::to_string(x));
    }
    return v;
  };
  const T fc = sample(center);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const T pair = sample(center - dx) + sample(center + dx);
    kronrod += pair * kKronrodWeights[j];
    if (j % 2 == 1) gauss += pair * kGaussWeights[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss), depth};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b]. The
/// subinterval with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol |I|).
template <typename F>
auto integrate_with_error(F&& f, double a, double b, const QuadratureSettings& settings = {})
    -> QuadratureResult<std::decay_t<decltype(f(0.0))>> {
  using T = std::decay_t<decltype(f(0.0))>;
  validate(settings);
  if (!(a < b)) {
    throw FanoError(ErrorKind::DomainError, "integration requires a < b");
  }
  using Seg = detail::Segment<T>;
  std::vector<Seg> segments;
  std::priority_queue<std::pair<double, std::size_t>> heap;

  std::size_t evals = 0;
  segments.push_back(detail::kronrod15<T>(f, a, b, 0, evals));
  heap.emplace(segments.back().error, 0);
  T total = segments.front().value;
  double total_error = segments.front().error;

  // Sums in interval order so the result does not depend on the history of
  // incremental updates.
  auto resum = [&] {
    std::vector<const Seg*> ordered;
    ordered.reserve(segments.size());
    for (const Seg& s : segments) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(), [](const Seg* x, const Seg* y) { return x->a < y->a; });
    total = T{};
    total_error = 0.0;
    for (const Seg* s : ordered) {
      total += s->value;
      total_error += s->error;
    }
  };

  while (true) {
    if (total_error <= std::max(settings.abs_tol, settings.rel_tol * std::abs(total))) {
      resum();
      if (total_error <= std::max(settings.abs_tol, settings.rel_tol * std::abs(total))) break;
    }
    const std::size_t worst = heap.top().second;
    if (segments[worst].depth >= settings.max_depth || segments.size() >= settings.max_segments) {
      throw FanoError(ErrorKind::NoConvergence,
                      "adaptive quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                          "] stalled with error " + std::to_string(total_error));
    }
    heap.pop();
    const Seg parent = segments[worst];
    const double mid = 0.5 * (parent.a + parent.b);
    segments[worst] = detail::kronrod15<T>(f, parent.a, mid, parent.depth + 1, evals);
    segments.push_back(detail::kronrod15<T>(f, mid, parent.b, parent.depth + 1, evals));
    heap.emplace(segments[worst].error, worst);
    heap.emplace(segments.back().error, segments.size() - 1);
    total += segments[worst].value + segments.back().value - parent.value;
    total_error += segments[worst].error + segments.back().error - parent.error;
  }
  return {total, total_error, evals};
}

template <typename F>
auto integrate(F&& f, double a, double b, const QuadratureSettings& settings = {}) {
  return integrate_with_error(std::forward<F>(f), a, b, settings).value;
}

/// Integral of f over [a, b] with a symmetric window around each listed
/// interior point p folded onto f(p + t) + f(p - t). For a simple pole the
/// odd part cancels inside the fold, giving the principal value; for a
/// removable 0/0 point the sample at p itself is never taken. The fold is
/// smooth, so a fixed Gauss-Legendre rule covers the window; adaptive
/// refinement there would only chase rounding noise toward t = 0. The answer
/// is accepted once halving the window leaves it unchanged to
/// 10 max(abs_tol, rel_tol |I|).
template <typename F>
auto symmetric_excision(F&& f, double a, double b, std::vector<double> points,
                        const QuadratureSettings& settings = {}) {
  using T = std::decay_t<decltype(f(0.0))>;
  validate(settings);
  if (!(a < b)) {
    throw FanoError(ErrorKind::DomainError, "integration requires a < b");
  }
  if (points.empty()) return integrate(f, a, b, settings);

  std::sort(points.begin(), points.end());
  double gap = std::min(points.front() - a, b - points.back());
  for (std::size_t i = 1; i < points.size(); ++i) gap = std::min(gap, points[i] - points[i - 1]);
  if (!(points.front() > a) || !(points.back() < b) || !(gap > 0.0)) {
    throw FanoError(ErrorKind::PoleAtEndpoint, "poles must be distinct and strictly interior");
  }
  const double window = std::min(settings.pv_window * (b - a), 0.25 * gap);

  auto fold = [&](double p, double delta) {
    T sum{};
    for (const auto& [x, w] : gauss_legendre_half()) {
      // Snap the offset so that p + t and p - t are both exact.
      const double t = (p + delta * x) - p;
      const T v = f(p + t) + f(p - t);
      if (!std::isfinite(std::abs(v))) {
        throw FanoError(ErrorKind::NonFiniteIntegrand,
                        "integrand not finite at offset " + std::to_string(t) + " from " + std::to_string(p));
      }
      sum += w * v;
    }
    return sum * delta;
  };

  auto excised = [&](double delta) {
    T sum{};
    double left = a;
    for (double p : points) {
      sum += integrate(f, left, p - delta, settings);
      sum += fold(p, delta);
      left = p + delta;
    }
    sum += integrate(f, left, b, settings);
    return sum;
  };

  const T coarse = excised(window);
  const T fine = excised(0.5 * window);
  const double agreement = 10.0 * std::max(settings.abs_tol, settings.rel_tol * std::abs(fine));
  if (std::abs(coarse - fine) > agreement) {
    throw FanoError(ErrorKind::NoConvergence,
                    "excised integral changed by " + std::to_string(std::abs(coarse - fine)) +
                        " when the window was halved");
  }
  return fine;
}

/// Cauchy principal value of a real integrand with simple poles at the given
/// interior points.
template <typename F>
double principal_value(F&& f, double a, double b, std::vector<double> poles,
                       const QuadratureSettings& settings = {}) {
  auto real_part = [&](double x) -> double { return std::real(f(x)); };
  return symmetric_excision(real_part, a, b, std::move(poles), settings);
}

}  // namespace fano
