#include "fano/quadrature.hpp"

#include <numbers>

namespace fano {

void validate(const QuadratureSettings& settings) {
  if (!(settings.rel_tol > 0.0) || !(settings.abs_tol > 0.0) || settings.max_depth < 1 ||
      !(settings.pv_window > 0.0 && settings.pv_window < 0.5) || settings.max_segments < 1) {
    throw FanoError(ErrorKind::ConfigError, "quadrature settings out of range");
  }
}

const std::vector<std::pair<double, double>>& gauss_legendre_half() {
  static const std::vector<std::pair<double, double>> rule = [] {
    constexpr int n = 40;
    std::vector<std::pair<double, double>> r;
    for (int i = 1; i <= n / 2; ++i) {
      // Newton on P_n from the Chebyshev-like initial guess.
      double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.emplace_back(x, 2.0 / ((1.0 - x * x) * dp * dp));
    }
    return r;
  }();
  return rule;
}

}  // namespace fano
