#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fano/error.hpp"
#include "fano/model.hpp"
#include "oracles.hpp"

using namespace fano;
using std::numbers::pi;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const FanoError& e) {
    return e.kind();
  }
  FAIL("expected a FanoError");
  return ErrorKind::IOError;
}

}  // namespace

TEST_CASE("validate accepts the Fig. 5 parameters and rejects bad rates or sites") {
  const ModelParams ok{1.0, 0.2, 12, 0.0};
  CHECK(&validate(ok) == &ok);
  CHECK(kind_of([] { validate({0.0, 0.2, 1, 0.0}); }) == ErrorKind::NonPositiveRate);
  CHECK(kind_of([] { validate({1.0, -0.2, 1, 0.0}); }) == ErrorKind::NonPositiveRate);
  CHECK(kind_of([] { validate({1.0, 0.2, 0, 0.0}); }) == ErrorKind::InvalidSiteIndex);
}

TEST_CASE("dispersion spans the band") {
  const ModelParams p{1.3, 0.2, 3, 0.0};
  CHECK(dispersion(p, 0.0) == doctest::Approx(-2.6));
  CHECK(std::abs(dispersion(p, pi / 2)) < 1e-15);
  CHECK(dispersion(p, pi) == doctest::Approx(2.6));
  CHECK(kind_of([&] { dispersion(p, -0.1); }) == ErrorKind::DomainError);
  CHECK(kind_of([&] { dispersion(p, 3.2); }) == ErrorKind::DomainError);

  double prev = -1e300;
  for (int i = 0; i <= 1000; ++i) {
    const double w = dispersion(p, pi * i / 1000);
    CHECK(w > prev);
    CHECK(w >= p.band_low());
    CHECK(w <= p.band_high());
    prev = w;
  }
  const BandPoint bp = band_point(p, 1.0);
  CHECK(bp.omega == dispersion(p, 1.0));
}

TEST_CASE("coupling vanishes at k = m pi / n0") {
  CHECK(std::abs(coupling({1.0, 0.2, 12, 0.0}, pi / 12)) < 1e-15);
  CHECK(coupling({1.0, 0.2, 1, 0.0}, pi / 2) == doctest::Approx(std::sqrt(2 / pi) * 0.2));
  for (int n0 = 1; n0 <= 15; ++n0) {
    const ModelParams p{1.0, 0.7, n0, 0.0};
    CHECK(coupling(p, 0.0) == 0.0);
    for (int m = 0; m <= n0; ++m) CHECK(std::abs(coupling(p, std::min(m * pi / n0, pi))) < 1e-14);
  }
  CHECK(kind_of([] { coupling({1.0, 0.2, 2, 0.0}, 4.0); }) == ErrorKind::DomainError);
}

TEST_CASE("density of states") {
  const ModelParams p{1.0, 0.2, 1, 0.0};
  CHECK(density_of_states(p, 0.0) == doctest::Approx(0.5));
  double prev = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double w = 2.0 * i / 400.0;
    const double rho = density_of_states(p, w);
    CHECK(rho > prev);
    prev = rho;
  }
  CHECK(density_of_states(p, 2.0 - 1e-12) > 1e5);
  CHECK(kind_of([&] { density_of_states(p, 2.5); }) == ErrorKind::BandEdgeSingularity);
  CHECK(kind_of([&] { density_of_states(p, -2.0); }) == ErrorKind::BandEdgeSingularity);
}

TEST_CASE("bic_frequencies") {
  CHECK(bic_frequencies({1.0, 0.2, 1, 0.0}).empty());

  const auto two = bic_frequencies({1.0, 0.2, 2, 0.0});
  REQUIRE(two.size() == 1);
  CHECK(std::abs(two[0]) < 1e-15);

  const auto three = bic_frequencies({1.0, 0.2, 3, 0.0});
  REQUIRE(three.size() == 2);
  CHECK(three[0] == doctest::Approx(-1.0));
  CHECK(three[1] == doctest::Approx(1.0));

  const auto twelve = bic_frequencies({1.0, 0.2, 12, 0.0});
  REQUIRE(twelve.size() == 11);
  CHECK(std::abs(twelve[5]) < 1e-15);

  for (int n0 = 1; n0 <= 40; ++n0) {
    const ModelParams p{1.7, 0.2, n0, 0.0};
    const auto w = bic_frequencies(p);
    REQUIRE(w.size() == static_cast<std::size_t>(n0 - 1));
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(w[i] > p.band_low());
      CHECK(w[i] < p.band_high());
      if (i > 0) CHECK(w[i] > w[i - 1]);
      CHECK(w[i] == doctest::Approx(-w[w.size() - 1 - i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("outside bound-state window") {
  ModelParams p{1.0, 0.2, 12, 0.15};
  OutsideWindow w = outside_bound_state_window(p);
  CHECK(w.lower == doctest::Approx(-1.52));
  CHECK(w.upper == doctest::Approx(1.52));
  CHECK(w.contains_omega_a);
  CHECK(oracle::count_outside_roots(p) == 0);

  p.omega_a = 1.9;
  w = outside_bound_state_window(p);
  CHECK_FALSE(w.contains_omega_a);
  CHECK(w.admits_above);
  CHECK_FALSE(w.admits_below);
  CHECK(oracle::count_outside_roots(p) == 1);

  const ModelParams strong{1.0, 2.0, 1, 0.0};
  w = outside_bound_state_window(strong);
  CHECK(w.empty);
  CHECK_FALSE(w.contains_omega_a);
  CHECK(oracle::count_outside_roots(strong) == 2);
}

TEST_CASE("sin_ratio matches its limits") {
  for (int n : {1, 2, 5, 24}) {
    CHECK(sin_ratio(n, 0.0) == doctest::Approx(n));
    CHECK(sin_ratio(n, pi) == doctest::Approx(n % 2 == 0 ? -n : n));
    for (double k : {1e-9, 1e-6, 0.3, pi - 1e-6, pi - 1e-9}) {
      const long double exact = std::sin(static_cast<long double>(n) * k) / std::sin(static_cast<long double>(k));
      CHECK(sin_ratio(n, k) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-7));
    }
  }
}
