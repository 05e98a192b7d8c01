#include "fano/lattice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fano/dopri5.hpp"
#include "fano/error.hpp"
#include "fano/spectral.hpp"

namespace fano {

namespace {

constexpr Complex kI{0.0, 1.0};

// Packed state: y[0] = c_a, y[n] = c_n for n = 1..N.
Eigen::VectorXcd pack(const LatticeState& s) {
  Eigen::VectorXcd y(s.c.size() + 1);
  y[0] = s.ca;
  y.tail(s.c.size()) = s.c;
  return y;
}

LatticeState unpack(double t, const Eigen::VectorXcd& y) {
  LatticeState s;
  s.t = t;
  s.ca = y[0];
  s.c = y.tail(y.size() - 1);
  return s;
}

// Writes H y into out for the packed layout.
void hamiltonian_packed(const ModelParams& p, const Eigen::VectorXcd& y, Eigen::VectorXcd& out) {
  const Eigen::Index n_sites = y.size() - 1;
  const double k0 = p.kappa0;
  out[0] = p.omega_a * y[0] - p.kappaa * y[p.n0];
  for (Eigen::Index n = 1; n <= n_sites; ++n) {
    const Complex left = n > 1 ? y[n - 1] : Complex{};
    const Complex right = n < n_sites ? y[n + 1] : Complex{};
    out[n] = -k0 * (left + right);
  }
  out[p.n0] -= p.kappaa * y[0];
}

Eigen::VectorXd absorber_profile(const std::optional<Absorber>& absorber, int n_sites) {
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(n_sites + 1);
  if (!absorber) return gamma;
  const double span = static_cast<double>(n_sites - absorber->start);
  for (int n = absorber->start; n <= n_sites; ++n) {
    gamma[n] = absorber->strength * std::pow((n - absorber->start) / span, absorber->power);
  }
  return gamma;
}

void check_state(const ModelParams& params, const LatticeState& state) {
  if (state.size() < params.n0) {
    throw FanoError(ErrorKind::ConfigError, "lattice state has fewer sites than n0");
  }
}

}  // namespace

int default_lattice_size(const ModelParams& params, const SimConfig& config) {
  const int reach = static_cast<int>(std::ceil(2.0 * params.kappa0 * config.t_max));
  if (config.absorber) {
    // Short enough that radiation reaches the absorber well before t_max.
    return params.n0 + std::max(50, static_cast<int>(std::ceil(params.kappa0 * config.t_max)));
  }
  return params.n0 + reach + 50;
}

Absorber default_absorber(const ModelParams& params, int lattice_size) {
  Absorber a;
  a.start = lattice_size - lattice_size / 4;
  a.strength = params.kappa0;
  a.power = 3;
  return a;
}

SimConfig resolve(const ModelParams& params, SimConfig config) {
  validate(params);
  if (!(config.t_max >= 0.0) || !std::isfinite(config.t_max)) {
    throw FanoError(ErrorKind::ConfigError, "t_max must be a finite non-negative time");
  }
  if (!(config.rk_tol > 0.0) || !(config.snapshot_stride > 0.0)) {
    throw FanoError(ErrorKind::ConfigError, "rk_tol and snapshot_stride must be positive");
  }
  if (config.lattice_size == 0) config.lattice_size = default_lattice_size(params, config);
  if (config.lattice_size <= params.n0 + 2) {
    throw FanoError(ErrorKind::ConfigError, "lattice size must exceed n0 + 2");
  }
  if (config.absorber) {
    const Absorber& a = *config.absorber;
    if (a.start <= params.n0 || a.start >= config.lattice_size) {
      throw FanoError(ErrorKind::ConfigError,
                      "absorber must start beyond n0 and before the lattice end (start = " +
                          std::to_string(a.start) + ")");
    }
    if (!(a.strength >= 0.0) || a.power < 2) {
      throw FanoError(ErrorKind::ConfigError, "absorber needs strength >= 0 and power >= 2");
    }
  }
  return config;
}

LatticeState apply_hamiltonian(const ModelParams& params, const LatticeState& state) {
  check_state(params, state);
  const Eigen::VectorXcd y = pack(state);
  Eigen::VectorXcd out(y.size());
  hamiltonian_packed(params, y, out);
  return unpack(state.t, out);
}

LatticeState rhs(const ModelParams& params, const LatticeState& state,
                 const std::optional<Absorber>& absorber) {
  check_state(params, state);
  const Eigen::VectorXcd y = pack(state);
  Eigen::VectorXcd out(y.size());
  hamiltonian_packed(params, y, out);
  out *= -kI;
  const Eigen::VectorXd gamma = absorber_profile(absorber, state.size());
  out.array() -= gamma.array().cast<Complex>() * y.array();
  return unpack(state.t, out);
}

DecayTrace simulate(const ModelParams& params, const SimConfig& raw_config) {
  const SimConfig config = resolve(params, raw_config);
  LatticeState initial;
  initial.ca = 1.0;
  initial.c = Eigen::VectorXcd::Zero(config.lattice_size);
  return evolve(params, initial, config);
}

DecayTrace evolve(const ModelParams& params, const LatticeState& initial, const SimConfig& raw_config) {
  SimConfig sized = raw_config;
  if (sized.lattice_size != 0 && sized.lattice_size != initial.size()) {
    throw FanoError(ErrorKind::ConfigError, "initial state size differs from the configured lattice size");
  }
  sized.lattice_size = initial.size();
  const SimConfig config = resolve(params, sized);
  const int n_sites = config.lattice_size;
  const Eigen::VectorXd gamma = absorber_profile(config.absorber, n_sites);
  const bool damped = config.absorber.has_value();

  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor(config.t_max / config.snapshot_stride + 1e-9));
  grid.reserve(count + 2);
  for (std::size_t i = 0; i <= count; ++i) {
    grid.push_back(initial.t + static_cast<double>(i) * config.snapshot_stride);
  }
  if (grid.back() < initial.t + config.t_max) grid.push_back(initial.t + config.t_max);

  DecayTrace trace;
  trace.lattice_size = n_sites;
  trace.absorber = config.absorber;
  trace.times.reserve(grid.size());
  trace.ca_series.reserve(grid.size());
  trace.norm_series.reserve(grid.size());
  trace.escaped_series.reserve(grid.size());
  trace.trapped_series.reserve(grid.size());
  if (config.record_sites) trace.site_snapshots.resize(static_cast<Eigen::Index>(grid.size()), n_sites);
  const int escape_end = damped ? config.absorber->start - 1 : n_sites;

  Eigen::VectorXcd y = pack(initial);

  auto f = [&](double, const Eigen::VectorXcd& state, Eigen::VectorXcd& dydt) {
    hamiltonian_packed(params, state, dydt);
    dydt *= -kI;
    if (damped) {
      for (int n = config.absorber->start; n <= n_sites; ++n) dydt[n] -= gamma[n] * state[n];
    }
  };
  auto observe = [&](double t, const Eigen::VectorXcd& state) {
    const auto row = static_cast<Eigen::Index>(trace.times.size());
    trace.times.push_back(t);
    trace.ca_series.push_back(state[0]);
    trace.norm_series.push_back(state.squaredNorm());
    trace.escaped_series.push_back(state.segment(params.n0, escape_end - params.n0 + 1).squaredNorm());
    trace.trapped_series.push_back(state.head(params.n0).squaredNorm());
    if (config.record_sites) trace.site_snapshots.row(row) = state.tail(n_sites).cwiseAbs().transpose();
  };

  DopriOptions opts;
  opts.rtol = config.rk_tol;
  opts.atol = config.rk_tol;
  const DopriStats stats = integrate_dopri5<Complex>(f, y, initial.t, grid, opts, observe);
  trace.steps_accepted = stats.accepted;
  trace.steps_rejected = stats.rejected;
  return trace;
}

LatticeState bic_state(const ModelParams& params, int m, int lattice_size) {
  validate(params);
  if (params.n0 < 2 || m < 1 || m > params.n0 - 1) {
    throw FanoError(ErrorKind::IndexOutOfRange,
                    "resonance index m = " + std::to_string(m) + " not in 1..n0-1");
  }
  const double omega_m = -2.0 * params.kappa0 * std::cos(m * std::numbers::pi / params.n0);
  if (std::abs(params.omega_a - omega_m) > default_resonance_tolerance(params)) {
    throw FanoError(ErrorKind::ResonanceMismatch, "omega_a is not the resonance frequency of m = " +
                                                      std::to_string(m));
  }
  const int n_sites = lattice_size == 0 ? params.n0 : lattice_size;
  if (n_sites < params.n0) {
    throw FanoError(ErrorKind::IndexOutOfRange, "lattice must contain site n0");
  }
  LatticeState s;
  s.c = Eigen::VectorXcd::Zero(n_sites);
  for (int n = 1; n < params.n0; ++n) s.c[n - 1] = std::sin(m * std::numbers::pi * n / params.n0);
  s.ca = -(params.kappa0 / params.kappaa) * std::sin(m * std::numbers::pi * (params.n0 - 1) / params.n0);
  const double norm = std::sqrt(s.norm());
  s.c /= norm;
  s.ca /= norm;
  return s;
}

double hamiltonian_residual(const ModelParams& params, const LatticeState& state, double omega) {
  check_state(params, state);
  const Eigen::VectorXcd y = pack(state);
  Eigen::VectorXcd out(y.size());
  hamiltonian_packed(params, y, out);
  return (out - omega * y).norm();
}

Eigen::MatrixXd matrix_M(const ModelParams& params) {
  if (params.n0 < 2) throw FanoError(ErrorKind::IndexOutOfRange, "matrix M needs n0 >= 2");
  const int dim = params.n0 - 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i + 1 < dim; ++i) {
    m(i, i + 1) = -params.kappa0;
    m(i + 1, i) = -params.kappa0;
  }
  return m;
}

std::vector<std::pair<double, Eigen::VectorXd>> matrix_M_eigen(const ModelParams& params) {
  if (params.n0 < 2) throw FanoError(ErrorKind::IndexOutOfRange, "matrix M needs n0 >= 2");
  const std::vector<double> omegas = bic_frequencies(params);
  std::vector<std::pair<double, Eigen::VectorXd>> pairs;
  pairs.reserve(omegas.size());
  for (int m = 1; m < params.n0; ++m) {
    Eigen::VectorXd v(params.n0 - 1);
    for (int n = 1; n < params.n0; ++n) v[n - 1] = std::sin(m * std::numbers::pi * n / params.n0);
    pairs.emplace_back(omegas[static_cast<std::size_t>(m - 1)], std::move(v));
  }
  return pairs;
}

}  // namespace fano
