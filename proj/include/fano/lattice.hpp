#pragma once

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "fano/model.hpp"

namespace fano {

using Complex = std::complex<double>;

/// Amplitude of the level |a> and of sites 1..N (c[0] is site 1).
struct LatticeState {
  double t = 0.0;
  Complex ca{0.0, 0.0};
  Eigen::VectorXcd c;

  double norm() const { return std::norm(ca) + c.squaredNorm(); }
  int size() const { return static_cast<int>(c.size()); }
};

/// Complex on-site damping -i strength ((n - start) / (N - start))^power on
/// sites n >= start.
struct Absorber {
  int start = 0;
  double strength = 1.0;
  int power = 3;
};

struct SimConfig {
  /// Lattice size; 0 picks one from the light cone of t_max.
  int lattice_size = 0;
  double t_max = 200.0;
  double rk_tol = 1e-9;
  std::optional<Absorber> absorber;
  /// Spacing of the recorded time grid.
  double snapshot_stride = 0.1;
  /// Keep |c_n| for every recorded time.
  bool record_sites = true;
};

struct DecayTrace {
  std::vector<double> times;
  std::vector<Complex> ca_series;
  std::vector<double> norm_series;
  /// One row per recorded time, one column per site (|c_n|). Empty when
  /// sites were not recorded.
  Eigen::MatrixXd site_snapshots;
  /// Norm on sites n >= n0 that are not inside the absorber.
  std::vector<double> escaped_series;
  /// |c_a|^2 plus the norm on sites 1..n0-1.
  std::vector<double> trapped_series;
  int lattice_size = 0;
  std::optional<Absorber> absorber;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
};

/// Lattice size chosen when SimConfig::lattice_size is 0.
int default_lattice_size(const ModelParams& params, const SimConfig& config);

/// Absorber covering the last quarter of an N-site lattice, strength kappa0, cubic ramp.
Absorber default_absorber(const ModelParams& params, int lattice_size);

/// Fills in the lattice size and checks N > n0 + 2 and absorber.start > n0.
SimConfig resolve(const ModelParams& params, SimConfig config);

/// Time derivative of the coupled amplitudes (with c_{N+1} = 0).
LatticeState rhs(const ModelParams& params, const LatticeState& state,
                 const std::optional<Absorber>& absorber = std::nullopt);

/// H psi for the lattice Hamiltonian (no absorber): i d/dt psi = H psi.
LatticeState apply_hamiltonian(const ModelParams& params, const LatticeState& state);

/// Evolves c_a(0) = 1, c_n(0) = 0 to config.t_max.
DecayTrace simulate(const ModelParams& params, const SimConfig& config);

/// Evolves an arbitrary initial state; its site count fixes the lattice
/// size. Time is measured from initial.t.
DecayTrace evolve(const ModelParams& params, const LatticeState& initial, const SimConfig& config);

/// Normalized embedded eigenstate for resonance m on a lattice of
/// `lattice_size` sites (defaults to n0). Throws IndexOutOfRange or
/// ResonanceMismatch.
LatticeState bic_state(const ModelParams& params, int m, int lattice_size = 0);

/// || H psi - omega psi ||.
double hamiltonian_residual(const ModelParams& params, const LatticeState& state, double omega);

/// Closed-form eigenpairs of the (n0-1)x(n0-1) hopping matrix of the sites
/// between the boundary and the attachment site, ordered by m.
std::vector<std::pair<double, Eigen::VectorXd>> matrix_M_eigen(const ModelParams& params);

/// The hopping matrix itself (zero diagonal, -kappa0 off-diagonal).
Eigen::MatrixXd matrix_M(const ModelParams& params);

}  // namespace fano
