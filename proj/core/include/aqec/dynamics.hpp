#pragma once

// Lindblad master-equation evolution and its Monte-Carlo wavefunction
// unraveling. Dissipators follow the convention
//
//   d rho/dt = -i[H, rho] + sum_k (rate_k / 2) D[L_k] rho,
//   D[x] rho = 2 x rho x^dag - x^dag x rho - rho x^dag x,
//
// so `rate` is the population decay rate of a single jump channel.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aqec/fock.hpp"
#include "aqec/integrator.hpp"

namespace aqec::dyn {

using fock::DensityMatrix;
using fock::Ket;
using fock::Operator;
using fock::SpaceSignature;

struct Jump {
  Operator op;
  double rate = 0.0;
  std::string label;
};

/// Jump operators with rates; validated on construction (rates >= 0, one space).
class NoiseChannel {
 public:
  NoiseChannel() = default;
  explicit NoiseChannel(std::vector<Jump> jumps);

  const std::vector<Jump>& jumps() const noexcept { return jumps_; }
  bool empty() const noexcept { return jumps_.empty(); }
  std::size_t size() const noexcept { return jumps_.size(); }

 private:
  std::vector<Jump> jumps_;
};

/// Precomputed generator pieces: H_nh = H - (i/2) sum_k rate_k L_k^dag L_k.
class Lindbladian {
 public:
  Lindbladian(const Operator& hamiltonian, const NoiseChannel& channel);

  const SpaceSignature& space() const noexcept { return space_; }
  const Matrix& effective_hamiltonian() const noexcept { return h_nh_; }
  const Matrix& hamiltonian() const noexcept { return h_; }
  const std::vector<Matrix>& jump_matrices() const noexcept { return jumps_; }
  const std::vector<Matrix>& jump_matrices_adjoint() const noexcept { return jumps_adj_; }
  const std::vector<double>& rates() const noexcept { return rates_; }

  /// d rho/dt by direct matrix products.
  Matrix apply(const Matrix& rho) const;
  /// d psi/dt = -i H_nh psi (no-jump drift).
  Vector drift(const Vector& psi) const;

 private:
  SpaceSignature space_;
  Matrix h_;
  Matrix h_nh_;
  std::vector<Matrix> jumps_;
  std::vector<Matrix> jumps_adj_;
  std::vector<double> rates_;
};

/// Right-hand side of the master equation for a given state.
Matrix lindblad_rhs(const Operator& hamiltonian, const NoiseChannel& channel,
                    const DensityMatrix& rho);

/// An open system whose factor `mode_factor` is the encoding mode; every other
/// factor is an ancilla prepared in its ground state (index 0).
struct Model {
  SpaceSignature space;
  Operator hamiltonian;
  NoiseChannel noise;
  std::size_t mode_factor = 0;

  std::size_t mode_dim() const { return space.factor(mode_factor); }
  /// rho_mode (x) |0..0><0..0| on the ancillas.
  Matrix embed(const Matrix& rho_mode) const;
  Ket embed(const Ket& psi_mode) const;
  /// Partial trace onto the encoding mode.
  Matrix reduce(const Matrix& rho_full) const;
};

/// Mode (x) qubit model with H = g (L sigma+ + L^dag sigma-) and loss channels
/// {(a (x) 1, gamma_a), (1 (x) sigma-, gamma_b)}. `loss` overrides a when given.
Model aqec_model(const Operator& engineered_jump, double g, double gamma_a, double gamma_b,
                 const std::optional<Operator>& loss = std::nullopt);

/// Mode-only model with photon loss at gamma_a and nothing else.
Model photon_loss_model(std::size_t mode_dim, double gamma_a);

struct EvolveOptions {
  integrate::Tolerances tol{};
  /// Re-symmetrize (rho + rho^dag)/2 after each accepted step.
  bool hermitize = true;
};

struct EvolutionStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  double max_trace_drift = 0.0;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  EvolutionStats stats;
};

/// Validates a time grid: non-empty, starts at 0, strictly increasing.
void require_time_grid(std::span<const double> t_grid);

/// Adaptive Dormand-Prince 5(4) integration sampled on t_grid.
EvolutionResult evolve(const DensityMatrix& rho0, const Operator& hamiltonian,
                       const NoiseChannel& channel, std::span<const double> t_grid,
                       const EvolveOptions& options = {});
EvolutionResult evolve(const DensityMatrix& rho0, const Lindbladian& generator,
                       std::span<const double> t_grid, const EvolveOptions& options = {});

/// Fixed-step classical RK4 with `substeps` steps per grid interval. Cross-check path.
EvolutionResult evolve_rk4(const DensityMatrix& rho0, const Lindbladian& generator,
                           std::span<const double> t_grid, std::size_t substeps);

/// Uniform grid 0, dt, ..., t_end (t_end included; n_intervals >= 1).
std::vector<double> uniform_grid(double t_end, std::size_t n_intervals);

// --- exact propagation ---------------------------------------------------------

/// exp(L t) for a time-independent generator, restricted to the matrix elements
/// reachable from a set of seed states and block-diagonalized by the connected
/// components of the superoperator's sparsity graph.
class BlockPropagator {
 public:
  BlockPropagator(const Lindbladian& generator, std::span<const Matrix> seeds, double t);

  /// Propagates rho; throws DimensionError if rho has support outside the
  /// reachable set.
  Matrix apply(const Matrix& rho) const;

  std::size_t reachable_size() const noexcept { return reachable_; }
  std::vector<std::size_t> block_sizes() const;

 private:
  struct Block {
    std::vector<std::size_t> indices;  // column-major vec indices into rho
    Matrix propagator;
  };
  std::size_t dim_;
  std::size_t reachable_ = 0;
  std::vector<Block> blocks_;
  std::vector<char> in_reach_;
};

// --- Monte-Carlo wavefunction ---------------------------------------------------

struct JumpEvent {
  double time = 0.0;
  std::size_t channel = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Ket> kets;
  std::vector<JumpEvent> jumps;
};

struct McwfOptions {
  integrate::Tolerances tol{1e-8, 1e-10};
  /// Relative tolerance on the jump time located by bisection.
  double jump_time_rtol = 1e-10;
};

/// First-order MCWF: integrate the no-jump drift until the squared norm drops
/// below a uniform threshold, then jump with probability proportional to
/// rate_k ||L_k psi||^2. Deterministic in `seed`.
Trajectory mcwf_trajectory(const Ket& psi0, const Lindbladian& generator,
                           std::span<const double> t_grid, std::uint64_t seed,
                           const McwfOptions& options = {});
Trajectory mcwf_trajectory(const Ket& psi0, const Operator& hamiltonian,
                           const NoiseChannel& channel, std::span<const double> t_grid,
                           std::uint64_t seed, const McwfOptions& options = {});

/// Per-trajectory seed derived from (master seed, trajectory index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct AveragedCurve {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

/// Pointwise mean and standard error of `extract(times[i], ket_i)` over an ensemble.
AveragedCurve average_trajectories(std::span<const Trajectory> trajectories,
                                   const std::function<double(const Ket&)>& extract);
/// Same, for curves already reduced to one value per sample.
AveragedCurve average_curves(std::span<const std::vector<double>> curves,
                             std::span<const double> times);

/// Runs `count` trajectories with derived seeds on up to `threads` workers.
std::vector<Trajectory> run_trajectories(const Ket& psi0, const Lindbladian& generator,
                                         std::span<const double> t_grid, std::size_t count,
                                         std::uint64_t master_seed, unsigned threads = 1,
                                         const McwfOptions& options = {});

// --- serialization -----------------------------------------------------------------

struct NamedObservable {
  std::string name;
  Operator op;
};

/// CSV with columns t,<name>... holding Re Tr(op rho(t)).
void write_csv(std::ostream& os, const EvolutionResult& result,
               std::span<const NamedObservable> observables);
/// CSV with columns t,<name>... holding <psi|op|psi>/<psi|psi> per sample.
void write_csv(std::ostream& os, const Trajectory& trajectory,
               std::span<const NamedObservable> observables);

nlohmann::json to_json(const EvolutionResult& result,
                       std::span<const NamedObservable> observables);
nlohmann::json to_json(const Trajectory& trajectory,
                       std::span<const NamedObservable> observables);

}  // namespace aqec::dyn
