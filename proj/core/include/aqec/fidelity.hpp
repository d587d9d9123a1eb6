#pragma once

// Fidelity metrics: pure-reference overlap, six-state and sphere-averaged
// mean fidelity, closed-form baselines, and the windowed-maximum
// ("coarse-grained") fidelity.

#include <array>
#include <cmath>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "aqec/codes.hpp"
#include "aqec/dynamics.hpp"

namespace aqec::fidelity {

using codes::CodePair;
using fock::DensityMatrix;
using fock::Ket;

/// Map from an input mode density matrix to the output at a fixed time.
using Channel = std::function<Matrix(const Matrix&)>;

/// Coherence decay rate of the RL code in the strong-recovery limit, 3 - 2 sqrt2.
inline const double kRlDecayRate = 3.0 - 2.0 * std::sqrt(2.0);

/// Tr(rho0 rho_t) clipped to [0, 1]. rho0 must be pure (purity 1 +- 1e-8).
double state_fidelity(const DensityMatrix& rho0, const DensityMatrix& rho_t);
/// <psi|rho|psi> clipped to [0, 1]; psi normalized.
double state_fidelity(const Ket& psi, const Matrix& rho);

/// rho_{+-j} = (sigma0 +- sigma_j)/2 in the order +x, -x, +y, -y, +z, -z.
std::array<Matrix, 6> six_states(const CodePair& code);

/// The six summands Tr(rho_j M[rho_j]). Throws InvalidStateError if the
/// channel changes a trace by more than 1e-6.
std::array<double, 6> six_observations(const Channel& channel, const CodePair& code);
double mean_fidelity_six(const Channel& channel, const CodePair& code);

/// Gauss-Legendre nodes/weights on [-1, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(std::size_t n);

/// (1/4pi) * integral of F(theta, phi) over the sphere, Gauss-Legendre in
/// cos(theta) and uniform in phi; n_theta, n_phi >= 16.
double mean_fidelity_sphere(const Channel& channel, const CodePair& code, std::size_t n_theta,
                            std::size_t n_phi);

double break_even_mean_fidelity(double gamma_t);
double rl_analytic_mean_fidelity(double gamma_t, double u = kRlDecayRate);
double rl_analytic_state_fidelity(double theta, double phi, double gamma_t,
                                  double u = kRlDecayRate);

struct FidelityCurve {
  std::vector<double> times;
  std::vector<double> mean;
  /// Optional, same length as times when present.
  std::vector<double> min;
  std::vector<double> max;
};

/// F*_tau(t_i) = max over samples t_j in [t_i, t_i + tau]. Applies to every
/// populated column. Requires the largest sample spacing to be <= tau/6.
FidelityCurve coarse_grained(const FidelityCurve& curve, double tau);

/// Trajectory-wise version: each curve is coarse-grained, then the ensemble is
/// averaged. Returns the mean curve.
std::vector<double> coarse_grained_average(std::span<const std::vector<double>> curves,
                                           std::span<const double> times, double tau);

/// Output of a time-independent channel on the whole code space, obtained by
/// evolving the six Pauli eigenstates and reconstructing by linearity.
class CodeSpaceEvolution {
 public:
  CodeSpaceEvolution(const dyn::Model& model, const CodePair& code, std::span<const double> t_grid,
                     const dyn::EvolveOptions& options = {}, unsigned threads = 1);
  /// Builds the six outputs from a precomputed channel at a single time.
  CodeSpaceEvolution(const Channel& channel, const CodePair& code);
  /// outputs[i][j]: reduced output of six-state input j at times[i].
  CodeSpaceEvolution(const CodePair& code, std::vector<double> times, std::vector<std::array<Matrix, 6>> outputs);

  const std::vector<double>& times() const noexcept { return times_; }
  const CodePair& code() const noexcept { return code_; }

  /// Reduced mode state for Bloch input (theta, phi) at sample i.
  Matrix output(double theta, double phi, std::size_t i) const;
  double state_fidelity(double theta, double phi, std::size_t i) const;
  double mean_fidelity(std::size_t i) const;
  std::array<double, 6> observations(std::size_t i) const;

  /// Mean curve; with grid > 0 also min/max over a grid x grid (theta, phi) lattice.
  FidelityCurve curve(std::size_t grid = 0) const;

  struct BlochSample {
    double theta;
    double phi;
    double fidelity;
  };
  std::vector<BlochSample> bloch_grid(std::size_t i, std::size_t n_theta, std::size_t n_phi) const;

  /// Largest trace drift over all six evolutions.
  double max_trace_drift() const noexcept { return drift_; }

 private:
  CodePair code_;
  std::vector<double> times_;
  std::array<Matrix, 6> inputs_;
  /// outputs_[i][j]: output of state j at sample i.
  std::vector<std::array<Matrix, 6>> outputs_;
  double drift_ = 0.0;
};

/// Exact propagation of the six embedded inputs on uniform_grid(t_end, intervals):
/// exp(L dt) on the reachable blocks, applied repeatedly. Preferred for stiff
/// generators.
CodeSpaceEvolution propagate_code_space(const dyn::Model& model, const CodePair& code, double t_end,
                                        std::size_t intervals);

/// Columns t, F_mean[, F_min, F_max] with a units comment.
void write_csv(std::ostream& os, const FidelityCurve& curve, const char* time_unit = "1/gamma_a");
void write_bloch_csv(std::ostream& os, std::span<const CodeSpaceEvolution::BlochSample> samples);

}  // namespace aqec::fidelity
