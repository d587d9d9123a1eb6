#pragma once

// Reduced models of the engineered-dissipation scheme: the qubit-eliminated
// master equation, the five-level population/coherence ODEs, and their
// first-order closed forms in 1/lambda.
//
// Five-level ODEs are in units of gamma_a. Only rho00..rho44, rho24 and rho13
// are tracked; rho00 follows from trace conservation (d rho00/dt = rho11 for
// every variant). Coherences like rho02 that the loss channel feeds but that
// never couple back are dropped.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqec/codes.hpp"
#include "aqec/dynamics.hpp"

namespace aqec::effective {

using fock::Operator;

struct EffectiveParams {
  double lambda = 0.0;
  double gamma_a = 1.0;
  double cooperativity() const { return lambda / 8.0; }
};

/// lambda = 8 g^2 / (gamma_a gamma_b). Throws on nonpositive inputs.
EffectiveParams effective_lambda(double g, double gamma_a, double gamma_b);

/// gamma_a (a rho a^dag - ...) + gamma_a lambda (L rho L^dag - ...). `loss`
/// replaces a when given (e.g. a + a_1).
Matrix effective_rhs(const fock::DensityMatrix& rho, const EffectiveParams& params, const Operator& jump,
                     const std::optional<Operator>& loss = std::nullopt);

/// Mode-only model with the two dissipators above and no Hamiltonian.
dyn::Model effective_model(const Operator& jump, const EffectiveParams& params,
                           const std::optional<Operator>& loss = std::nullopt);

enum class Variant { rl, naive, kl_modified };
Variant parse_variant(const std::string& s);
std::string to_string(Variant v);

/// Jump and loss operators matching a variant on a mode of dimension dim.
Operator variant_jump(Variant v, std::size_t dim = 7);
Operator variant_loss(Variant v, std::size_t dim = 7);

struct FiveLevelState {
  std::array<double, 5> diag{};  // rho00 .. rho44
  cplx rho24{};
  cplx rho13{};

  cplx rho42() const { return std::conj(rho24); }
  cplx rho31() const { return std::conj(rho13); }

  /// Embeds into a dim x dim density matrix (dim >= 5).
  Matrix to_matrix(std::size_t dim = 5) const;
  static FiveLevelState from_matrix(const Matrix& rho);
  /// cos(theta/2)|0_L> + e^{i phi} sin(theta/2)|1_L> with |0_L> = |4>, |1_L> = |2>.
  static FiveLevelState bloch(double theta, double phi);
};

FiveLevelState five_level_rhs(const FiveLevelState& s, double lambda, Variant v);

std::vector<FiveLevelState> five_level_evolve(const FiveLevelState& initial, double lambda, Variant v,
                                              std::span<const double> t_grid,
                                              const integrate::Tolerances& tol = {1e-10, 1e-12});

struct AnalyticResult {
  FiveLevelState state;
  /// False when lambda < 100: the expansion is evaluated but outside its regime.
  bool asymptotic = true;
};

/// First-order closed forms in 1/lambda and gamma_a t/lambda. The initial state
/// must be supported on {|2>, |4>}.
AnalyticResult analytic_elements(const FiveLevelState& initial, double lambda, double gamma_t, Variant v);

/// lambda -> infinity limit: populations frozen, rho24 damped by exp(-u gamma_a t).
fock::DensityMatrix limit_density(const fock::DensityMatrix& initial, double gamma_t, double u);

/// Coherence decay rate of the limit density for a variant (0 for kl_modified).
double limit_decay_rate(Variant v);

/// Code-space average single-photon jump rate of the |m>, |m+2> code: (m+1) gamma_a.
double mean_jump_probability(std::size_t m, double gamma_a);

struct ShiftedCodeRow {
  std::size_t m = 0;
  double mean_fidelity = 0.0;
  /// min over phi of F(pi/2, phi, t).
  double equator_fidelity = 0.0;
  bool kl_degenerate = false;
  /// Equator fidelity below the break-even mean fidelity.
  bool invalid = false;
};

/// Full mode (x) qubit simulation per m at time t. Truncation is m + 5.
std::vector<ShiftedCodeRow> shifted_code_sweep(std::span<const std::size_t> ms, double g, double gamma_a,
                                               double gamma_b, double t, unsigned threads = 1);

}  // namespace aqec::effective
