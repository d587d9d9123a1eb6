#pragma once

// Bosonic codewords, engineered recovery jumps, logical Paulis and
// Knill-Laflamme diagnostics.
//
// Codeword convention: |0_L> lives on the |4n> ladder and |1_L> on |4n+2>.
// For the RL code this gives |0_L> = |4>, |1_L> = |2>.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aqec/fock.hpp"

namespace aqec::codes {

using fock::Ket;
using fock::Operator;
using fock::SpaceSignature;

class CodePair {
 public:
  /// Validates normalization and mutual orthogonality (1e-10).
  CodePair(Ket zero_logical, Ket one_logical, std::string name = {});

  const Ket& zero() const noexcept { return zero_; }
  const Ket& one() const noexcept { return one_; }
  const SpaceSignature& space() const noexcept { return zero_.space(); }
  std::size_t dim() const noexcept { return zero_.dim(); }
  const std::string& name() const noexcept { return name_; }

  /// Set for codes whose error basis is only partially defined (a vacuum codeword).
  bool kl_degenerate() const noexcept { return kl_degenerate_; }
  CodePair with_kl_degenerate(bool flag) const;

  /// Code-space average of <a^dag a>: (<0_L|n|0_L> + <1_L|n|1_L>) / 2.
  double mean_photon_number() const;
  /// Highest Fock level with nonzero amplitude in either codeword.
  std::size_t highest_level() const;

  /// cos(theta/2)|0_L> + e^{i phi} sin(theta/2)|1_L>.
  Ket bloch_state(double theta, double phi) const;

 private:
  Ket zero_;
  Ket one_;
  std::string name_;
  bool kl_degenerate_ = false;
};

/// |0_L> = sum c0[n]|4n>, |1_L> = sum c1[n]|4n+2>, mode truncated at `truncation`
/// photons (dimension truncation + 1). Coefficients must have unit norm (1e-10).
CodePair code_pair_from_coeffs(std::span<const double> c0, std::span<const double> c1,
                               std::size_t truncation, std::string name = {});

/// Named codes.
CodePair rl_code(std::size_t truncation = 6);        // |4>, |2>
CodePair binomial_code(std::size_t truncation = 6);  // (|0>+|4>)/sqrt2, |2>
CodePair break_even_code(std::size_t truncation = 3);  // |0>, |1>, no correction
/// |0_L> = |m+2>, |1_L> = |m>; flagged kl_degenerate for m = 0.
CodePair shifted_fock_code(std::size_t m, std::size_t truncation);

/// Truncation satisfying the guard rule: two empty levels above the code.
std::size_t guarded_truncation(std::size_t highest_level);

struct ErrorBasis {
  Ket zero_error;
  Ket one_error;
  double xi0 = 0.0;
  double xi1 = 0.0;
};

/// |u_er> = a|u_L>/xi_u with xi_u = sqrt(<u_L|a^dag a|u_L>). Throws
/// UndefinedErrorBasis when either xi_u vanishes.
ErrorBasis error_basis(const CodePair& code);

/// L_eng = L_o / sqrt(Tr[L_o^dag L_o]), L_o = |0_L><0_er| + |1_L><1_er|.
Operator engineered_jump(const CodePair& code);
/// As engineered_jump, but keeps only branches with xi_u > 0 (used for the
/// flagged m = 0 shifted code). Throws when no branch is defined.
Operator partial_engineered_jump(const CodePair& code);

/// (sqrt2 |2><1| + |4><3|) / sqrt3 on a mode of dimension `dim` (>= 5).
Operator naive_jump(std::size_t dim = 7);

/// a_1 = (2 - sqrt2)|1><2|; a + a_1 satisfies the KL diagonal condition on the RL code.
Operator kl_compensator(std::size_t dim = 7);

struct LogicalPaulis {
  Operator identity;  // sigma_0 = |0_L><0_L| + |1_L><1_L|
  Operator x;
  Operator y;
  Operator z;  // |1_L><1_L| - |0_L><0_L|
};
LogicalPaulis logical_paulis(const CodePair& code);

/// max |d| over nonzero elements <n|op|n+d> (threshold 1e-10). Mode operators only.
int hamiltonian_distance(const Operator& op, double threshold = 1e-10);

struct KLReport {
  /// alpha[j][i] = <0_L|E_j^dag E_i|0_L> and the same for |1_L>, per error pair.
  std::vector<std::vector<cplx>> alpha_zero;
  std::vector<std::vector<cplx>> alpha_one;
  double offdiag_violation = 0.0;  // max |<0_L|E_j^dag E_i|1_L>|
  double diag_violation = 0.0;     // max |<0_L|E_j^dag E_i|0_L> - <1_L|E_j^dag E_i|1_L>|
};

/// Knill-Laflamme diagnostics; an empty error list means {I, a}.
KLReport kl_check(const CodePair& code, std::span<const Operator> errors = {});

// --- coefficient files ------------------------------------------------------

/// {"c0": [...], "c1": [...], "truncation": N, "name": optional}.
/// A code named "sqrt3" must have mean photon number sqrt(3) +- 1e-6.
CodePair code_from_json(const nlohmann::json& j);
CodePair load_code_file(const std::filesystem::path& path);

}  // namespace aqec::codes
