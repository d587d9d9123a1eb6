#pragma once

// Truncated Fock-space and qubit operator algebra.
//
// Basis conventions, used everywhere in the library:
//   * Fock index ascending, |0>, |1>, ..., |dim-1>.
//   * Qubit index 0 = ground |g>, index 1 = excited |e>.
//   * Composite spaces are ordered as written, the first factor is the most
//     significant index (Kronecker convention): |n, q> -> n * 2 + q.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aqec {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

namespace fock {

/// Ordered list of subsystem dimensions.
class SpaceSignature {
 public:
  SpaceSignature() = default;
  SpaceSignature(std::initializer_list<std::size_t> factors);
  explicit SpaceSignature(std::vector<std::size_t> factors);

  const std::vector<std::size_t>& factors() const noexcept { return factors_; }
  std::size_t num_factors() const noexcept { return factors_.size(); }
  std::size_t factor(std::size_t i) const { return factors_.at(i); }
  std::size_t dim() const noexcept { return dim_; }

  SpaceSignature concat(const SpaceSignature& other) const;

  friend bool operator==(const SpaceSignature&, const SpaceSignature&) = default;

 private:
  std::vector<std::size_t> factors_;
  std::size_t dim_ = 0;
};

std::string to_string(const SpaceSignature& s);

/// Throws DimensionError unless both signatures are equal.
void require_same_space(const SpaceSignature& a, const SpaceSignature& b, const char* where);

/// Dense operator on a truncated space. Immutable value type.
class Operator {
 public:
  Operator(SpaceSignature space, Matrix data);

  const SpaceSignature& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return data_; }
  std::size_t dim() const noexcept { return space_.dim(); }

  Operator adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;

  Operator operator+(const Operator& o) const;
  Operator operator-(const Operator& o) const;
  Operator operator*(const Operator& o) const;
  Operator operator*(cplx s) const;
  friend Operator operator*(cplx s, const Operator& op) { return op * s; }

 private:
  SpaceSignature space_;
  Matrix data_;
};

/// State vector. Not required to be normalized; see normalized()/is_normalized().
class Ket {
 public:
  Ket(SpaceSignature space, Vector amplitudes);

  const SpaceSignature& space() const noexcept { return space_; }
  const Vector& amplitudes() const noexcept { return amp_; }
  std::size_t dim() const noexcept { return space_.dim(); }

  double norm() const { return amp_.norm(); }
  bool is_normalized(double tol = 1e-10) const;
  Ket normalized() const;

  cplx inner(const Ket& other) const;  // <this|other>

 private:
  SpaceSignature space_;
  Vector amp_;
};

/// Validated density matrix: unit trace, Hermitian, positive semidefinite.
class DensityMatrix {
 public:
  struct Tolerances {
    double trace = 1e-8;
    double hermitian = 1e-10;
    double min_eigenvalue = -1e-8;
  };

  /// Validates; throws InvalidStateError on violation.
  DensityMatrix(SpaceSignature space, Matrix data);
  DensityMatrix(SpaceSignature space, Matrix data, const Tolerances& tol);

  /// Skips validation. For hot loops whose output is checked elsewhere.
  static DensityMatrix unchecked(SpaceSignature space, Matrix data);

  static DensityMatrix from_ket(const Ket& ket);

  const SpaceSignature& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return data_; }
  std::size_t dim() const noexcept { return space_.dim(); }

  cplx trace() const { return data_.trace(); }
  double purity() const;
  double min_eigenvalue() const;

 private:
  struct NoCheck {};
  DensityMatrix(SpaceSignature space, Matrix data, NoCheck);

  SpaceSignature space_;
  Matrix data_;
};

/// Checks the DensityMatrix invariants on a raw matrix without constructing one.
struct StateDiagnostics {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};
StateDiagnostics diagnose(const Matrix& rho);

// --- constructors -----------------------------------------------------------

Operator identity(const SpaceSignature& space);
Operator identity(std::size_t dim);
Operator zero(const SpaceSignature& space);

/// Ladder operator a on a mode truncated to `dim` levels, a|n> = sqrt(n)|n-1>.
Operator annihilation(std::size_t dim);
Operator creation(std::size_t dim);
Operator number(std::size_t dim);

/// sigma_- = |g><e| with index 0 = ground.
Operator qubit_lowering();
Operator qubit_raising();
/// sigma_z = |e><e| - |g><g|.
Operator qubit_sigma_z();

/// |n> in a mode of dimension dim.
Ket basis_ket(std::size_t dim, std::size_t n);
Ket basis_ket(const SpaceSignature& space, std::size_t index);

Operator tensor(const Operator& a, const Operator& b);
Ket tensor(const Ket& a, const Ket& b);
Operator tensor(std::initializer_list<Operator> ops);

/// Places `op` on factor `which` of `space`, identity elsewhere.
Operator embed(const Operator& op, const SpaceSignature& space, std::size_t which);

/// Outer product |ket><bra|.
Operator outer(const Ket& ket, const Ket& bra);

/// |psi><psi| for a normalized ket; throws NormalizationError otherwise.
Operator projector(const Ket& ket);

/// Tr(op rho).
cplx expectation(const Operator& op, const DensityMatrix& rho);
cplx expectation(const Operator& op, const Ket& ket);

/// Keeps factor `keep`, traces out every other factor.
Matrix partial_trace(const Matrix& rho, const SpaceSignature& space, std::size_t keep);

}  // namespace fock
}  // namespace aqec
