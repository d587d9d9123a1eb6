#include "aqec/fock.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "aqec/error.hpp"

namespace aqec::fock {

namespace {

std::size_t product(const std::vector<std::size_t>& f) {
  return std::accumulate(f.begin(), f.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

SpaceSignature::SpaceSignature(std::initializer_list<std::size_t> factors)
    : SpaceSignature(std::vector<std::size_t>(factors)) {}

SpaceSignature::SpaceSignature(std::vector<std::size_t> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) throw DimensionError("space signature needs at least one factor");
  for (auto d : factors_) {
    if (d < 1) throw DimensionError("space factor dimension must be >= 1");
  }
  dim_ = product(factors_);
}

SpaceSignature SpaceSignature::concat(const SpaceSignature& other) const {
  std::vector<std::size_t> f = factors_;
  f.insert(f.end(), other.factors_.begin(), other.factors_.end());
  return SpaceSignature(std::move(f));
}

std::string to_string(const SpaceSignature& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.num_factors(); ++i) {
    if (i) os << ',';
    os << s.factor(i);
  }
  os << ']';
  return os.str();
}

void require_same_space(const SpaceSignature& a, const SpaceSignature& b, const char* where) {
  if (!(a == b)) {
    throw DimensionError(std::string(where) + ": space mismatch " + to_string(a) + " vs " +
                         to_string(b));
  }
}

// --- Operator ----------------------------------------------------------------

Operator::Operator(SpaceSignature space, Matrix data)
    : space_(std::move(space)), data_(std::move(data)) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (data_.rows() != d || data_.cols() != d) {
    throw DimensionError("operator matrix " + std::to_string(data_.rows()) + "x" +
                         std::to_string(data_.cols()) + " does not match space " +
                         to_string(space_));
  }
}

Operator Operator::adjoint() const { return Operator(space_, data_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  return (data_ - data_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator Operator::operator+(const Operator& o) const {
  require_same_space(space_, o.space_, "Operator::operator+");
  return Operator(space_, data_ + o.data_);
}

Operator Operator::operator-(const Operator& o) const {
  require_same_space(space_, o.space_, "Operator::operator-");
  return Operator(space_, data_ - o.data_);
}

Operator Operator::operator*(const Operator& o) const {
  require_same_space(space_, o.space_, "Operator::operator*");
  return Operator(space_, data_ * o.data_);
}

Operator Operator::operator*(cplx s) const { return Operator(space_, data_ * s); }

// --- Ket ---------------------------------------------------------------------

Ket::Ket(SpaceSignature space, Vector amplitudes)
    : space_(std::move(space)), amp_(std::move(amplitudes)) {
  if (amp_.size() != static_cast<Eigen::Index>(space_.dim())) {
    throw DimensionError("ket length " + std::to_string(amp_.size()) +
                         " does not match space " + to_string(space_));
  }
}

bool Ket::is_normalized(double tol) const { return std::abs(amp_.norm() - 1.0) <= tol; }

Ket Ket::normalized() const {
  const double n = amp_.norm();
  if (n == 0.0) throw NormalizationError("cannot normalize the zero vector");
  return Ket(space_, amp_ / n);
}

cplx Ket::inner(const Ket& other) const {
  require_same_space(space_, other.space_, "Ket::inner");
  return amp_.dot(other.amp_);  // Eigen's dot conjugates the left operand
}

// --- DensityMatrix -----------------------------------------------------------

StateDiagnostics diagnose(const Matrix& rho) {
  StateDiagnostics d;
  d.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
  d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  Matrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

DensityMatrix::DensityMatrix(SpaceSignature space, Matrix data)
    : DensityMatrix(std::move(space), std::move(data), Tolerances{}) {}

DensityMatrix::DensityMatrix(SpaceSignature space, Matrix data, const Tolerances& tol)
    : space_(std::move(space)), data_(std::move(data)) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (data_.rows() != d || data_.cols() != d) {
    throw DimensionError("density matrix does not match space " + to_string(space_));
  }
  const auto diag = diagnose(data_);
  if (diag.trace_error > tol.trace) {
    throw InvalidStateError("density matrix trace off by " + std::to_string(diag.trace_error));
  }
  if (diag.hermiticity_error > tol.hermitian) {
    throw InvalidStateError("density matrix not Hermitian (" +
                            std::to_string(diag.hermiticity_error) + ")");
  }
  if (diag.min_eigenvalue < tol.min_eigenvalue) {
    throw InvalidStateError("density matrix has negative eigenvalue " +
                            std::to_string(diag.min_eigenvalue));
  }
}

DensityMatrix::DensityMatrix(SpaceSignature space, Matrix data, NoCheck)
    : space_(std::move(space)), data_(std::move(data)) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (data_.rows() != d || data_.cols() != d) {
    throw DimensionError("density matrix does not match space " + to_string(space_));
  }
}

DensityMatrix DensityMatrix::unchecked(SpaceSignature space, Matrix data) {
  return DensityMatrix(std::move(space), std::move(data), NoCheck{});
}

DensityMatrix DensityMatrix::from_ket(const Ket& ket) {
  return DensityMatrix(ket.space(), projector(ket).matrix());
}

double DensityMatrix::purity() const { return (data_ * data_).trace().real(); }

double DensityMatrix::min_eigenvalue() const { return diagnose(data_).min_eigenvalue; }

// --- constructors ------------------------------------------------------------

Operator identity(const SpaceSignature& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  return Operator(space, Matrix::Identity(d, d));
}

Operator identity(std::size_t dim) { return identity(SpaceSignature{dim}); }

Operator zero(const SpaceSignature& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  return Operator(space, Matrix::Zero(d, d));
}

Operator annihilation(std::size_t dim) {
  if (dim < 2) throw DimensionError("annihilation operator needs dim >= 2");
  Matrix a = Matrix::Zero(dim, dim);
  for (std::size_t n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(SpaceSignature{dim}, std::move(a));
}

Operator creation(std::size_t dim) { return annihilation(dim).adjoint(); }

Operator number(std::size_t dim) {
  if (dim < 1) throw DimensionError("number operator needs dim >= 1");
  Matrix n = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return Operator(SpaceSignature{dim}, std::move(n));
}

Operator qubit_lowering() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return Operator(SpaceSignature{2}, std::move(s));
}

Operator qubit_raising() { return qubit_lowering().adjoint(); }

Operator qubit_sigma_z() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = -1.0;
  s(1, 1) = 1.0;
  return Operator(SpaceSignature{2}, std::move(s));
}

Ket basis_ket(std::size_t dim, std::size_t n) { return basis_ket(SpaceSignature{dim}, n); }

Ket basis_ket(const SpaceSignature& space, std::size_t index) {
  if (index >= space.dim()) {
    throw DimensionError("basis index " + std::to_string(index) + " outside space " +
                         to_string(space));
  }
  Vector v = Vector::Zero(space.dim());
  v(index) = 1.0;
  return Ket(space, std::move(v));
}

Operator tensor(const Operator& a, const Operator& b) {
  Matrix k = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return Operator(a.space().concat(b.space()), std::move(k));
}

Ket tensor(const Ket& a, const Ket& b) {
  Vector k = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval();
  return Ket(a.space().concat(b.space()), std::move(k));
}

Operator tensor(std::initializer_list<Operator> ops) {
  if (ops.size() == 0) throw DimensionError("tensor of an empty operator list");
  auto it = ops.begin();
  Operator acc = *it++;
  for (; it != ops.end(); ++it) acc = tensor(acc, *it);
  return acc;
}

Operator embed(const Operator& op, const SpaceSignature& space, std::size_t which) {
  if (which >= space.num_factors()) throw DimensionError("embed: factor index out of range");
  if (op.dim() != space.factor(which)) {
    throw DimensionError("embed: operator dimension " + std::to_string(op.dim()) +
                         " does not match factor " + std::to_string(space.factor(which)));
  }
  std::size_t before = 1;
  std::size_t after = 1;
  for (std::size_t i = 0; i < which; ++i) before *= space.factor(i);
  for (std::size_t i = which + 1; i < space.num_factors(); ++i) after *= space.factor(i);
  Matrix left = Matrix::Identity(before, before);
  Matrix right = Matrix::Identity(after, after);
  Matrix k = Eigen::kroneckerProduct(Eigen::kroneckerProduct(left, op.matrix()).eval(), right)
                 .eval();
  return Operator(space, std::move(k));
}

Operator outer(const Ket& ket, const Ket& bra) {
  require_same_space(ket.space(), bra.space(), "outer");
  return Operator(ket.space(), ket.amplitudes() * bra.amplitudes().adjoint());
}

Operator projector(const Ket& ket) {
  if (!ket.is_normalized()) {
    throw NormalizationError("projector: ket norm " + std::to_string(ket.norm()) + " != 1");
  }
  return outer(ket, ket);
}

cplx expectation(const Operator& op, const DensityMatrix& rho) {
  require_same_space(op.space(), rho.space(), "expectation");
  // Tr(A B) = sum_ij A_ij B_ji without forming the product.
  return op.matrix().cwiseProduct(rho.matrix().transpose()).sum();
}

cplx expectation(const Operator& op, const Ket& ket) {
  require_same_space(op.space(), ket.space(), "expectation");
  return ket.amplitudes().dot(op.matrix() * ket.amplitudes());
}

Matrix partial_trace(const Matrix& rho, const SpaceSignature& space, std::size_t keep) {
  if (keep >= space.num_factors()) throw DimensionError("partial_trace: factor out of range");
  const auto d = static_cast<Eigen::Index>(space.dim());
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("partial_trace: shape mismatch");
  std::size_t before = 1;
  std::size_t after = 1;
  for (std::size_t i = 0; i < keep; ++i) before *= space.factor(i);
  for (std::size_t i = keep + 1; i < space.num_factors(); ++i) after *= space.factor(i);
  const std::size_t k = space.factor(keep);
  Matrix out = Matrix::Zero(k, k);
  for (std::size_t b = 0; b < before; ++b) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t row0 = (b * k + i) * after;
        const std::size_t col0 = (b * k + j) * after;
        cplx s = 0.0;
        for (std::size_t a = 0; a < after; ++a) s += rho(row0 + a, col0 + a);
        out(i, j) += s;
      }
    }
  }
  return out;
}

}  // namespace aqec::fock
