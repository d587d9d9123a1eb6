#include "aqec/codes.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "aqec/error.hpp"

namespace aqec::codes {

namespace {

constexpr double kNormTol = 1e-10;

double xi(const Ket& k) {
  const auto n = k.dim();
  return (fock::annihilation(n).matrix() * k.amplitudes()).norm();
}

Ket mode_ket(std::size_t dim, const std::vector<std::pair<std::size_t, double>>& amps) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& [n, c] : amps) v(static_cast<Eigen::Index>(n)) = c;
  return Ket(SpaceSignature{dim}, std::move(v));
}

}  // namespace

CodePair::CodePair(Ket zero_logical, Ket one_logical, std::string name)
    : zero_(std::move(zero_logical)), one_(std::move(one_logical)), name_(std::move(name)) {
  fock::require_same_space(zero_.space(), one_.space(), "CodePair");
  if (zero_.space().num_factors() != 1) throw DimensionError("CodePair: codewords must live on a single mode");
  if (!zero_.is_normalized(kNormTol) || !one_.is_normalized(kNormTol)) {
    throw NormalizationError("CodePair: codewords must be normalized");
  }
  if (std::abs(zero_.inner(one_)) > kNormTol) {
    throw NormalizationError("CodePair: codewords are not orthogonal");
  }
}

CodePair CodePair::with_kl_degenerate(bool flag) const {
  CodePair c = *this;
  c.kl_degenerate_ = flag;
  return c;
}

double CodePair::mean_photon_number() const {
  const auto n = fock::number(dim());
  return 0.5 * (fock::expectation(n, zero_).real() + fock::expectation(n, one_).real());
}

std::size_t CodePair::highest_level() const {
  std::size_t top = 0;
  for (std::size_t n = 0; n < dim(); ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    if (std::abs(zero_.amplitudes()(i)) > kNormTol || std::abs(one_.amplitudes()(i)) > kNormTol) top = n;
  }
  return top;
}

Ket CodePair::bloch_state(double theta, double phi) const {
  const Vector v = std::cos(theta / 2) * zero_.amplitudes() +
                   std::polar(1.0, phi) * std::sin(theta / 2) * one_.amplitudes();
  return Ket(space(), v);
}

CodePair code_pair_from_coeffs(std::span<const double> c0, std::span<const double> c1,
                               std::size_t truncation, std::string name) {
  auto check = [](std::span<const double> c, const char* which) {
    double s = 0.0;
    for (double x : c) s += x * x;
    if (c.empty() || std::abs(std::sqrt(s) - 1.0) > kNormTol) {
      throw NormalizationError(std::string("coefficients ") + which + " must have unit 2-norm");
    }
  };
  check(c0, "c0");
  check(c1, "c1");
  const std::size_t top0 = 4 * (c0.size() - 1);
  const std::size_t top1 = 4 * (c1.size() - 1) + 2;
  if (std::max(top0, top1) > truncation) {
    throw DimensionError("truncation " + std::to_string(truncation) + " cannot hold Fock level " +
                         std::to_string(std::max(top0, top1)));
  }
  const std::size_t dim = truncation + 1;
  Vector v0 = Vector::Zero(static_cast<Eigen::Index>(dim));
  Vector v1 = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t n = 0; n < c0.size(); ++n) v0(static_cast<Eigen::Index>(4 * n)) = c0[n];
  for (std::size_t n = 0; n < c1.size(); ++n) v1(static_cast<Eigen::Index>(4 * n + 2)) = c1[n];
  return CodePair(Ket(SpaceSignature{dim}, v0), Ket(SpaceSignature{dim}, v1), std::move(name));
}

std::size_t guarded_truncation(std::size_t highest_level) { return highest_level + 2; }

namespace {

void require_guard(std::size_t highest, std::size_t truncation, const char* which) {
  if (truncation < guarded_truncation(highest)) {
    throw DimensionError(std::string(which) + ": truncation must leave two empty levels above Fock level " +
                         std::to_string(highest));
  }
}

}  // namespace

CodePair rl_code(std::size_t truncation) {
  require_guard(4, truncation, "rl_code");
  const double c0[] = {0.0, 1.0};
  const double c1[] = {1.0};
  return code_pair_from_coeffs(c0, c1, truncation, "rl");
}

CodePair binomial_code(std::size_t truncation) {
  require_guard(4, truncation, "binomial_code");
  const double c0[] = {M_SQRT1_2, M_SQRT1_2};
  const double c1[] = {1.0};
  return code_pair_from_coeffs(c0, c1, truncation, "binomial");
}

CodePair break_even_code(std::size_t truncation) {
  require_guard(1, truncation, "break_even_code");
  const std::size_t dim = truncation + 1;
  return CodePair(mode_ket(dim, {{0, 1.0}}), mode_ket(dim, {{1, 1.0}}), "break-even");
}

CodePair shifted_fock_code(std::size_t m, std::size_t truncation) {
  require_guard(m + 2, truncation, "shifted_fock_code");
  const std::size_t dim = truncation + 1;
  CodePair c(mode_ket(dim, {{m + 2, 1.0}}), mode_ket(dim, {{m, 1.0}}), "shifted-m" + std::to_string(m));
  return c.with_kl_degenerate(m == 0);
}

ErrorBasis error_basis(const CodePair& code) {
  const double x0 = xi(code.zero());
  const double x1 = xi(code.one());
  if (x0 <= kNormTol || x1 <= kNormTol) {
    throw UndefinedErrorBasis("error basis undefined: a codeword has zero photon content");
  }
  const Matrix a = fock::annihilation(code.dim()).matrix();
  return ErrorBasis{Ket(code.space(), a * code.zero().amplitudes() / x0),
                    Ket(code.space(), a * code.one().amplitudes() / x1), x0, x1};
}

Operator engineered_jump(const CodePair& code) {
  const ErrorBasis eb = error_basis(code);
  const Operator lo = fock::outer(code.zero(), eb.zero_error) + fock::outer(code.one(), eb.one_error);
  const double tr = (lo.matrix().adjoint() * lo.matrix()).trace().real();
  return lo * cplx(1.0 / std::sqrt(tr));
}

Operator partial_engineered_jump(const CodePair& code) {
  const Matrix a = fock::annihilation(code.dim()).matrix();
  Operator lo = fock::zero(code.space());
  bool any = false;
  for (const Ket* k : {&code.zero(), &code.one()}) {
    const double x = xi(*k);
    if (x <= kNormTol) continue;
    lo = lo + fock::outer(*k, Ket(code.space(), a * k->amplitudes() / x));
    any = true;
  }
  if (!any) throw UndefinedErrorBasis("partial_engineered_jump: no codeword has photon content");
  const double tr = (lo.matrix().adjoint() * lo.matrix()).trace().real();
  return lo * cplx(1.0 / std::sqrt(tr));
}

Operator naive_jump(std::size_t dim) {
  if (dim < 5) throw DimensionError("naive_jump needs at least 5 levels");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(2, 1) = std::sqrt(2.0);
  m(4, 3) = 1.0;
  return Operator(SpaceSignature{dim}, m / std::sqrt(3.0));
}

Operator kl_compensator(std::size_t dim) {
  if (dim < 3) throw DimensionError("kl_compensator needs at least 3 levels");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(1, 2) = 2.0 - std::sqrt(2.0);
  return Operator(SpaceSignature{dim}, m);
}

LogicalPaulis logical_paulis(const CodePair& code) {
  const Operator p00 = fock::outer(code.zero(), code.zero());
  const Operator p11 = fock::outer(code.one(), code.one());
  const Operator p01 = fock::outer(code.zero(), code.one());
  const Operator p10 = fock::outer(code.one(), code.zero());
  return LogicalPaulis{p00 + p11, p01 + p10, (p01 - p10) * kI, p11 - p00};
}

int hamiltonian_distance(const Operator& op, double threshold) {
  if (op.space().num_factors() != 1) throw DimensionError("hamiltonian_distance expects a mode operator");
  const Matrix& m = op.matrix();
  int d = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (std::abs(m(r, c)) > threshold) d = std::max(d, static_cast<int>(std::abs(c - r)));
    }
  }
  return d;
}

KLReport kl_check(const CodePair& code, std::span<const Operator> errors) {
  std::vector<Operator> defaults;
  if (errors.empty()) {
    defaults = {fock::identity(code.dim()), fock::annihilation(code.dim())};
    errors = defaults;
  }
  for (const auto& e : errors) fock::require_same_space(e.space(), code.space(), "kl_check");

  const Vector& z = code.zero().amplitudes();
  const Vector& o = code.one().amplitudes();
  KLReport rep;
  const std::size_t n = errors.size();
  rep.alpha_zero.assign(n, std::vector<cplx>(n));
  rep.alpha_one.assign(n, std::vector<cplx>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix m = errors[j].matrix().adjoint() * errors[i].matrix();
      const cplx a00 = z.dot(m * z);
      const cplx a11 = o.dot(m * o);
      rep.alpha_zero[j][i] = a00;
      rep.alpha_one[j][i] = a11;
      rep.offdiag_violation =
          std::max({rep.offdiag_violation, std::abs(z.dot(m * o)), std::abs(o.dot(m * z))});
      rep.diag_violation = std::max(rep.diag_violation, std::abs(a00 - a11));
    }
  }
  return rep;
}

CodePair code_from_json(const nlohmann::json& j) {
  try {
    const auto c0 = j.at("c0").get<std::vector<double>>();
    const auto c1 = j.at("c1").get<std::vector<double>>();
    const auto trunc = j.at("truncation").get<std::size_t>();
    const auto name = j.value("name", std::string{});
    CodePair code = code_pair_from_coeffs(c0, c1, trunc, name);
    if (name == "sqrt3" && std::abs(code.mean_photon_number() - std::sqrt(3.0)) > 1e-6) {
      throw SpecError("sqrt3 code: mean photon number " + std::to_string(code.mean_photon_number()) +
                      " differs from sqrt(3)");
    }
    return code;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("code file: ") + e.what());
  } catch (const NormalizationError& e) {
    throw SpecError(std::string("code file: ") + e.what());
  } catch (const DimensionError& e) {
    throw SpecError(std::string("code file: ") + e.what());
  }
}

CodePair load_code_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open code file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError("code file " + path.string() + ": " + e.what());
  }
  return code_from_json(j);
}

}  // namespace aqec::codes
