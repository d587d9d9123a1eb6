#include "aqec/effective.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "aqec/error.hpp"
#include "aqec/fidelity.hpp"

namespace aqec::effective {

EffectiveParams effective_lambda(double g, double gamma_a, double gamma_b) {
  if (!(g > 0.0) || !(gamma_a > 0.0) || !(gamma_b > 0.0)) {
    throw Error("effective_lambda: g, gamma_a and gamma_b must be > 0");
  }
  return EffectiveParams{8.0 * g * g / (gamma_a * gamma_b), gamma_a};
}

dyn::Model effective_model(const Operator& jump, const EffectiveParams& params,
                           const std::optional<Operator>& loss) {
  if (!(params.lambda > 0.0)) throw Error("effective model needs lambda > 0");
  const auto& space = jump.space();
  const Operator a = loss ? *loss : fock::annihilation(jump.dim());
  fock::require_same_space(space, a.space(), "effective_model");
  dyn::NoiseChannel noise({{a, params.gamma_a, "a"}, {jump, params.gamma_a * params.lambda, "L_eng"}});
  return dyn::Model{space, fock::zero(space), std::move(noise), 0};
}

Matrix effective_rhs(const fock::DensityMatrix& rho, const EffectiveParams& params, const Operator& jump,
                     const std::optional<Operator>& loss) {
  fock::require_same_space(rho.space(), jump.space(), "effective_rhs");
  const auto m = effective_model(jump, params, loss);
  return dyn::Lindbladian(m.hamiltonian, m.noise).apply(rho.matrix());
}

Variant parse_variant(const std::string& s) {
  if (s == "rl") return Variant::rl;
  if (s == "naive") return Variant::naive;
  if (s == "kl_modified" || s == "kl-modified") return Variant::kl_modified;
  throw SpecError("unknown five-level variant '" + s + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::rl: return "rl";
    case Variant::naive: return "naive";
    case Variant::kl_modified: return "kl_modified";
  }
  return "?";
}

Operator variant_jump(Variant v, std::size_t dim) {
  if (v == Variant::naive) return codes::naive_jump(dim);
  return codes::engineered_jump(codes::rl_code(dim - 1));
}

Operator variant_loss(Variant v, std::size_t dim) {
  const Operator a = fock::annihilation(dim);
  if (v == Variant::kl_modified) return a + codes::kl_compensator(dim);
  return a;
}

// --- five-level state ------------------------------------------------------------

Matrix FiveLevelState::to_matrix(std::size_t dim) const {
  if (dim < 5) throw DimensionError("FiveLevelState needs dim >= 5");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (int i = 0; i < 5; ++i) m(i, i) = diag[i];
  m(2, 4) = rho24;
  m(4, 2) = rho42();
  m(1, 3) = rho13;
  m(3, 1) = rho31();
  return m;
}

FiveLevelState FiveLevelState::from_matrix(const Matrix& rho) {
  if (rho.rows() < 5) throw DimensionError("FiveLevelState needs dim >= 5");
  FiveLevelState s;
  for (int i = 0; i < 5; ++i) s.diag[i] = rho(i, i).real();
  s.rho24 = rho(2, 4);
  s.rho13 = rho(1, 3);
  return s;
}

FiveLevelState FiveLevelState::bloch(double theta, double phi) {
  // |psi> = c|4> + e^{i phi} s|2>: rho24 = <2|psi><psi|4> = e^{i phi} s c.
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  FiveLevelState st;
  st.diag[4] = c * c;
  st.diag[2] = s * s;
  st.rho24 = std::polar(s * c, phi);
  return st;
}

FiveLevelState five_level_rhs(const FiveLevelState& s, double lambda, Variant v) {
  const auto& p = s.diag;
  const double r8 = std::sqrt(8.0);
  FiveLevelState d;
  switch (v) {
    case Variant::rl:
      d.diag[2] = 0.5 * (6 * p[3] - 4 * p[2] + lambda * p[1]);
      d.diag[4] = 0.5 * (-8 * p[4] + lambda * p[3]);
      d.diag[1] = 0.5 * (4 * p[2] - 2 * p[1] - lambda * p[1]);
      d.diag[3] = 0.5 * (8 * p[4] - 6 * p[3] - lambda * p[3]);
      d.rho24 = 0.5 * (-6.0 * s.rho24 + lambda * s.rho13);
      d.rho13 = 0.5 * (2 * r8 * s.rho24 - 4.0 * s.rho13 - lambda * s.rho13);
      break;
    case Variant::naive:
      d.diag[2] = 0.5 * (6 * p[3] - 4 * p[2] + 4.0 / 3.0 * lambda * p[1]);
      d.diag[4] = 0.5 * (-8 * p[4] + 2.0 / 3.0 * lambda * p[3]);
      d.diag[1] = 0.5 * (4 * p[2] - 2 * p[1] - 4.0 / 3.0 * lambda * p[1]);
      d.diag[3] = 0.5 * (8 * p[4] - 6 * p[3] - 2.0 / 3.0 * lambda * p[3]);
      d.rho24 = 0.5 * (-6.0 * s.rho24 + 2.0 * std::numbers::sqrt2 / 3.0 * lambda * s.rho13);
      d.rho13 = 0.5 * (2 * r8 * s.rho24 - 4.0 * s.rho13 - lambda * s.rho13);
      break;
    case Variant::kl_modified:
      d.diag[2] = 0.5 * (6 * p[3] - 8 * p[2] + lambda * p[1]);
      d.diag[4] = 0.5 * (-8 * p[4] + lambda * p[3]);
      d.diag[1] = 0.5 * (8 * p[2] - 2 * p[1] - lambda * p[1]);
      d.diag[3] = 0.5 * (8 * p[4] - 6 * p[3] - lambda * p[3]);
      d.rho24 = 0.5 * (-8.0 * s.rho24 + lambda * s.rho13);
      d.rho13 = 0.5 * (8.0 * s.rho24 - 4.0 * s.rho13 - lambda * s.rho13);
      break;
  }
  d.diag[0] = p[1];
  return d;
}

namespace {

using State7 = Eigen::VectorXcd;

State7 pack(const FiveLevelState& s) {
  State7 v(7);
  for (int i = 0; i < 5; ++i) v(i) = s.diag[i];
  v(5) = s.rho24;
  v(6) = s.rho13;
  return v;
}

FiveLevelState unpack(const State7& v) {
  FiveLevelState s;
  for (int i = 0; i < 5; ++i) s.diag[i] = v(i).real();
  s.rho24 = v(5);
  s.rho13 = v(6);
  return s;
}

struct FiveRhs {
  double lambda;
  Variant variant;
  State7 operator()(double, const State7& y) const { return pack(five_level_rhs(unpack(y), lambda, variant)); }
};

}  // namespace

std::vector<FiveLevelState> five_level_evolve(const FiveLevelState& initial, double lambda, Variant v,
                                              std::span<const double> t_grid, const integrate::Tolerances& tol) {
  dyn::require_time_grid(t_grid);
  integrate::DormandPrince<State7, FiveRhs> stepper(FiveRhs{lambda, v}, tol);
  State7 y = pack(initial);
  double t = 0.0;
  double h = stepper.initial_step(t, y);
  std::vector<FiveLevelState> out{initial};
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    stepper.integrate(t, y, h, t_grid[i], [](double, State7&) { return false; });
    out.push_back(unpack(y));
  }
  return out;
}

// --- first-order closed forms -----------------------------------------------------

namespace {

struct FirstOrder {
  double upper_leak, lower_leak;  // exponents of rho44 and rho22 decay, times gamma_a t / lambda
  double c33, c11;                // quasi-static error-state populations
  double transfer;                // zeroth-order 4 -> 2 transfer weight
  double corr22, corr00, tr11;    // first-order corrections of the transfer term
  double u;                       // coherence decay rate at lambda -> infinity
  double coh_corr;                // first-order coherence exponent correction
  double w24, c13;                // rho24 prefactor (1 - w/lambda), rho13 weight
};

FirstOrder first_order(Variant v) {
  const double s2 = std::numbers::sqrt2;
  switch (v) {
    case Variant::rl:
      return {24, 4, 8, 4, 6.0 / 5, -72.0 / 25, 48.0 / 25, 24.0 / 5, 3 - 2 * s2, 4 * (s2 - 4), 4 * s2, 4 * s2};
    case Variant::kl_modified:
      return {24, 8, 8, 8, 3.0 / 2, -9, 3, 12, 0, -16, 8, 8};
    case Variant::naive:
      return {36, 3, 12, 3, 12.0 / 11, -18.0 / 11, 18.0 / 11, 36.0 / 11, 1.0 / 3, -80.0 / 9, 16.0 / 3, 4 * s2};
  }
  throw Error("unknown variant");
}

}  // namespace

AnalyticResult analytic_elements(const FiveLevelState& initial, double lambda, double gamma_t, Variant v) {
  const auto& p = initial.diag;
  if (std::abs(p[0]) > 1e-12 || std::abs(p[1]) > 1e-12 || std::abs(p[3]) > 1e-12 ||
      std::abs(initial.rho13) > 1e-12) {
    throw InvalidStateError("analytic_elements: initial state must be supported on {|2>, |4>}");
  }
  const FirstOrder c = first_order(v);
  const double p4 = p[4];
  const double p2 = p[2];
  const double eu = std::exp(-c.upper_leak * gamma_t / lambda);
  const double el = std::exp(-c.lower_leak * gamma_t / lambda);
  const double bracket = el - eu;

  AnalyticResult r;
  r.asymptotic = lambda >= 100.0;
  auto& s = r.state;
  s.diag[4] = (1 - c.c33 / lambda) * p4 * eu;
  s.diag[3] = (c.c33 / lambda) * p4 * eu;
  s.diag[2] = (c.transfer + c.corr22 / lambda) * p4 * bracket + (1 - c.c11 / lambda) * p2 * el;
  s.diag[1] = (c.tr11 / lambda) * p4 * bracket + (c.c11 / lambda) * p2 * el;
  s.diag[0] = (p2 + p4) - (c.transfer + c.corr00 / lambda) * p4 * bracket - p4 * eu - p2 * el;
  const double coh = std::exp(c.coh_corr * gamma_t / lambda - c.u * gamma_t);
  s.rho24 = (1 - c.w24 / lambda) * initial.rho24 * coh;
  s.rho13 = (c.c13 / lambda) * initial.rho24 * coh;
  return r;
}

double limit_decay_rate(Variant v) { return first_order(v).u; }

fock::DensityMatrix limit_density(const fock::DensityMatrix& initial, double gamma_t, double u) {
  const Matrix& m = initial.matrix();
  if (m.rows() < 5) throw DimensionError("limit_density needs dim >= 5");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const bool code = (i == 2 || i == 4) && (j == 2 || j == 4);
      if (!code && std::abs(m(i, j)) > 1e-12) {
        throw InvalidStateError("limit_density: initial state has support outside {|2>, |4>}");
      }
    }
  }
  Matrix out = m;
  const double damp = std::exp(-u * gamma_t);
  out(2, 4) *= damp;
  out(4, 2) *= damp;
  return fock::DensityMatrix(initial.space(), out);
}

double mean_jump_probability(std::size_t m, double gamma_a) { return static_cast<double>(m + 1) * gamma_a; }

std::vector<ShiftedCodeRow> shifted_code_sweep(std::span<const std::size_t> ms, double g, double gamma_a,
                                               double gamma_b, double t, unsigned threads) {
  std::vector<ShiftedCodeRow> rows(ms.size());
  std::vector<std::exception_ptr> errors(ms.size());
  const double f_be = fidelity::break_even_mean_fidelity(gamma_a * t);
  const std::vector<double> grid{0.0, t};

  auto run = [&](std::size_t k) {
    try {
      const std::size_t m = ms[k];
      const auto code = codes::shifted_fock_code(m, m + 5);
      const Operator jump = code.kl_degenerate() ? codes::partial_engineered_jump(code) : codes::engineered_jump(code);
      const auto model = dyn::aqec_model(jump, g, gamma_a, gamma_b);
      const fidelity::CodeSpaceEvolution ev(model, code, grid);
      ShiftedCodeRow row;
      row.m = m;
      row.mean_fidelity = ev.mean_fidelity(1);
      row.kl_degenerate = code.kl_degenerate();
      row.equator_fidelity = 1.0;
      for (int l = 0; l < 16; ++l) {
        const double phi = 2.0 * std::numbers::pi * l / 16.0;
        row.equator_fidelity = std::min(row.equator_fidelity, ev.state_fidelity(std::numbers::pi / 2, phi, 1));
      }
      row.invalid = row.equator_fidelity < f_be;
      rows[k] = row;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ms.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < ms.size(); ++k) run(k);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < ms.size(); k += workers) run(k);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace aqec::effective
