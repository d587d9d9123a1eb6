#include "aqec/dynamics.hpp"

#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "aqec/error.hpp"

namespace aqec::dyn {

NoiseChannel::NoiseChannel(std::vector<Jump> jumps) : jumps_(std::move(jumps)) {
  for (const auto& j : jumps_) {
    if (!(j.rate >= 0.0)) throw Error("noise channel rate must be >= 0 (" + j.label + ")");
    fock::require_same_space(j.op.space(), jumps_.front().op.space(), "NoiseChannel");
  }
}

Lindbladian::Lindbladian(const Operator& hamiltonian, const NoiseChannel& channel)
    : space_(hamiltonian.space()), h_(hamiltonian.matrix()), h_nh_(hamiltonian.matrix()) {
  for (const auto& j : channel.jumps()) {
    fock::require_same_space(space_, j.op.space(), "Lindbladian");
    if (j.rate == 0.0) continue;
    const Matrix& l = j.op.matrix();
    h_nh_ -= (0.5 * j.rate) * kI * (l.adjoint() * l);
    jumps_.push_back(l);
    jumps_adj_.push_back(l.adjoint());
    rates_.push_back(j.rate);
  }
}

Matrix Lindbladian::apply(const Matrix& rho) const {
  // -i (H_nh rho - rho H_nh^dag) + sum_k rate_k L_k rho L_k^dag
  // Written for general (non-Hermitian) rho so the generator stays linear on
  // operators such as |0_L><1_L|.
  Matrix out = -kI * (h_nh_ * rho - rho * h_nh_.adjoint());
  Matrix tmp(rho.rows(), rho.cols());
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    tmp.noalias() = jumps_[k] * rho;
    out.noalias() += rates_[k] * (tmp * jumps_adj_[k]);
  }
  return out;
}

Vector Lindbladian::drift(const Vector& psi) const { return -kI * (h_nh_ * psi); }

Matrix lindblad_rhs(const Operator& hamiltonian, const NoiseChannel& channel,
                    const DensityMatrix& rho) {
  fock::require_same_space(hamiltonian.space(), rho.space(), "lindblad_rhs");
  return Lindbladian(hamiltonian, channel).apply(rho.matrix());
}

// --- Model -------------------------------------------------------------------

Matrix Model::embed(const Matrix& rho_mode) const {
  if (static_cast<std::size_t>(rho_mode.rows()) != mode_dim()) {
    throw DimensionError("Model::embed: state dimension does not match the encoding mode");
  }
  if (space.num_factors() == 1) return rho_mode;
  std::size_t before = 1, after = 1;
  for (std::size_t i = 0; i < mode_factor; ++i) before *= space.factor(i);
  for (std::size_t i = mode_factor + 1; i < space.num_factors(); ++i) after *= space.factor(i);
  const std::size_t k = mode_dim();
  Matrix out = Matrix::Zero(space.dim(), space.dim());
  // Ancillas in |0>: only index (b=0, a=0) is populated.
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out(i * after, j * after) = rho_mode(i, j);
  }
  (void)before;
  return out;
}

Ket Model::embed(const Ket& psi_mode) const {
  if (psi_mode.dim() != mode_dim()) {
    throw DimensionError("Model::embed: ket dimension does not match the encoding mode");
  }
  std::size_t after = 1;
  for (std::size_t i = mode_factor + 1; i < space.num_factors(); ++i) after *= space.factor(i);
  Vector v = Vector::Zero(space.dim());
  for (std::size_t i = 0; i < mode_dim(); ++i) v(i * after) = psi_mode.amplitudes()(i);
  return Ket(space, std::move(v));
}

Matrix Model::reduce(const Matrix& rho_full) const {
  if (space.num_factors() == 1) return rho_full;
  return fock::partial_trace(rho_full, space, mode_factor);
}

Model aqec_model(const Operator& engineered_jump, double g, double gamma_a, double gamma_b,
                 const std::optional<Operator>& loss) {
  const std::size_t n = engineered_jump.dim();
  const SpaceSignature space{n, 2};
  const Operator l = fock::tensor(engineered_jump, fock::identity(2));
  const Operator sp = fock::tensor(fock::identity(n), fock::qubit_raising());
  const Operator sm = fock::tensor(fock::identity(n), fock::qubit_lowering());
  const Operator h = (l * sp + l.adjoint() * sm) * cplx(g);
  const Operator a = fock::tensor(loss ? *loss : fock::annihilation(n), fock::identity(2));
  NoiseChannel noise({{a, gamma_a, "a"}, {sm, gamma_b, "sigma-"}});
  return Model{space, h, std::move(noise), 0};
}

Model photon_loss_model(std::size_t mode_dim, double gamma_a) {
  const SpaceSignature space{mode_dim};
  NoiseChannel noise({{fock::annihilation(mode_dim), gamma_a, "a"}});
  return Model{space, fock::zero(space), std::move(noise), 0};
}

// --- evolve --------------------------------------------------------------------

void require_time_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw Error("time grid is empty");
  if (t_grid.front() != 0.0) throw Error("time grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw Error("time grid must be strictly increasing");
  }
}

std::vector<double> uniform_grid(double t_end, std::size_t n_intervals) {
  if (n_intervals < 1) throw Error("uniform_grid needs at least one interval");
  std::vector<double> g(n_intervals + 1);
  for (std::size_t i = 0; i <= n_intervals; ++i) {
    g[i] = t_end * static_cast<double>(i) / static_cast<double>(n_intervals);
  }
  g.back() = t_end;
  return g;
}

namespace {

struct MatrixRhs {
  const Lindbladian* gen;
  Matrix operator()(double, const Matrix& rho) const { return gen->apply(rho); }
};

DensityMatrix sample_state(const SpaceSignature& space, const Matrix& rho) {
  return DensityMatrix::unchecked(space, rho);
}

}  // namespace

EvolutionResult evolve(const DensityMatrix& rho0, const Operator& hamiltonian,
                       const NoiseChannel& channel, std::span<const double> t_grid,
                       const EvolveOptions& options) {
  fock::require_same_space(hamiltonian.space(), rho0.space(), "evolve");
  return evolve(rho0, Lindbladian(hamiltonian, channel), t_grid, options);
}

EvolutionResult evolve(const DensityMatrix& rho0, const Lindbladian& generator,
                       std::span<const double> t_grid, const EvolveOptions& options) {
  fock::require_same_space(generator.space(), rho0.space(), "evolve");
  require_time_grid(t_grid);

  EvolutionResult out;
  out.times.assign(t_grid.begin(), t_grid.end());
  out.states.reserve(t_grid.size());

  integrate::DormandPrince<Matrix, MatrixRhs> stepper(MatrixRhs{&generator}, options.tol);
  Matrix rho = rho0.matrix();
  const cplx trace0 = rho.trace();
  double t = 0.0;
  double h = stepper.initial_step(t, rho);
  double drift = 0.0;

  out.states.push_back(rho0);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    stepper.integrate(t, rho, h, t_grid[i], [&](double, Matrix& y) {
      drift = std::max(drift, std::abs(y.trace() - trace0));
      if (options.hermitize) {
        y = 0.5 * (y + y.adjoint()).eval();
        return true;
      }
      return false;
    });
    out.states.push_back(sample_state(rho0.space(), rho));
  }
  const auto& st = stepper.stats();
  out.stats = {st.accepted, st.rejected, st.rhs_evaluations, drift};
  return out;
}

EvolutionResult evolve_rk4(const DensityMatrix& rho0, const Lindbladian& generator,
                           std::span<const double> t_grid, std::size_t substeps) {
  fock::require_same_space(generator.space(), rho0.space(), "evolve_rk4");
  require_time_grid(t_grid);
  if (substeps < 1) throw Error("evolve_rk4 needs at least one substep");

  EvolutionResult out;
  out.times.assign(t_grid.begin(), t_grid.end());
  integrate::DormandPrince<Matrix, MatrixRhs> stepper(MatrixRhs{&generator}, {});
  Matrix rho = rho0.matrix();
  const cplx trace0 = rho.trace();
  out.states.push_back(rho0);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double hs = (t_grid[i] - t_grid[i - 1]) / static_cast<double>(substeps);
    double t = t_grid[i - 1];
    for (std::size_t s = 0; s < substeps; ++s, t += hs) rho = stepper.rk4_step(t, rho, hs);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    out.stats.max_trace_drift = std::max(out.stats.max_trace_drift, std::abs(rho.trace() - trace0));
    out.states.push_back(sample_state(rho0.space(), rho));
  }
  out.stats.accepted_steps = (t_grid.size() - 1) * substeps;
  out.stats.rhs_evaluations = 4 * out.stats.accepted_steps;
  return out;
}

// --- serialization -------------------------------------------------------------

namespace {

double observable_value(const Operator& op, const Matrix& rho) {
  return op.matrix().cwiseProduct(rho.transpose()).sum().real();
}

double observable_value(const Operator& op, const Vector& psi) {
  const double n2 = psi.squaredNorm();
  return (psi.dot(op.matrix() * psi)).real() / n2;
}

template <class Row>
void write_table(std::ostream& os, const std::vector<double>& times,
                 std::span<const NamedObservable> obs, Row&& row) {
  os << "# t in the time unit of the generator; observables in their natural units\n";
  os << "t";
  for (const auto& o : obs) os << ',' << o.name;
  os << '\n';
  os.precision(12);
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << times[i];
    for (const auto& o : obs) os << ',' << row(i, o.op);
    os << '\n';
  }
}

}  // namespace

void write_csv(std::ostream& os, const EvolutionResult& result,
               std::span<const NamedObservable> observables) {
  write_table(os, result.times, observables, [&](std::size_t i, const Operator& op) {
    return observable_value(op, result.states[i].matrix());
  });
}

void write_csv(std::ostream& os, const Trajectory& trajectory,
               std::span<const NamedObservable> observables) {
  write_table(os, trajectory.times, observables, [&](std::size_t i, const Operator& op) {
    return observable_value(op, trajectory.kets[i].amplitudes());
  });
}

nlohmann::json to_json(const EvolutionResult& result,
                       std::span<const NamedObservable> observables) {
  nlohmann::json j;
  j["t"] = result.times;
  for (const auto& o : observables) {
    std::vector<double> v;
    v.reserve(result.states.size());
    for (const auto& s : result.states) v.push_back(observable_value(o.op, s.matrix()));
    j["observables"][o.name] = v;
  }
  j["stats"] = {{"accepted_steps", result.stats.accepted_steps},
                {"rejected_steps", result.stats.rejected_steps},
                {"rhs_evaluations", result.stats.rhs_evaluations},
                {"max_trace_drift", result.stats.max_trace_drift}};
  return j;
}

nlohmann::json to_json(const Trajectory& trajectory,
                       std::span<const NamedObservable> observables) {
  nlohmann::json j;
  j["t"] = trajectory.times;
  for (const auto& o : observables) {
    std::vector<double> v;
    v.reserve(trajectory.kets.size());
    for (const auto& k : trajectory.kets) v.push_back(observable_value(o.op, k.amplitudes()));
    j["observables"][o.name] = v;
  }
  auto& jumps = j["jumps"] = nlohmann::json::array();
  for (const auto& e : trajectory.jumps) jumps.push_back({{"t", e.time}, {"channel", e.channel}});
  return j;
}

}  // namespace aqec::dyn
