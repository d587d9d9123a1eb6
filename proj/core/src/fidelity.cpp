#include "aqec/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <thread>

#include "aqec/error.hpp"

namespace aqec::fidelity {

namespace {

double clip_unit(double f) { return std::clamp(f, 0.0, 1.0); }

double overlap(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.transpose()).sum().real();
}

}  // namespace

double state_fidelity(const DensityMatrix& rho0, const DensityMatrix& rho_t) {
  fock::require_same_space(rho0.space(), rho_t.space(), "state_fidelity");
  if (std::abs(rho0.purity() - 1.0) > 1e-8) {
    throw InvalidStateError("state_fidelity: reference state is not pure");
  }
  return clip_unit(overlap(rho0.matrix(), rho_t.matrix()));
}

double state_fidelity(const Ket& psi, const Matrix& rho) {
  return clip_unit(psi.amplitudes().dot(rho * psi.amplitudes()).real());
}

std::array<Matrix, 6> six_states(const CodePair& code) {
  const auto p = codes::logical_paulis(code);
  const Matrix& s0 = p.identity.matrix();
  return {0.5 * (s0 + p.x.matrix()), 0.5 * (s0 - p.x.matrix()), 0.5 * (s0 + p.y.matrix()),
          0.5 * (s0 - p.y.matrix()), 0.5 * (s0 + p.z.matrix()), 0.5 * (s0 - p.z.matrix())};
}

std::array<double, 6> six_observations(const Channel& channel, const CodePair& code) {
  const auto states = six_states(code);
  std::array<double, 6> out{};
  for (std::size_t j = 0; j < 6; ++j) {
    const Matrix m = channel(states[j]);
    if (std::abs(m.trace() - cplx(1.0)) > 1e-6) {
      throw InvalidStateError("channel is not trace preserving on the code space");
    }
    out[j] = overlap(states[j], m);
  }
  return out;
}

double mean_fidelity_six(const Channel& channel, const CodePair& code) {
  const auto obs = six_observations(channel, code);
  double s = 0.0;
  for (double o : obs) s += o;
  return s / 6.0;
}

Quadrature gauss_legendre(std::size_t n) {
  if (n < 1) throw Error("gauss_legendre needs n >= 1");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

double mean_fidelity_sphere(const Channel& channel, const CodePair& code, std::size_t n_theta,
                            std::size_t n_phi) {
  if (n_theta < 16 || n_phi < 16) throw Error("mean_fidelity_sphere needs n_theta, n_phi >= 16");
  const Quadrature gl = gauss_legendre(n_theta);
  double total = 0.0;
  for (std::size_t k = 0; k < n_theta; ++k) {
    const double theta = std::acos(gl.nodes[k]);
    double ring = 0.0;
    for (std::size_t l = 0; l < n_phi; ++l) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(n_phi);
      const Ket psi = code.bloch_state(theta, phi);
      const Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
      ring += overlap(rho, channel(rho));
    }
    total += gl.weights[k] * ring * (2.0 * std::numbers::pi / static_cast<double>(n_phi));
  }
  return total / (4.0 * std::numbers::pi);
}

double break_even_mean_fidelity(double gamma_t) {
  return (std::exp(-gamma_t) + 2.0 * std::exp(-gamma_t / 2.0) + 3.0) / 6.0;
}

double rl_analytic_mean_fidelity(double gamma_t, double u) {
  return 2.0 / 3.0 + std::exp(-u * gamma_t) / 3.0;
}

double rl_analytic_state_fidelity(double theta, double /*phi*/, double gamma_t, double u) {
  const double s = std::sin(theta / 2.0);
  const double c = std::cos(theta / 2.0);
  return 1.0 + 2.0 * s * s * c * c * (std::exp(-u * gamma_t) - 1.0);
}

FidelityCurve coarse_grained(const FidelityCurve& curve, double tau) {
  if (!(tau >= 0.0)) throw Error("coarse_grained: tau must be >= 0");
  const std::size_t n = curve.times.size();
  if (curve.mean.size() != n) throw DimensionError("coarse_grained: mean column length mismatch");
  if (tau == 0.0) return curve;
  for (std::size_t i = 1; i < n; ++i) {
    if (curve.times[i] - curve.times[i - 1] > tau / 6.0 * (1.0 + 1e-9)) {
      throw Error("coarse_grained: sampling interval exceeds tau/6");
    }
  }
  auto window_max = [&](const std::vector<double>& col) {
    if (col.empty()) return col;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      double m = col[i];
      const double end = curve.times[i] + tau * (1.0 + 1e-12);
      for (std::size_t j = i + 1; j < n && curve.times[j] <= end; ++j) m = std::max(m, col[j]);
      out[i] = m;
    }
    return out;
  };
  return FidelityCurve{curve.times, window_max(curve.mean), window_max(curve.min), window_max(curve.max)};
}

// --- CodeSpaceEvolution --------------------------------------------------------

std::vector<double> coarse_grained_average(std::span<const std::vector<double>> curves,
                                           std::span<const double> times, double tau) {
  if (curves.empty()) throw Error("coarse_grained_average: empty ensemble");
  std::vector<double> mean(times.size(), 0.0);
  for (const auto& c : curves) {
    if (c.size() != times.size()) throw DimensionError("coarse_grained_average: curve length differs from times");
    const FidelityCurve one{{times.begin(), times.end()}, c, {}, {}};
    const auto star = coarse_grained(one, tau);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += star.mean[i];
  }
  for (double& m : mean) m /= static_cast<double>(curves.size());
  return mean;
}

CodeSpaceEvolution::CodeSpaceEvolution(const dyn::Model& model, const CodePair& code,
                                       std::span<const double> t_grid,
                                       const dyn::EvolveOptions& options, unsigned threads)
    : code_(code), times_(t_grid.begin(), t_grid.end()), inputs_(six_states(code)) {
  if (model.mode_dim() != code.dim()) throw DimensionError("CodeSpaceEvolution: code and model mode differ");
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);
  outputs_.assign(times_.size(), {});
  std::array<double, 6> drift{};
  std::array<std::exception_ptr, 6> errors{};

  auto run = [&](std::size_t j) {
    try {
      const auto rho0 = fock::DensityMatrix::unchecked(model.space, model.embed(inputs_[j]));
      const auto res = dyn::evolve(rho0, gen, t_grid, options);
      for (std::size_t i = 0; i < res.states.size(); ++i) outputs_[i][j] = model.reduce(res.states[i].matrix());
      drift[j] = res.stats.max_trace_drift;
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };
  const unsigned workers = std::clamp(threads, 1u, 6u);
  if (workers == 1) {
    for (std::size_t j = 0; j < 6; ++j) run(j);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t j = w; j < 6; j += workers) run(j);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  drift_ = *std::max_element(drift.begin(), drift.end());
}

CodeSpaceEvolution::CodeSpaceEvolution(const Channel& channel, const CodePair& code)
    : code_(code), times_{0.0}, inputs_(six_states(code)) {
  outputs_.resize(1);
  for (std::size_t j = 0; j < 6; ++j) outputs_[0][j] = channel(inputs_[j]);
}

CodeSpaceEvolution::CodeSpaceEvolution(const CodePair& code, std::vector<double> times,
                                       std::vector<std::array<Matrix, 6>> outputs)
    : code_(code), times_(std::move(times)), inputs_(six_states(code)), outputs_(std::move(outputs)) {
  if (outputs_.size() != times_.size()) throw DimensionError("CodeSpaceEvolution: times and outputs differ in length");
}

CodeSpaceEvolution propagate_code_space(const dyn::Model& model, const CodePair& code, double t_end,
                                        std::size_t intervals) {
  if (model.mode_dim() != code.dim()) throw DimensionError("propagate_code_space: code and model mode differ");
  const auto grid = dyn::uniform_grid(t_end, intervals);
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);
  const auto inputs = six_states(code);
  std::vector<Matrix> state;
  for (const auto& r : inputs) state.push_back(model.embed(r));
  const dyn::BlockPropagator step(gen, state, grid[1] - grid[0]);
  std::vector<std::array<Matrix, 6>> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (i > 0) state[j] = step.apply(state[j]);
      out[i][j] = model.reduce(state[j]);
    }
  }
  return CodeSpaceEvolution(code, grid, std::move(out));
}

Matrix CodeSpaceEvolution::output(double theta, double phi, std::size_t i) const {
  const auto& o = outputs_.at(i);
  // rho = (sigma0 + cx sigma_x + cy sigma_y + cz sigma_z)/2, read off the Bloch ket.
  const Ket psi = code_.bloch_state(theta, phi);
  const Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
  const double cx = overlap(rho, inputs_[0] - inputs_[1]);
  const double cy = overlap(rho, inputs_[2] - inputs_[3]);
  const double cz = overlap(rho, inputs_[4] - inputs_[5]);
  return 0.5 * (o[4] + o[5]) + 0.5 * (cx * (o[0] - o[1]) + cy * (o[2] - o[3]) + cz * (o[4] - o[5]));
}

double CodeSpaceEvolution::state_fidelity(double theta, double phi, std::size_t i) const {
  return fidelity::state_fidelity(code_.bloch_state(theta, phi), output(theta, phi, i));
}

std::array<double, 6> CodeSpaceEvolution::observations(std::size_t i) const {
  const auto& o = outputs_.at(i);
  std::array<double, 6> out{};
  for (std::size_t j = 0; j < 6; ++j) out[j] = overlap(inputs_[j], o[j]);
  return out;
}

double CodeSpaceEvolution::mean_fidelity(std::size_t i) const {
  const auto obs = observations(i);
  double s = 0.0;
  for (double x : obs) s += x;
  return s / 6.0;
}

std::vector<CodeSpaceEvolution::BlochSample> CodeSpaceEvolution::bloch_grid(std::size_t i, std::size_t n_theta,
                                                                            std::size_t n_phi) const {
  if (n_theta < 2 || n_phi < 1) throw Error("bloch_grid needs n_theta >= 2 and n_phi >= 1");
  std::vector<BlochSample> out;
  out.reserve(n_theta * n_phi);
  for (std::size_t a = 0; a < n_theta; ++a) {
    const double theta = std::numbers::pi * static_cast<double>(a) / static_cast<double>(n_theta - 1);
    for (std::size_t b = 0; b < n_phi; ++b) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(b) / static_cast<double>(n_phi);
      out.push_back({theta, phi, state_fidelity(theta, phi, i)});
    }
  }
  return out;
}

FidelityCurve CodeSpaceEvolution::curve(std::size_t grid) const {
  FidelityCurve c;
  c.times = times_;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    c.mean.push_back(mean_fidelity(i));
    if (grid > 0) {
      const auto samples = bloch_grid(i, std::max<std::size_t>(grid, 2), grid);
      double lo = 1.0;
      double hi = 0.0;
      for (const auto& s : samples) {
        lo = std::min(lo, s.fidelity);
        hi = std::max(hi, s.fidelity);
      }
      c.min.push_back(lo);
      c.max.push_back(hi);
    }
  }
  return c;
}

// --- CSV -------------------------------------------------------------------------

void write_csv(std::ostream& os, const FidelityCurve& curve, const char* time_unit) {
  const bool range = !curve.min.empty() && !curve.max.empty();
  os << "# t in " << time_unit << "; fidelities dimensionless\n";
  os << "t,F_mean" << (range ? ",F_min,F_max" : "") << '\n';
  os.precision(10);
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    os << curve.times[i] << ',' << curve.mean[i];
    if (range) os << ',' << curve.min[i] << ',' << curve.max[i];
    os << '\n';
  }
}

void write_bloch_csv(std::ostream& os, std::span<const CodeSpaceEvolution::BlochSample> samples) {
  os << "# theta, phi in rad; F dimensionless\n";
  os << "theta,phi,F\n";
  os.precision(10);
  for (const auto& s : samples) os << s.theta << ',' << s.phi << ',' << s.fidelity << '\n';
}

}  // namespace aqec::fidelity
