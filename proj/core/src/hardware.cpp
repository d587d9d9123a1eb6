#include "aqec/hardware.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "aqec/error.hpp"

namespace aqec::hw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double to_rad_per_us(const nlohmann::json& q, const char* name) {
  if (!q.is_object() || !q.contains("value") || !q.contains("unit")) {
    throw SpecError(std::string("hardware: '") + name + "' needs {\"value\", \"unit\"}");
  }
  const double v = q.at("value").get<double>();
  const auto unit = q.at("unit").get<std::string>();
  if (unit == "MHz*2pi") return kTwoPi * v;
  if (unit == "kHz*2pi") return kTwoPi * v * 1e-3;
  if (unit == "rad/us") return v;
  throw SpecError(std::string("hardware: unknown unit '") + unit + "' for " + name);
}

}  // namespace

HardwareConfig HardwareConfig::reference() {
  return HardwareConfig{kTwoPi * 0.05, kTwoPi * 0.07, kTwoPi * 2e-4, kTwoPi * 2e-3, kTwoPi * 0.12};
}

void HardwareConfig::validate() const {
  if (truncation_a < 7) throw DimensionError("hardware: mode a needs >= 7 levels");
  if (truncation_c < 4) throw DimensionError("hardware: mode c needs >= 4 levels");
  if (alpha0 < 0 || alpha1 < 0 || gamma_a1 < 0 || gamma_b1 < 0 || gamma_c1 < 0) {
    throw SpecError("hardware: frequencies and rates must be >= 0");
  }
  if (!(t_final > 0.0) || samples < 1) throw SpecError("hardware: t_final > 0 and samples >= 1 required");
}

bool HardwareConfig::regime_ok() const { return gamma_c1 >= 1.5 * alpha1 && alpha1 >= alpha0; }

HardwareConfig hardware_config_from_json(const nlohmann::json& j) {
  HardwareConfig c = HardwareConfig::reference();
  try {
    if (j.contains("alpha0")) c.alpha0 = to_rad_per_us(j["alpha0"], "alpha0");
    if (j.contains("alpha1")) c.alpha1 = to_rad_per_us(j["alpha1"], "alpha1");
    if (j.contains("gamma_a1")) c.gamma_a1 = to_rad_per_us(j["gamma_a1"], "gamma_a1");
    if (j.contains("gamma_b1")) c.gamma_b1 = to_rad_per_us(j["gamma_b1"], "gamma_b1");
    if (j.contains("gamma_c1")) c.gamma_c1 = to_rad_per_us(j["gamma_c1"], "gamma_c1");
    if (j.contains("t_final")) {
      const auto& t = j["t_final"];
      const auto unit = t.at("unit").get<std::string>();
      const double v = t.at("value").get<double>();
      if (unit == "us") {
        c.t_final = v;
      } else if (unit == "ms") {
        c.t_final = 1e3 * v;
      } else {
        throw SpecError("hardware: t_final unit must be us or ms");
      }
    }
    c.truncation_a = j.value("truncation_a", c.truncation_a);
    c.truncation_c = j.value("truncation_c", c.truncation_c);
    c.samples = j.value("samples", c.samples);
    const auto v = j.value("variant", std::string("heff0"));
    if (v == "heff0") {
      c.variant = Variant::heff0;
    } else if (v == "heff1") {
      c.variant = Variant::heff1;
    } else {
      throw SpecError("hardware: variant must be heff0 or heff1");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("hardware config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const HardwareConfig& c) {
  auto mhz = [](double w) { return nlohmann::json{{"value", w / kTwoPi}, {"unit", "MHz*2pi"}}; };
  auto khz = [](double w) { return nlohmann::json{{"value", w / kTwoPi * 1e3}, {"unit", "kHz*2pi"}}; };
  return {{"alpha0", mhz(c.alpha0)},
          {"alpha1", mhz(c.alpha1)},
          {"gamma_a1", khz(c.gamma_a1)},
          {"gamma_b1", khz(c.gamma_b1)},
          {"gamma_c1", khz(c.gamma_c1)},
          {"t_final", {{"value", c.t_final}, {"unit", "us"}}},
          {"truncation_a", c.truncation_a},
          {"truncation_c", c.truncation_c},
          {"samples", c.samples},
          {"variant", c.variant == Variant::heff0 ? "heff0" : "heff1"}};
}

fock::Operator hardware_jump(std::size_t dim) {
  if (dim < 5) throw DimensionError("hardware_jump needs >= 5 levels");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(2, 1) = 1.0;
  m(4, 3) = 1.0;
  return fock::Operator(fock::SpaceSignature({dim}), m);
}

namespace {

fock::Operator recovery_part(const HardwareConfig& c) {
  const auto lo = hardware_jump(c.truncation_a);
  const auto ic = fock::identity(c.truncation_c);
  const auto coupling = fock::tensor({lo, fock::qubit_raising(), ic});
  return fock::Operator(coupling.space(), c.alpha0 * (coupling.matrix() + coupling.matrix().adjoint()));
}

/// alpha1 P (x) (sigma- c^dag + sigma+ c), P acting on mode a.
fock::Operator exchange_part(const HardwareConfig& c, const fock::Operator& p) {
  const auto cc = fock::annihilation(c.truncation_c);
  const auto t = fock::tensor({p, fock::qubit_raising(), cc});
  return fock::Operator(t.space(), c.alpha1 * (t.matrix() + t.matrix().adjoint()));
}

}  // namespace

fock::Operator build_heff0(const HardwareConfig& c) {
  c.validate();
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(c.truncation_a), static_cast<Eigen::Index>(c.truncation_a));
  p(2, 2) = 1.0;
  p(4, 4) = 1.0;
  const auto h = recovery_part(c);
  return fock::Operator(h.space(),
                        h.matrix() + exchange_part(c, fock::Operator(fock::SpaceSignature({c.truncation_a}), p)).matrix());
}

fock::Operator build_heff1(const HardwareConfig& c) {
  c.validate();
  const auto h = recovery_part(c);
  return fock::Operator(h.space(), h.matrix() + exchange_part(c, fock::identity(c.truncation_a)).matrix());
}

dyn::Model hardware_model(const HardwareConfig& c) {
  const auto h = c.variant == Variant::heff0 ? build_heff0(c) : build_heff1(c);
  const auto ia = fock::identity(c.truncation_a);
  const auto iq = fock::identity(2);
  const auto ic = fock::identity(c.truncation_c);
  dyn::NoiseChannel noise({{fock::tensor({fock::annihilation(c.truncation_a), iq, ic}), c.gamma_a1, "a"},
                           {fock::tensor({ia, fock::qubit_lowering(), ic}), c.gamma_b1, "sigma-"},
                           {fock::tensor({ia, iq, fock::annihilation(c.truncation_c)}), c.gamma_c1, "c"}});
  return dyn::Model{h.space(), h, std::move(noise), 0};
}

HardwareResult simulate_hardware(const HardwareConfig& c, const codes::CodePair& code, unsigned threads) {
  c.validate();
  if (code.dim() != c.truncation_a) throw DimensionError("simulate_hardware: code and mode a dimensions differ");
  const auto model = hardware_model(c);
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);
  const auto grid = dyn::uniform_grid(c.t_final, c.samples);
  const auto inputs = fidelity::six_states(code);
  const Matrix nc = fock::embed(fock::number(c.truncation_c), model.space, 2).matrix();

  // Exact propagation over one sample interval, applied repeatedly.
  std::vector<Matrix> seeds;
  for (const auto& r : inputs) seeds.push_back(model.embed(r));
  const dyn::BlockPropagator step(gen, seeds, grid[1] - grid[0]);

  std::array<std::vector<double>, 6> fid;
  std::array<double, 6> pop{};
  std::array<double, 6> min_eig{};
  std::array<std::exception_ptr, 6> errors{};
  auto run = [&](std::size_t j) {
    try {
      Matrix s = seeds[j];
      min_eig[j] = 1.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0) s = step.apply(s);
        const Matrix r = model.reduce(s);
        fid[j].push_back(std::clamp((inputs[j] * r).trace().real(), 0.0, 1.0));
        pop[j] = std::max(pop[j], (s * nc).trace().real());
        const Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
        min_eig[j] = std::min(min_eig[j], es.eigenvalues().minCoeff());
      }
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

  HardwareResult out;
  out.curve.times = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 6; ++j) s += fid[j][i];
    out.curve.mean.push_back(s / 6.0);
  }
  out.max_c_population = *std::max_element(pop.begin(), pop.end());
  out.min_reduced_eigenvalue = *std::min_element(min_eig.begin(), min_eig.end());
  return out;
}

HardwareResult simulate_hardware(const HardwareConfig& c) {
  return simulate_hardware(c, codes::rl_code(c.truncation_a - 1));
}

dyn::Model effective_comparison_model(const HardwareConfig& c) {
  if (!(c.gamma_c1 > 0.0)) throw SpecError("effective comparison needs gamma_c1 > 0");
  return dyn::aqec_model(hardware_jump(c.truncation_a), c.alpha0, c.gamma_a1,
                         c.gamma_b1 + 4.0 * c.alpha1 * c.alpha1 / c.gamma_c1);
}

void write_csv(std::ostream& os, const fidelity::FidelityCurve& curve) {
  os << "# t_ms in milliseconds, F_mean dimensionless\n";
  os << "t_ms,F_mean\n";
  os.precision(10);
  for (std::size_t i = 0; i < curve.times.size(); ++i) os << curve.times[i] * 1e-3 << ',' << curve.mean[i] << '\n';
}

}  // namespace aqec::hw
