#pragma once

// Encoding mode (x) qubit (x) lossy mode c, under the rotating-frame effective
// Hamiltonians. Times in microseconds, frequencies and rates in rad/us.

#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aqec/codes.hpp"
#include "aqec/dynamics.hpp"
#include "aqec/fidelity.hpp"

namespace aqec::hw {

enum class Variant { heff0, heff1 };

struct HardwareConfig {
  double alpha0;
  double alpha1;
  double gamma_a1;
  double gamma_b1;
  double gamma_c1;
  std::size_t truncation_a = 7;
  std::size_t truncation_c = 4;
  double t_final = 3000.0;
  std::size_t samples = 300;
  Variant variant = Variant::heff0;

  /// The reference parameter set (alpha0/2pi = 0.05 MHz, alpha1/2pi = 0.07 MHz,
  /// gamma_a1/2pi = 0.2 kHz, gamma_b1/2pi = 2 kHz, gamma_c1/2pi = 0.12 MHz).
  static HardwareConfig reference();

  /// Throws on bad truncations or negative rates.
  void validate() const;
  /// False unless gamma_c1 >> alpha1 >= alpha0 (factor 1.5 taken as "much larger").
  bool regime_ok() const;
};

/// Units: "MHz*2pi", "kHz*2pi", "rad/us". Each frequency/rate is {"value": x, "unit": u};
/// t_final is {"value": x, "unit": "us"|"ms"}.
HardwareConfig hardware_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HardwareConfig& c);

/// |2><1| + |4><3| on the encoding mode.
fock::Operator hardware_jump(std::size_t dim);

fock::Operator build_heff0(const HardwareConfig& c);
fock::Operator build_heff1(const HardwareConfig& c);

/// Hamiltonian for c.variant plus dissipators gamma_a1 a, gamma_b1 sigma-, gamma_c1 c.
dyn::Model hardware_model(const HardwareConfig& c);

struct HardwareResult {
  fidelity::FidelityCurve curve;  // t in us
  /// Largest <c^dag c> over all samples and the six input states.
  double max_c_population = 0.0;
  /// Smallest eigenvalue seen in any reduced encoding-mode state.
  double min_reduced_eigenvalue = 0.0;
};

/// Six-state mean fidelity of the reduced encoding mode on a uniform grid of
/// `samples` intervals, by exact propagation of the time-independent generator.
HardwareResult simulate_hardware(const HardwareConfig& c, const codes::CodePair& code, unsigned threads = 1);
HardwareResult simulate_hardware(const HardwareConfig& c);

/// Single-mode comparison model: g = alpha0, gamma_b = gamma_b1 + 4 alpha1^2 / gamma_c1,
/// gamma_a = gamma_a1, with the unnormalized hardware jump. heff1 approaches it as gamma_c1 grows;
/// heff0 does not, since its exchange is off for odd photon numbers.
dyn::Model effective_comparison_model(const HardwareConfig& c);

/// Columns t_ms, F_mean.
void write_csv(std::ostream& os, const fidelity::FidelityCurve& curve_us);

}  // namespace aqec::hw
