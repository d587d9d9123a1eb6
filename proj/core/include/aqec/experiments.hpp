#pragma once

// Declarative experiment runner: one JSON spec in, CSV data and a manifest out.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace aqec::exp {

enum class Kind {
  fidelity_curve,
  bloch_heatmap,
  lambda_sweep,
  shifted_sweep,
  rl_train,
  trajectories,
  hardware,
  kl_compare,
  naive_compare,
};

std::string to_string(Kind k);
/// Throws SpecError for unknown names.
Kind parse_kind(const std::string& s);

struct CatalogEntry {
  Kind kind;
  std::string name;
  std::string figure;
  std::string description;
  /// Parameter names accepted by this kind; anything else is rejected.
  std::vector<std::string> parameters;
};

std::vector<CatalogEntry> list_experiments();

struct ExperimentSpec {
  Kind kind = Kind::fidelity_curve;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 1;
  std::filesystem::path output = "out";
};

/// {"kind", "parameters"?, "seed"?, "output"?}; unknown top-level or parameter
/// keys are SpecErrors.
ExperimentSpec parse_spec(const nlohmann::json& j);
ExperimentSpec load_spec(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

/// A computed quantity next to a built-in reference value.
struct Reference {
  std::string quantity;
  double value = 0.0;
  double reference = 0.0;
  /// "reported" for published numbers, "derived" for closed forms.
  std::string source;
};

struct RunReport {
  std::filesystem::path out_dir;
  std::vector<std::string> files;
  std::vector<Reference> references;
  nlohmann::json manifest;
};

/// Writes the artifacts and manifest.json into the output directory.
RunReport run(const ExperimentSpec& spec, const RunOptions& options = {});

/// Exit status for an exception escaping run(): 2 for malformed input, 3 for numerical failures.
int exit_code_for(const std::exception& e);
nlohmann::json error_json(const std::exception& e);

}  // namespace aqec::exp
