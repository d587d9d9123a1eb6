#pragma once

// Reinforcement-learning search over the two-coefficient-per-codeword ansatz:
// |0_L> = c0[0]|0> + c0[1]|4>, |1_L> = c1[0]|2> + c1[1]|6>, mode truncated at
// 6 photons. Each step evaluates the six-state mean fidelity of the full
// mode (x) qubit model at a fixed time.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <random>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aqec/codes.hpp"
#include "aqec/mlp.hpp"

namespace aqec::rl {

struct EnvConfig {
  std::size_t truncation = 6;
  std::size_t steps_per_episode = 11;
  double gamma_t = 0.6;
  double g = 400.0;        // in units of gamma_a
  double gamma_b = 1750.0;  // in units of gamma_a
  /// Zero every rate and coupling; the channel becomes the identity.
  bool diagnostic_zero_rates = false;
  /// Main-text variant: fidelities on a fixed (theta, phi) grid instead of the six Pauli summands.
  bool grid_observations = false;

  double break_even() const;
  void validate() const;
};

nlohmann::json to_json(const EnvConfig& c);
EnvConfig env_config_from_json(const nlohmann::json& j);

/// Four unconstrained reals, normalized per codeword on use.
struct Action {
  std::array<double, 2> c0{};  // over |0>, |4>
  std::array<double, 2> c1{};  // over |2>, |6>

  static Action from_vector(std::span<const double> v);
  std::array<double, 4> to_array() const { return {c0[0], c0[1], c1[0], c1[1]}; }
  /// Unit-normalized copy; idempotent and invariant under positive scaling.
  /// A zero codeword vector falls back to the first basis element.
  Action normalized() const;
};

Action rl_code_action();

struct Evaluation {
  std::array<double, 6> observations{};
  double mean_fidelity = 0.0;
  /// A codeword without photon content; evaluated with the partial recovery jump.
  bool degenerate = false;
};

struct EnvState {
  std::array<double, 6> observations{};
  std::size_t step = 0;
  double epsilon = 0.0;
  double mean_fidelity = 0.0;
  Action action;
};

struct StepResult {
  EnvState state;
  double reward = 0.0;
  bool done = false;
};

/// 1000 eps if eps > 0 and eps > eps_prev; 100 eps if eps > 0 otherwise; 0 if eps <= 0.
double reward(double eps_prev, double eps_next);

class Env {
 public:
  explicit Env(EnvConfig config);

  const EnvConfig& config() const noexcept { return config_; }

  /// Cached on the normalized coefficients quantized to a 1e-6 grid. Thread safe.
  Evaluation evaluate(const Action& action);

  EnvState reset(std::uint64_t seed);
  EnvState reset(std::mt19937_64& rng);
  StepResult step(const EnvState& state, const Action& action);

  std::size_t cache_size() const;
  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  Evaluation compute(const Action& normalized) const;

  EnvConfig config_;
  double break_even_;
  mutable std::mutex mutex_;
  std::map<std::array<long long, 4>, Evaluation> cache_;
  std::size_t evaluations_ = 0;
};

/// Codewords of a (normalized) action.
codes::CodePair action_code(const Action& action, std::size_t truncation = 6);

// --- policies ----------------------------------------------------------------------

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action act(const EnvState& state, std::mt19937_64& rng, bool deterministic) const = 0;
};

/// Uniform on the two coefficient circles, ignoring the state.
class RandomPolicy final : public Policy {
 public:
  Action act(const EnvState& state, std::mt19937_64& rng, bool deterministic) const override;
};

/// mean = MLP(2 obs - 1), state-independent log-std.
class GaussianMlpPolicy final : public Policy {
 public:
  GaussianMlpPolicy(Mlp mean, Eigen::VectorXd log_std) : mean_(std::move(mean)), log_std_(std::move(log_std)) {}
  Action act(const EnvState& state, std::mt19937_64& rng, bool deterministic) const override;
  Mlp& mean_net() noexcept { return mean_; }
  Eigen::VectorXd& log_std() noexcept { return log_std_; }
  nlohmann::json to_json() const;

 private:
  Mlp mean_;
  Eigen::VectorXd log_std_;
};

/// State-independent diagonal Gaussian (the cross-entropy method's search distribution).
class GaussianPolicy final : public Policy {
 public:
  GaussianPolicy(std::array<double, 4> mean, std::array<double, 4> stddev) : mean_(mean), std_(stddev) {}
  Action act(const EnvState& state, std::mt19937_64& rng, bool deterministic) const override;
  const std::array<double, 4>& mean() const noexcept { return mean_; }
  const std::array<double, 4>& stddev() const noexcept { return std_; }

 private:
  std::array<double, 4> mean_;
  std::array<double, 4> std_;
};

Eigen::VectorXd observation_features(const EnvState& s);

// --- training ----------------------------------------------------------------------

enum class Algorithm { ppo, cem };

struct TrainConfig {
  Algorithm algorithm = Algorithm::ppo;
  std::size_t episodes = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // PPO
  double learning_rate = 3e-4;
  double clip_ratio = 0.2;
  std::vector<int> hidden{64, 64};
  std::size_t episodes_per_batch = 8;
  std::size_t epochs = 10;
  std::size_t minibatch = 64;
  double discount = 0.99;
  double gae_lambda = 0.95;
  double init_log_std = 0.0;
  double reward_scale = 0.01;
  // CEM
  double elite_fraction = 0.2;
  double min_stddev = 0.02;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpisodeRewards {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct TrainResult {
  codes::CodePair best_code;
  Action best_action;
  double best_mean_fidelity = 0.0;
  std::vector<EpisodeRewards> reward_history;
  std::size_t evaluations = 0;
  std::shared_ptr<const Policy> policy;
};

TrainResult train(const EnvConfig& env_config, const TrainConfig& config);

/// Mean fidelity after each of the K steps of one rollout (deterministic actions
/// unless `stochastic`).
std::vector<double> episode_fidelity_trace(const EnvConfig& env_config, const Policy& policy,
                                           std::uint64_t seed, bool stochastic = false);

nlohmann::json to_json(const TrainResult& r);
/// Columns episode, r_min, r_mean, r_max.
void write_reward_csv(std::ostream& os, const TrainResult& r);

}  // namespace aqec::rl
