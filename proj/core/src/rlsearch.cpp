#include "aqec/rlsearch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "aqec/dynamics.hpp"
#include "aqec/error.hpp"
#include "aqec/fidelity.hpp"

namespace aqec::rl {

// --- config ------------------------------------------------------------------------

double EnvConfig::break_even() const { return fidelity::break_even_mean_fidelity(gamma_t); }

void EnvConfig::validate() const {
  if (steps_per_episode < 1) throw SpecError("env: steps_per_episode must be >= 1");
  if (truncation < 6) throw SpecError("env: truncation must be >= 6");
  if (!(gamma_t > 0.0)) throw SpecError("env: gamma_t must be > 0");
  if (!(g >= 0.0) || !(gamma_b >= 0.0)) throw SpecError("env: g and gamma_b must be >= 0");
}

nlohmann::json to_json(const EnvConfig& c) {
  return {{"truncation", c.truncation},
          {"steps_per_episode", c.steps_per_episode},
          {"gamma_t", c.gamma_t},
          {"g", c.g},
          {"gamma_b", c.gamma_b},
          {"diagnostic_zero_rates", c.diagnostic_zero_rates},
          {"grid_observations", c.grid_observations}};
}

EnvConfig env_config_from_json(const nlohmann::json& j) {
  EnvConfig c;
  try {
    c.truncation = j.value("truncation", c.truncation);
    c.steps_per_episode = j.value("steps_per_episode", c.steps_per_episode);
    c.gamma_t = j.value("gamma_t", c.gamma_t);
    c.g = j.value("g", c.g);
    c.gamma_b = j.value("gamma_b", c.gamma_b);
    c.diagnostic_zero_rates = j.value("diagnostic_zero_rates", c.diagnostic_zero_rates);
    c.grid_observations = j.value("grid_observations", c.grid_observations);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("env config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

const char* to_string(Algorithm a) { return a == Algorithm::ppo ? "ppo" : "cem"; }

}  // namespace

void TrainConfig::validate() const {
  if (episodes < 1000) throw SpecError("train: budget must be >= 1000 episodes");
  if (episodes_per_batch < 1 || epochs < 1 || minibatch < 1) throw SpecError("train: batch sizes must be >= 1");
  if (!(learning_rate > 0.0) || !(clip_ratio > 0.0)) throw SpecError("train: learning_rate and clip_ratio must be > 0");
  if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) throw SpecError("train: elite_fraction must be in (0, 1]");
  for (int h : hidden) {
    if (h < 1) throw SpecError("train: hidden sizes must be >= 1");
  }
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"algorithm", to_string(c.algorithm)},
          {"episodes", c.episodes},
          {"seed", c.seed},
          {"learning_rate", c.learning_rate},
          {"clip_ratio", c.clip_ratio},
          {"hidden", c.hidden},
          {"episodes_per_batch", c.episodes_per_batch},
          {"epochs", c.epochs},
          {"minibatch", c.minibatch},
          {"discount", c.discount},
          {"gae_lambda", c.gae_lambda},
          {"init_log_std", c.init_log_std},
          {"reward_scale", c.reward_scale},
          {"elite_fraction", c.elite_fraction},
          {"min_stddev", c.min_stddev}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    const auto algo = j.value("algorithm", std::string("ppo"));
    if (algo == "ppo") {
      c.algorithm = Algorithm::ppo;
    } else if (algo == "cem") {
      c.algorithm = Algorithm::cem;
    } else {
      throw SpecError("train: unknown algorithm '" + algo + "'");
    }
    c.episodes = j.value("episodes", c.episodes);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.clip_ratio = j.value("clip_ratio", c.clip_ratio);
    c.hidden = j.value("hidden", c.hidden);
    c.episodes_per_batch = j.value("episodes_per_batch", c.episodes_per_batch);
    c.epochs = j.value("epochs", c.epochs);
    c.minibatch = j.value("minibatch", c.minibatch);
    c.discount = j.value("discount", c.discount);
    c.gae_lambda = j.value("gae_lambda", c.gae_lambda);
    c.init_log_std = j.value("init_log_std", c.init_log_std);
    c.reward_scale = j.value("reward_scale", c.reward_scale);
    c.elite_fraction = j.value("elite_fraction", c.elite_fraction);
    c.min_stddev = j.value("min_stddev", c.min_stddev);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

// --- actions -----------------------------------------------------------------------

Action Action::from_vector(std::span<const double> v) {
  if (v.size() != 4) throw DimensionError("action needs 4 coefficients");
  return Action{{v[0], v[1]}, {v[2], v[3]}};
}

Action Action::normalized() const {
  auto norm2 = [](const std::array<double, 2>& c) {
    const double n = std::hypot(c[0], c[1]);
    if (!(n > 0.0) || !std::isfinite(n)) return std::array<double, 2>{1.0, 0.0};
    return std::array<double, 2>{c[0] / n, c[1] / n};
  };
  return Action{norm2(c0), norm2(c1)};
}

Action rl_code_action() { return Action{{0.0, 1.0}, {1.0, 0.0}}; }

codes::CodePair action_code(const Action& action, std::size_t truncation) {
  const Action a = action.normalized();
  return codes::code_pair_from_coeffs(a.c0, a.c1, truncation, "rl-search");
}

double reward(double eps_prev, double eps_next) {
  if (!(eps_next > 0.0)) return 0.0;
  return eps_next > eps_prev ? 1000.0 * eps_next : 100.0 * eps_next;
}

// --- environment -------------------------------------------------------------------

Env::Env(EnvConfig config) : config_(std::move(config)), break_even_(config_.break_even()) { config_.validate(); }

Evaluation Env::compute(const Action& a) const {
  const auto code = action_code(a, config_.truncation);
  const bool degenerate = std::abs(a.c0[1]) < 1e-12;
  const fock::Operator jump = degenerate ? codes::partial_engineered_jump(code) : codes::engineered_jump(code);
  const bool zero = config_.diagnostic_zero_rates;
  const auto model = dyn::aqec_model(jump, zero ? 0.0 : config_.g, zero ? 0.0 : 1.0, zero ? 0.0 : config_.gamma_b);
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);

  const auto inputs = fidelity::six_states(code);
  std::vector<Matrix> seeds;
  for (const auto& r : inputs) seeds.push_back(model.embed(r));
  const dyn::BlockPropagator prop(gen, seeds, config_.gamma_t);
  const fidelity::Channel channel = [&](const Matrix& rho) { return model.reduce(prop.apply(model.embed(rho))); };
  const fidelity::CodeSpaceEvolution ev(channel, code);

  Evaluation e;
  e.degenerate = degenerate;
  e.mean_fidelity = ev.mean_fidelity(0);
  if (config_.grid_observations) {
    const double pi = std::numbers::pi;
    const std::array<std::pair<double, double>, 6> pts{
        {{pi / 4, 0}, {pi / 4, pi}, {pi / 2, 0}, {pi / 2, pi}, {3 * pi / 4, 0}, {3 * pi / 4, pi}}};
    for (std::size_t k = 0; k < 6; ++k) e.observations[k] = ev.state_fidelity(pts[k].first, pts[k].second, 0);
  } else {
    e.observations = ev.observations(0);
  }
  for (auto& o : e.observations) o = std::clamp(o, 0.0, 1.0);
  return e;
}

Evaluation Env::evaluate(const Action& action) {
  const Action a = action.normalized();
  std::array<long long, 4> key{};
  const auto v = a.to_array();
  for (std::size_t i = 0; i < 4; ++i) key[i] = std::llround(v[i] * 1e6);
  {
    std::lock_guard lock(mutex_);
    ++evaluations_;
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  // Evaluate the grid point itself so cached and fresh results agree exactly.
  Action q{{key[0] * 1e-6, key[1] * 1e-6}, {key[2] * 1e-6, key[3] * 1e-6}};
  Evaluation e = compute(q.normalized());
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, e).first->second;
}

std::size_t Env::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

namespace {

Action random_action(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const double a = ang(rng);
  const double b = ang(rng);
  return Action{{std::cos(a), std::sin(a)}, {std::cos(b), std::sin(b)}};
}

}  // namespace

EnvState Env::reset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return reset(rng);
}

EnvState Env::reset(std::mt19937_64& rng) {
  const Action a = random_action(rng).normalized();
  const Evaluation e = evaluate(a);
  EnvState s;
  s.observations = e.observations;
  s.mean_fidelity = e.mean_fidelity;
  s.epsilon = e.mean_fidelity - break_even_;
  if (e.degenerate) s.epsilon = std::min(s.epsilon, 0.0);
  s.action = a;
  return s;
}

StepResult Env::step(const EnvState& state, const Action& action) {
  if (state.step >= config_.steps_per_episode) throw Error("env_step called on a finished episode");
  const Action a = action.normalized();
  const Evaluation e = evaluate(a);
  StepResult r;
  r.state.observations = e.observations;
  r.state.mean_fidelity = e.mean_fidelity;
  r.state.epsilon = e.mean_fidelity - break_even_;
  if (e.degenerate) r.state.epsilon = std::min(r.state.epsilon, 0.0);
  r.state.step = state.step + 1;
  r.state.action = a;
  r.reward = e.degenerate ? 0.0 : reward(state.epsilon, r.state.epsilon);
  r.done = r.state.step == config_.steps_per_episode;
  return r;
}

// --- policies ----------------------------------------------------------------------

Eigen::VectorXd observation_features(const EnvState& s) {
  Eigen::VectorXd x(6);
  for (int i = 0; i < 6; ++i) x(i) = 2.0 * s.observations[static_cast<std::size_t>(i)] - 1.0;
  return x;
}

Action RandomPolicy::act(const EnvState&, std::mt19937_64& rng, bool) const { return random_action(rng); }

Action GaussianMlpPolicy::act(const EnvState& state, std::mt19937_64& rng, bool deterministic) const {
  const Eigen::VectorXd mu = mean_.predict(observation_features(state)).col(0);
  std::array<double, 4> v{};
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 4; ++i) v[i] = mu(i) + (deterministic ? 0.0 : std::exp(log_std_(i)) * n(rng));
  return Action::from_vector(v);
}

nlohmann::json GaussianMlpPolicy::to_json() const {
  return {{"mean", mean_.to_json()}, {"log_std", std::vector<double>(log_std_.data(), log_std_.data() + log_std_.size())}};
}

Action GaussianPolicy::act(const EnvState&, std::mt19937_64& rng, bool deterministic) const {
  std::array<double, 4> v{};
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 4; ++i) v[i] = mean_[i] + (deterministic ? 0.0 : std_[i] * n(rng));
  return Action::from_vector(v);
}

// --- training ----------------------------------------------------------------------

namespace {

struct Transition {
  Eigen::VectorXd features;
  Eigen::Vector4d action;
  double log_prob = 0.0;
  double reward = 0.0;
  double mean_fidelity = 0.0;
  bool degenerate = false;
  Action normalized;
};

using Episode = std::vector<Transition>;

double gaussian_log_prob(const Eigen::Vector4d& a, const Eigen::Vector4d& mu, const Eigen::VectorXd& log_std) {
  double lp = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double z = (a(i) - mu(i)) / std::exp(log_std(i));
    lp += -0.5 * z * z - log_std(i) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

/// Runs `count` episodes starting at global index `first`, each with its own derived seed.
template <class Sampler>
std::vector<Episode> collect(Env& env, std::size_t first, std::size_t count, std::uint64_t seed, unsigned threads,
                             const Sampler& sample) {
  std::vector<Episode> out(count);
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      std::mt19937_64 rng(dyn::derive_seed(seed, first + i));
      EnvState s = env.reset(rng);
      Episode ep;
      for (std::size_t k = 0; k < env.config().steps_per_episode; ++k) {
        Transition t;
        t.features = observation_features(s);
        double lp = 0.0;
        t.action = sample(t.features, rng, lp);
        t.log_prob = lp;
        const std::array<double, 4> v{t.action(0), t.action(1), t.action(2), t.action(3)};
        const StepResult r = env.step(s, Action::from_vector(v));
        t.reward = r.reward;
        t.mean_fidelity = r.state.mean_fidelity;
        t.degenerate = std::abs(r.state.action.c0[1]) < 1e-12;
        t.normalized = r.state.action;
        ep.push_back(std::move(t));
        s = r.state;
      }
      out[i] = std::move(ep);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) run(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void record(const std::vector<Episode>& batch, TrainResult& result) {
  for (const auto& ep : batch) {
    EpisodeRewards r{ep.front().reward, 0.0, ep.front().reward};
    for (const auto& t : ep) {
      r.min = std::min(r.min, t.reward);
      r.max = std::max(r.max, t.reward);
      r.mean += t.reward / static_cast<double>(ep.size());
      if (!t.degenerate && t.mean_fidelity > result.best_mean_fidelity) {
        result.best_mean_fidelity = t.mean_fidelity;
        result.best_action = t.normalized;
      }
    }
    result.reward_history.push_back(r);
  }
}

void ppo_update(const std::vector<Episode>& batch, const TrainConfig& cfg, Mlp& mean_net, Eigen::VectorXd& log_std,
                Mlp& value_net, Adam& opt_pi, Adam& opt_std, Adam& opt_v, std::mt19937_64& rng) {
  std::vector<const Transition*> flat;
  std::vector<double> adv;
  std::vector<double> ret;
  for (const auto& ep : batch) {
    const auto n = static_cast<Eigen::Index>(ep.size());
    RealMatrix feats(6, n);
    for (Eigen::Index k = 0; k < n; ++k) feats.col(k) = ep[static_cast<std::size_t>(k)].features;
    const RealMatrix v = value_net.predict(feats);
    double gae = 0.0;
    std::vector<double> a(ep.size());
    for (std::size_t k = ep.size(); k-- > 0;) {
      const double next_v = (k + 1 < ep.size()) ? v(0, static_cast<Eigen::Index>(k + 1)) : 0.0;
      const double delta = cfg.reward_scale * ep[k].reward + cfg.discount * next_v - v(0, static_cast<Eigen::Index>(k));
      gae = delta + cfg.discount * cfg.gae_lambda * gae;
      a[k] = gae;
    }
    for (std::size_t k = 0; k < ep.size(); ++k) {
      flat.push_back(&ep[k]);
      adv.push_back(a[k]);
      ret.push_back(a[k] + v(0, static_cast<Eigen::Index>(k)));
    }
  }
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double x : adv) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n) + 1e-8;
  for (double& x : adv) x = (x - mean) / sd;

  std::vector<std::size_t> idx(flat.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t start = 0; start < idx.size(); start += cfg.minibatch) {
      const std::size_t stop = std::min(idx.size(), start + cfg.minibatch);
      const auto m = static_cast<Eigen::Index>(stop - start);
      RealMatrix feats(6, m);
      for (Eigen::Index k = 0; k < m; ++k) feats.col(k) = flat[idx[start + static_cast<std::size_t>(k)]]->features;

      mean_net.zero_grad();
      const RealMatrix mu = mean_net.forward(feats);
      RealMatrix g_mu = RealMatrix::Zero(4, m);
      Eigen::VectorXd g_std = Eigen::VectorXd::Zero(4);
      const Eigen::VectorXd sigma = log_std.array().exp();
      for (Eigen::Index k = 0; k < m; ++k) {
        const std::size_t i = idx[start + static_cast<std::size_t>(k)];
        const Transition& t = *flat[i];
        const double lp = gaussian_log_prob(t.action, mu.col(k), log_std);
        const double ratio = std::exp(lp - t.log_prob);
        const double A = adv[i];
        const bool clipped = (A >= 0.0 && ratio > 1.0 + cfg.clip_ratio) || (A < 0.0 && ratio < 1.0 - cfg.clip_ratio);
        if (clipped) continue;
        const double coef = -ratio * A / static_cast<double>(m);
        for (int d = 0; d < 4; ++d) {
          const double z = (t.action(d) - mu(d, k)) / sigma(d);
          g_mu(d, k) = coef * z / sigma(d);
          g_std(d) += coef * (z * z - 1.0);
        }
      }
      mean_net.backward(g_mu);
      opt_pi.step(mean_net);
      opt_std.step(log_std, g_std);
      log_std = log_std.cwiseMax(-5.0).cwiseMin(1.0);

      value_net.zero_grad();
      const RealMatrix v = value_net.forward(feats);
      RealMatrix g_v(1, m);
      for (Eigen::Index k = 0; k < m; ++k) g_v(0, k) = (v(0, k) - ret[idx[start + static_cast<std::size_t>(k)]]) / static_cast<double>(m);
      value_net.backward(g_v);
      opt_v.step(value_net);
    }
  }
}

TrainResult train_ppo(Env& env, const TrainConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<int> sizes{6};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(4);
  Mlp mean_net(sizes, rng, 0.01);
  sizes.back() = 1;
  Mlp value_net(sizes, rng, 1.0);
  Eigen::VectorXd log_std = Eigen::VectorXd::Constant(4, cfg.init_log_std);
  Adam opt_pi(cfg.learning_rate), opt_std(cfg.learning_rate), opt_v(cfg.learning_rate);

  TrainResult result{codes::rl_code(), {}, -1.0, {}, 0, nullptr};
  std::size_t done = 0;
  while (done < cfg.episodes) {
    const std::size_t count = std::min(cfg.episodes_per_batch, cfg.episodes - done);
    const Mlp frozen = mean_net;
    const Eigen::VectorXd frozen_std = log_std;
    auto sample = [&](const Eigen::VectorXd& x, std::mt19937_64& r, double& lp) {
      const Eigen::Vector4d mu = frozen.predict(x).col(0);
      std::normal_distribution<double> n(0.0, 1.0);
      Eigen::Vector4d a;
      for (int i = 0; i < 4; ++i) a(i) = mu(i) + std::exp(frozen_std(i)) * n(r);
      lp = gaussian_log_prob(a, mu, frozen_std);
      return a;
    };
    const auto batch = collect(env, done, count, cfg.seed, cfg.threads, sample);
    record(batch, result);
    ppo_update(batch, cfg, mean_net, log_std, value_net, opt_pi, opt_std, opt_v, rng);
    done += count;
  }
  result.policy = std::make_shared<GaussianMlpPolicy>(mean_net, log_std);
  return result;
}

TrainResult train_cem(Env& env, const TrainConfig& cfg) {
  std::array<double, 4> mean{};
  std::array<double, 4> stddev{1.0, 1.0, 1.0, 1.0};
  TrainResult result{codes::rl_code(), {}, -1.0, {}, 0, nullptr};
  std::size_t done = 0;
  while (done < cfg.episodes) {
    const std::size_t count = std::min(cfg.episodes_per_batch, cfg.episodes - done);
    auto sample = [&](const Eigen::VectorXd&, std::mt19937_64& r, double& lp) {
      std::normal_distribution<double> n(0.0, 1.0);
      Eigen::Vector4d a;
      for (int i = 0; i < 4; ++i) a(i) = mean[i] + stddev[i] * n(r);
      lp = 0.0;
      return a;
    };
    const auto batch = collect(env, done, count, cfg.seed, cfg.threads, sample);
    record(batch, result);

    std::vector<const Transition*> all;
    for (const auto& ep : batch) {
      for (const auto& t : ep) all.push_back(&t);
    }
    const auto n_elite = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(cfg.elite_fraction * static_cast<double>(all.size()))));
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(n_elite, all.size())), all.end(),
                      [](const Transition* a, const Transition* b) {
                        const double fa = a->degenerate ? -1.0 : a->mean_fidelity;
                        const double fb = b->degenerate ? -1.0 : b->mean_fidelity;
                        return fa > fb;
                      });
    const std::size_t k = std::min(n_elite, all.size());
    for (int d = 0; d < 4; ++d) {
      double m = 0.0;
      for (std::size_t i = 0; i < k; ++i) m += all[i]->action(d);
      m /= static_cast<double>(k);
      double v = 0.0;
      for (std::size_t i = 0; i < k; ++i) v += (all[i]->action(d) - m) * (all[i]->action(d) - m);
      mean[static_cast<std::size_t>(d)] = m;
      stddev[static_cast<std::size_t>(d)] = std::sqrt(v / static_cast<double>(k)) + cfg.min_stddev;
    }
    done += count;
  }
  result.policy = std::make_shared<GaussianPolicy>(mean, stddev);
  return result;
}

}  // namespace

TrainResult train(const EnvConfig& env_config, const TrainConfig& config) {
  config.validate();
  Env env(env_config);
  TrainResult r = config.algorithm == Algorithm::ppo ? train_ppo(env, config) : train_cem(env, config);
  r.best_code = action_code(r.best_action, env_config.truncation);
  r.evaluations = env.evaluations();
  return r;
}

std::vector<double> episode_fidelity_trace(const EnvConfig& env_config, const Policy& policy, std::uint64_t seed,
                                           bool stochastic) {
  Env env(env_config);
  std::mt19937_64 rng(seed);
  EnvState s = env.reset(rng);
  std::vector<double> out;
  for (std::size_t k = 0; k < env_config.steps_per_episode; ++k) {
    const StepResult r = env.step(s, policy.act(s, rng, !stochastic));
    out.push_back(r.state.mean_fidelity);
    s = r.state;
  }
  return out;
}

nlohmann::json to_json(const TrainResult& r) {
  const auto& z = r.best_code.zero().amplitudes();
  const auto& o = r.best_code.one().amplitudes();
  nlohmann::json j{{"best_action", {{"c0", r.best_action.c0}, {"c1", r.best_action.c1}}},
                   {"best_mean_fidelity", r.best_mean_fidelity},
                   {"overlap_zero_4", std::norm(z(4))},
                   {"overlap_one_2", std::norm(o(2))},
                   {"episodes", r.reward_history.size()},
                   {"evaluations", r.evaluations}};
  if (const auto* p = dynamic_cast<const GaussianMlpPolicy*>(r.policy.get())) {
    j["policy"] = p->to_json();
  } else if (const auto* g = dynamic_cast<const GaussianPolicy*>(r.policy.get())) {
    j["policy"] = {{"mean", g->mean()}, {"stddev", g->stddev()}};
  }
  return j;
}

void write_reward_csv(std::ostream& os, const TrainResult& r) {
  os << "# rewards dimensionless (1000 or 100 times the mean-fidelity gain over break-even)\n";
  os << "episode,r_min,r_mean,r_max\n";
  os.precision(10);
  for (std::size_t i = 0; i < r.reward_history.size(); ++i) {
    const auto& h = r.reward_history[i];
    os << i << ',' << h.min << ',' << h.mean << ',' << h.max << '\n';
  }
}

}  // namespace aqec::rl
