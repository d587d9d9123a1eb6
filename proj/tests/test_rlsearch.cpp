#include <doctest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aqec/codes.hpp"
#include "aqec/dynamics.hpp"
#include "aqec/error.hpp"
#include "aqec/fidelity.hpp"
#include "aqec/mlp.hpp"
#include "aqec/rlsearch.hpp"

using namespace aqec;
using namespace aqec::rl;

TEST_CASE("reward shaping") {
  CHECK(reward(0.01, 0.05) == doctest::Approx(50.0));
  CHECK(reward(0.05, 0.02) == doctest::Approx(2.0));
  CHECK(reward(0.05, 0.05) == doctest::Approx(5.0));
  CHECK(reward(-0.2, 0.0) == 0.0);
  CHECK(reward(-0.2, -0.1) == 0.0);
}

TEST_CASE("action normalization") {
  const Action a = Action::from_vector(std::vector<double>{3.0, 4.0, -1.0, 0.0});
  const Action n = a.normalized();
  CHECK(n.c0[0] == doctest::Approx(0.6));
  CHECK(n.c0[1] == doctest::Approx(0.8));
  CHECK(n.c1[0] == doctest::Approx(-1.0));
  const Action nn = n.normalized();
  CHECK(nn.c0[1] == n.c0[1]);
  const Action z = Action{{0.0, 0.0}, {0.0, 2.0}}.normalized();
  CHECK(z.c0[0] == 1.0);
  CHECK(z.c1[1] == 1.0);
  CHECK_THROWS_AS(Action::from_vector(std::vector<double>{1.0, 2.0}), DimensionError);
}

TEST_CASE("the RL action is evaluated like the full model") {
  Env env(EnvConfig{});
  const auto e = env.evaluate(rl_code_action());
  CHECK_FALSE(e.degenerate);
  const auto code = codes::rl_code();
  const auto model = dyn::aqec_model(codes::engineered_jump(code), 400.0, 1.0, 1750.0);
  const double ref = fidelity::propagate_code_space(model, code, 0.6, 1).mean_fidelity(1);
  CHECK(e.mean_fidelity == doctest::Approx(ref).epsilon(1e-9));
  double s = 0.0;
  for (double o : e.observations) s += o / 6.0;
  CHECK(s == doctest::Approx(e.mean_fidelity).epsilon(1e-9));

  const auto code2 = action_code(rl_code_action());
  CHECK(std::norm(code2.zero().amplitudes()(4)) == doctest::Approx(1.0));
  CHECK(std::norm(code2.one().amplitudes()(2)) == doctest::Approx(1.0));
}

TEST_CASE("evaluation is invariant under positive scaling and cached") {
  Env env(EnvConfig{});
  const Action a{{0.3, 0.9}, {0.8, -0.2}};
  const Action b{{0.6, 1.8}, {1.6, -0.4}};
  const auto ea = env.evaluate(a);
  CHECK(env.cache_size() == 1);
  const auto eb = env.evaluate(b);
  CHECK(env.cache_size() == 1);
  CHECK(env.evaluations() == 2);
  CHECK(ea.mean_fidelity == eb.mean_fidelity);
  CHECK(ea.observations == eb.observations);
}

TEST_CASE("diagnostic mode gives unit observations") {
  EnvConfig cfg;
  cfg.diagnostic_zero_rates = true;
  Env env(cfg);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = env.reset(seed);
    for (double o : s.observations) CHECK(o == doctest::Approx(1.0).epsilon(1e-10));
  }
  cfg.grid_observations = true;
  Env grid(cfg);
  for (double o : grid.evaluate(Action{{0.4, 0.3}, {0.1, 0.5}}).observations) CHECK(o == doctest::Approx(1.0));
}

TEST_CASE("reset is deterministic in the seed") {
  Env env(EnvConfig{});
  const auto a = env.reset(7);
  const auto b = env.reset(7);
  const auto c = env.reset(8);
  CHECK(a.action.to_array() == b.action.to_array());
  CHECK(a.observations == b.observations);
  CHECK(a.action.to_array() != c.action.to_array());
  CHECK(a.step == 0);
}

TEST_CASE("the RL code is a local optimum of the ansatz") {
  Env env(EnvConfig{});
  const double best = env.evaluate(rl_code_action()).mean_fidelity;
  for (int i = 0; i < 4; ++i) {
    for (double d : {-0.05, 0.05}) {
      auto v = rl_code_action().to_array();
      v[static_cast<std::size_t>(i)] += d;
      CHECK(env.evaluate(Action::from_vector(v)).mean_fidelity <= best + 1e-9);
    }
  }
}

TEST_CASE("a vacuum-only logical zero is degenerate and earns nothing") {
  Env env(EnvConfig{});
  const auto s0 = env.reset(3);
  const auto r = env.step(s0, Action{{1.0, 0.0}, {1.0, 0.0}});
  CHECK(r.reward == 0.0);
  CHECK(r.state.epsilon <= 0.0);
  CHECK(r.state.step == 1);
  CHECK_FALSE(r.done);
}

TEST_CASE("episodes end after K steps") {
  EnvConfig cfg;
  cfg.steps_per_episode = 3;
  Env env(cfg);
  auto s = env.reset(1);
  StepResult r;
  for (int k = 0; k < 3; ++k) {
    r = env.step(s, rl_code_action());
    s = r.state;
  }
  CHECK(r.done);
  CHECK(r.reward > 0.0);
  CHECK_THROWS_AS(env.step(s, rl_code_action()), Error);
}

TEST_CASE("MLP gradients match finite differences") {
  std::mt19937_64 rng(11);
  Mlp net({3, 5, 2}, rng);
  RealMatrix x = RealMatrix::Random(3, 4);
  RealMatrix target = RealMatrix::Random(2, 4);
  auto loss = [&](const Mlp& m) { return 0.5 * (m.predict(x) - target).squaredNorm(); };
  net.zero_grad();
  net.backward(net.forward(x) - target);
  const double h = 1e-6;
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    for (Eigen::Index k = 0; k < net.weights()[l].size(); ++k) {
      Mlp up = net, down = net;
      up.weights()[l].data()[k] += h;
      down.weights()[l].data()[k] -= h;
      const double fd = (loss(up) - loss(down)) / (2 * h);
      CHECK(net.weight_grads()[l].data()[k] == doctest::Approx(fd).epsilon(1e-5));
    }
    for (Eigen::Index k = 0; k < net.biases()[l].size(); ++k) {
      Mlp up = net, down = net;
      up.biases()[l](k) += h;
      down.biases()[l](k) -= h;
      CHECK(net.bias_grads()[l](k) == doctest::Approx((loss(up) - loss(down)) / (2 * h)).epsilon(1e-5));
    }
  }
  const auto back = Mlp::from_json(net.to_json());
  CHECK((back.predict(x) - net.predict(x)).norm() < 1e-12);
}

TEST_CASE("Adam descends a quadratic") {
  Adam opt(0.1);
  Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 2.0);
  for (int i = 0; i < 500; ++i) opt.step(p, 2.0 * p);
  CHECK(p.norm() < 1e-2);
}

TEST_CASE("policies produce finite actions") {
  std::mt19937_64 rng(4);
  Env env(EnvConfig{});
  const auto s = env.reset(4);
  const RandomPolicy rp;
  const auto a = rp.act(s, rng, false);
  CHECK(std::hypot(a.c0[0], a.c0[1]) == doctest::Approx(1.0));
  const GaussianPolicy gp({0.0, 1.0, 1.0, 0.0}, {0.1, 0.1, 0.1, 0.1});
  CHECK(gp.act(s, rng, true).to_array() == rl_code_action().to_array());
  GaussianMlpPolicy mp(Mlp({6, 8, 4}, rng), Eigen::VectorXd::Constant(4, -1.0));
  for (double v : mp.act(s, rng, false).to_array()) CHECK(std::isfinite(v));
  CHECK(observation_features(s).size() == 6);
}

TEST_CASE("fidelity traces stay in [0, 1]") {
  const GaussianPolicy gp({0.2, 1.0, 1.0, 0.1}, {0.3, 0.3, 0.3, 0.3});
  EnvConfig cfg;
  cfg.steps_per_episode = 4;
  for (bool stochastic : {false, true}) {
    const auto tr = episode_fidelity_trace(cfg, gp, 5, stochastic);
    REQUIRE(tr.size() == 4);
    for (double f : tr) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
}

TEST_CASE("configuration validation and JSON") {
  EnvConfig e;
  e.steps_per_episode = 5;
  e.gamma_t = 0.4;
  const auto e2 = env_config_from_json(to_json(e));
  CHECK(e2.steps_per_episode == 5);
  CHECK(e2.gamma_t == 0.4);
  e.truncation = 4;
  CHECK_THROWS_AS(e.validate(), SpecError);

  TrainConfig t;
  t.algorithm = Algorithm::cem;
  t.episodes = 1500;
  const auto t2 = train_config_from_json(to_json(t));
  CHECK(t2.algorithm == Algorithm::cem);
  CHECK(t2.episodes == 1500);
  t.episodes = 999;
  CHECK_THROWS_AS(t.validate(), SpecError);
  CHECK_THROWS_AS(train_config_from_json(nlohmann::json{{"algorithm", "dqn"}}), SpecError);
}

TEST_CASE("short CEM search finds the Fock-state code") {
  EnvConfig env;
  env.steps_per_episode = 3;
  TrainConfig cfg;
  cfg.algorithm = Algorithm::cem;
  cfg.episodes = 1000;
  cfg.episodes_per_batch = 20;
  cfg.seed = 2;
  const auto r = train(env, cfg);
  CHECK(r.reward_history.size() == 1000);
  CHECK(r.evaluations > 0);
  CHECK(std::norm(r.best_code.zero().amplitudes()(4)) > 0.95);
  CHECK(std::norm(r.best_code.one().amplitudes()(2)) > 0.95);
  std::ostringstream os;
  write_reward_csv(os, r);
  CHECK(os.str().find("episode,r_min,r_mean,r_max") != std::string::npos);
  const auto j = to_json(r);
  CHECK(j.at("episodes") == 1000);
  CHECK(j.contains("policy"));
}
