#include <benchmark/benchmark.h>

#include "aqec/codes.hpp"
#include "aqec/dynamics.hpp"
#include "aqec/fidelity.hpp"
#include "aqec/rlsearch.hpp"

using namespace aqec;

namespace {

dyn::Model rl_model() { return dyn::aqec_model(codes::engineered_jump(codes::rl_code()), 400.0, 1.0, 1750.0); }

void BM_LindbladRhs(benchmark::State& state) {
  const auto model = rl_model();
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);
  const Matrix rho = model.embed(fidelity::six_states(codes::rl_code())[0]);
  for (auto _ : state) benchmark::DoNotOptimize(gen.apply(rho));
}
BENCHMARK(BM_LindbladRhs);

void BM_EvolveDp45(benchmark::State& state) {
  const auto model = dyn::aqec_model(codes::engineered_jump(codes::rl_code()), 4.0, 1.0, 17.5);
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);
  const fock::DensityMatrix rho(model.space, model.embed(fidelity::six_states(codes::rl_code())[0]));
  const auto grid = dyn::uniform_grid(0.6, 6);
  for (auto _ : state) benchmark::DoNotOptimize(dyn::evolve(rho, gen, grid));
}
BENCHMARK(BM_EvolveDp45)->Unit(benchmark::kMillisecond);

void BM_PropagateCodeSpace(benchmark::State& state) {
  const auto model = rl_model();
  const auto code = codes::rl_code();
  for (auto _ : state) benchmark::DoNotOptimize(fidelity::propagate_code_space(model, code, 4.0, 80));
}
BENCHMARK(BM_PropagateCodeSpace)->Unit(benchmark::kMillisecond);

void BM_McwfTrajectory(benchmark::State& state) {
  const auto model = rl_model();
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);
  const auto psi = model.embed(codes::rl_code().bloch_state(1.0, 0.5));
  const auto grid = dyn::uniform_grid(0.6, 60);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(dyn::mcwf_trajectory(psi, gen, grid, ++seed));
}
BENCHMARK(BM_McwfTrajectory)->Unit(benchmark::kMillisecond);

void BM_EnvEvaluateUncached(benchmark::State& state) {
  rl::Env env(rl::EnvConfig{});
  double x = 0.1;
  for (auto _ : state) {
    x += 1e-3;
    benchmark::DoNotOptimize(env.evaluate(rl::Action{{x, 1.0}, {1.0, x}}));
  }
}
BENCHMARK(BM_EnvEvaluateUncached)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
