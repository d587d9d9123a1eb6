#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "aqec/dynamics.hpp"
#include "aqec/error.hpp"

namespace aqec::dyn {

namespace {

struct DriftRhs {
  const Lindbladian* gen;
  Vector operator()(double, const Vector& psi) const { return gen->drift(psi); }
};

double uniform_open(std::mt19937_64& rng) {
  // (0, 1): never exactly 0, so a pure state always has norm above threshold.
  std::uniform_real_distribution<double> u(std::numeric_limits<double>::min(), 1.0);
  return u(rng);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over the pair.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Trajectory mcwf_trajectory(const Ket& psi0, const Operator& hamiltonian,
                           const NoiseChannel& channel, std::span<const double> t_grid,
                           std::uint64_t seed, const McwfOptions& options) {
  return mcwf_trajectory(psi0, Lindbladian(hamiltonian, channel), t_grid, seed, options);
}

Trajectory mcwf_trajectory(const Ket& psi0, const Lindbladian& generator,
                           std::span<const double> t_grid, std::uint64_t seed,
                           const McwfOptions& options) {
  fock::require_same_space(generator.space(), psi0.space(), "mcwf_trajectory");
  require_time_grid(t_grid);
  if (!psi0.is_normalized()) throw NormalizationError("mcwf_trajectory: initial ket not normalized");

  std::mt19937_64 rng(seed);
  integrate::DormandPrince<Vector, DriftRhs> stepper(DriftRhs{&generator}, options.tol);

  Trajectory out;
  out.times.assign(t_grid.begin(), t_grid.end());
  out.kets.reserve(t_grid.size());
  out.kets.push_back(psi0);

  const auto& jumps = generator.jump_matrices();
  const auto& rates = generator.rates();

  Vector psi = psi0.amplitudes();
  double t = 0.0;
  double h = stepper.initial_step(t, psi);
  double threshold = uniform_open(rng);

  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double target = t_grid[i];
    while (t < target) {
      const double t_prev = t;
      const Vector psi_prev = psi;
      stepper.step(t, psi, h, target);
      if (psi.squaredNorm() >= threshold) continue;

      // Bisect the crossing time inside the accepted step.
      double lo = t_prev;
      double hi = t;
      Vector psi_hi = psi;
      while (hi - lo > options.jump_time_rtol * std::max(std::abs(hi), 1e-300)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        Vector psi_mid = stepper.dp5_step(t_prev, psi_prev, mid - t_prev);
        if (psi_mid.squaredNorm() < threshold) {
          hi = mid;
          psi_hi = std::move(psi_mid);
        } else {
          lo = mid;
        }
      }
      t = hi;
      psi = psi_hi;

      std::vector<double> weights(jumps.size());
      double total = 0.0;
      for (std::size_t k = 0; k < jumps.size(); ++k) {
        weights[k] = rates[k] * (jumps[k] * psi).squaredNorm();
        total += weights[k];
      }
      if (total > 0.0) {
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        const std::size_t k = pick(rng);
        Vector next = jumps[k] * psi;
        psi = next / next.norm();
        out.jumps.push_back({t, k});
      } else {
        psi /= psi.norm();
      }
      stepper.reset();
      threshold = uniform_open(rng);
    }
    out.kets.emplace_back(psi0.space(), psi / psi.norm());
  }
  return out;
}

AveragedCurve average_curves(std::span<const std::vector<double>> curves,
                             std::span<const double> times) {
  if (curves.empty()) throw Error("average over an empty ensemble");
  const std::size_t n = times.size();
  AveragedCurve out;
  out.times.assign(times.begin(), times.end());
  out.mean.assign(n, 0.0);
  out.stderr_.assign(n, 0.0);
  const double m = static_cast<double>(curves.size());
  for (const auto& c : curves) {
    if (c.size() != n) throw DimensionError("average_curves: curves must share the time grid");
    for (std::size_t i = 0; i < n; ++i) out.mean[i] += c[i] / m;
  }
  if (curves.size() > 1) {
    for (const auto& c : curves) {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = c[i] - out.mean[i];
        out.stderr_[i] += d * d;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.stderr_[i] = std::sqrt(out.stderr_[i] / (m - 1) / m);
  }
  return out;
}

AveragedCurve average_trajectories(std::span<const Trajectory> trajectories,
                                   const std::function<double(const Ket&)>& extract) {
  if (trajectories.empty()) throw Error("average over an empty ensemble");
  std::vector<std::vector<double>> curves;
  curves.reserve(trajectories.size());
  for (const auto& tr : trajectories) {
    if (tr.times != trajectories.front().times) {
      throw DimensionError("average_trajectories: trajectories must share the time grid");
    }
    std::vector<double> c;
    c.reserve(tr.kets.size());
    for (const auto& k : tr.kets) c.push_back(extract(k));
    curves.push_back(std::move(c));
  }
  return average_curves(curves, trajectories.front().times);
}

std::vector<Trajectory> run_trajectories(const Ket& psi0, const Lindbladian& generator,
                                         std::span<const double> t_grid, std::size_t count,
                                         std::uint64_t master_seed, unsigned threads,
                                         const McwfOptions& options) {
  std::vector<Trajectory> out(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < count; i += workers) {
        out[i] = mcwf_trajectory(psi0, generator, t_grid, derive_seed(master_seed, i), options);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace aqec::dyn
