#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aqec/codes.hpp"
#include "aqec/dynamics.hpp"
#include "aqec/effective.hpp"
#include "aqec/error.hpp"
#include "aqec/fidelity.hpp"
#include "helpers.hpp"

using namespace aqec;
using namespace aqec::effective;

namespace {

constexpr double kPi = std::numbers::pi;

/// Random element of the tracked five-level subspace (not necessarily positive).
FiveLevelState random_tracked(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 0.3);
  FiveLevelState s;
  double total = 0.0;
  for (auto& p : s.diag) total += (p = u(rng));
  for (auto& p : s.diag) p /= total;
  s.rho24 = cplx(n(rng), n(rng));
  s.rho13 = cplx(n(rng), n(rng));
  return s;
}

double mean_at_end(Variant v, double lambda, double t) {
  const auto code = codes::rl_code();
  const auto model = effective_model(variant_jump(v), {lambda, 1.0}, variant_loss(v));
  return fidelity::propagate_code_space(model, code, t, 1).mean_fidelity(1);
}

}  // namespace

TEST_CASE("lambda from circuit parameters") {
  const auto p = effective_lambda(400.0, 1.0, 1750.0);
  CHECK(p.lambda == doctest::Approx(731.428571).epsilon(1e-8));
  CHECK(p.cooperativity() == doctest::Approx(91.428571).epsilon(1e-8));
  CHECK(effective_lambda(3.0, 3.0, 3.0).lambda == doctest::Approx(8.0));
  CHECK(effective_lambda(2.0, 1.0, 5.0).lambda == doctest::Approx(4.0 * effective_lambda(1.0, 1.0, 5.0).lambda));
  CHECK_THROWS_AS(effective_lambda(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(effective_lambda(1.0, -1.0, 1.0), Error);
}

TEST_CASE("effective rhs reduces to plain loss as lambda -> 0") {
  std::mt19937_64 rng(5);
  const fock::DensityMatrix rho({7}, testutil::random_density(7, rng));
  const auto jump = variant_jump(Variant::rl);
  const auto loss = dyn::photon_loss_model(7, 1.0);
  const Matrix ref = dyn::lindblad_rhs(loss.hamiltonian, loss.noise, rho);
  CHECK(testutil::max_abs(effective_rhs(rho, {1e-12, 1.0}, jump) - ref) < 1e-10);
  CHECK(std::abs(effective_rhs(rho, {500.0, 1.0}, jump).trace()) < 1e-10);
}

TEST_CASE("five-level equations on |4><4|") {
  FiveLevelState s;
  s.diag[4] = 1.0;
  for (auto v : {Variant::rl, Variant::naive, Variant::kl_modified}) {
    const auto d = five_level_rhs(s, 1000.0, v);
    CHECK(d.diag[4] == doctest::Approx(-4.0));
    CHECK(d.diag[3] == doctest::Approx(4.0));
  }
}

TEST_CASE("five-level equations are the restriction of the effective master equation") {
  std::mt19937_64 rng(17);
  for (auto v : {Variant::rl, Variant::naive, Variant::kl_modified}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto s = random_tracked(rng);
      const double lambda = std::uniform_real_distribution<double>(1.0, 1e4)(rng);
      const auto rho = fock::DensityMatrix::unchecked({7}, s.to_matrix(7));
      const Matrix full = effective_rhs(rho, {lambda, 1.0}, variant_jump(v), variant_loss(v));
      const auto reduced = five_level_rhs(s, lambda, v);
      const double scale = 1.0 + lambda;
      for (int i = 0; i < 5; ++i) CHECK(std::abs(full(i, i).real() - reduced.diag[i]) < 1e-10 * scale);
      CHECK(std::abs(full(2, 4) - reduced.rho24) < 1e-10 * scale);
      CHECK(std::abs(full(1, 3) - reduced.rho13) < 1e-10 * scale);
    }
  }
}

TEST_CASE("five-level evolution conserves trace") {
  const auto grid = dyn::uniform_grid(0.6, 12);
  for (auto v : {Variant::rl, Variant::naive, Variant::kl_modified}) {
    const auto states = five_level_evolve(FiveLevelState::bloch(1.1, 0.4), 800.0, v, grid);
    REQUIRE(states.size() == grid.size());
    for (const auto& s : states) {
      double tr = 0.0;
      for (double p : s.diag) tr += p;
      CHECK(tr == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("first-order closed forms track the integrated equations") {
  // The remainder is second order: err * lambda^2 settles to a constant (about 360 for rl and
  // kl_modified, 810 for naive), so the check is on scaling plus a 1000 / lambda^2 envelope.
  const std::vector<double> grid{0.0, 0.2, 0.4, 0.6};
  for (auto v : {Variant::rl, Variant::naive, Variant::kl_modified}) {
    std::vector<double> worst;
    for (double lambda : {1e3, 1e4}) {
      double w = 0.0;
      for (const auto& init : {FiveLevelState::bloch(0.0, 0.0), FiveLevelState::bloch(kPi / 2, 0.3),
                               FiveLevelState::bloch(2.0, 1.0)}) {
        const auto num = five_level_evolve(init, lambda, v, grid, {1e-12, 1e-14});
        for (std::size_t i = 1; i < grid.size(); ++i) {
          const auto an = analytic_elements(init, lambda, grid[i], v);
          CHECK(an.asymptotic);
          for (int k = 0; k < 5; ++k) w = std::max(w, std::abs(an.state.diag[k] - num[i].diag[k]));
          w = std::max({w, std::abs(an.state.rho24 - num[i].rho24), std::abs(an.state.rho13 - num[i].rho13)});
        }
      }
      CHECK(w < 1000.0 / (lambda * lambda));
      worst.push_back(w);
    }
    CHECK(worst[1] / worst[0] < 0.012);
  }
  CHECK_FALSE(analytic_elements(FiveLevelState::bloch(1.0, 0.0), 50.0, 0.6, Variant::rl).asymptotic);
  FiveLevelState bad;
  bad.diag[1] = 1.0;
  CHECK_THROWS_AS(analytic_elements(bad, 1e3, 0.6, Variant::rl), InvalidStateError);
}

TEST_CASE("strong-recovery limit") {
  CHECK(limit_decay_rate(Variant::rl) == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)));
  CHECK(limit_decay_rate(Variant::naive) == doctest::Approx(1.0 / 3.0));
  CHECK(limit_decay_rate(Variant::kl_modified) == 0.0);

  const auto code = codes::rl_code();
  const auto plus = fock::DensityMatrix::from_ket(code.bloch_state(kPi / 2, 0.0));
  const auto out = limit_density(plus, 0.6, limit_decay_rate(Variant::rl));
  CHECK(fidelity::state_fidelity(plus, out) == doctest::Approx(0.95109).epsilon(1e-5));
  CHECK(out.matrix().trace().real() == doctest::Approx(1.0));

  const auto channel = [](double u) {
    return [u](const Matrix& r) { return Matrix(limit_density(fock::DensityMatrix::unchecked({7}, r), 0.6, u).matrix()); };
  };
  CHECK(fidelity::mean_fidelity_six(channel(limit_decay_rate(Variant::naive)), code) ==
        doctest::Approx(0.93958).epsilon(1e-5));
  CHECK(fidelity::mean_fidelity_six(channel(limit_decay_rate(Variant::rl)), code) ==
        doctest::Approx(fidelity::rl_analytic_mean_fidelity(0.6)).epsilon(1e-12));
  CHECK_THROWS_AS(limit_density(fock::DensityMatrix::from_ket(fock::basis_ket(7, 1)), 0.6, 0.1), InvalidStateError);
}

TEST_CASE("effective mean fidelity improves with lambda and approaches the limit") {
  double prev = 0.0;
  for (double lambda : {50.0, 200.0, 800.0, 8000.0}) {
    const double f = mean_at_end(Variant::rl, lambda, 0.6);
    CHECK(f > prev);
    prev = f;
  }
  CHECK(prev == doctest::Approx(fidelity::rl_analytic_mean_fidelity(0.6)).epsilon(5e-3));
  CHECK(mean_at_end(Variant::kl_modified, 8000.0, 0.6) > 0.995);
  CHECK(mean_at_end(Variant::rl, 8000.0, 0.6) > mean_at_end(Variant::naive, 8000.0, 0.6));
}

TEST_CASE("effective-model fidelity does not depend on phi") {
  const auto code = codes::rl_code();
  const auto model = effective_model(variant_jump(Variant::rl), {50000.0, 1.0});
  const auto ev = fidelity::propagate_code_space(model, code, 0.6, 1);
  for (double theta : {0.3, kPi / 2, 2.5}) {
    const double f0 = ev.state_fidelity(theta, 0.0, 1);
    for (double phi : {0.7, 2.0, 4.5}) CHECK(ev.state_fidelity(theta, phi, 1) == doctest::Approx(f0).epsilon(1e-9));
  }
  CHECK(ev.state_fidelity(kPi / 2, 0.0, 1) < ev.state_fidelity(0.0, 0.0, 1));
}

TEST_CASE("full model approaches the effective model at the matching rate") {
  // With the trace-normalized jump the eliminated qubit gives a recovery rate of 4C = lambda / 2.
  const auto code = codes::rl_code();
  const double g = 400.0, gb = 1750.0;
  const auto p = effective_lambda(g, 1.0, gb);
  const auto jump = codes::engineered_jump(code);
  const double full = fidelity::propagate_code_space(dyn::aqec_model(jump, g, 1.0, gb), code, 0.6, 1).mean_fidelity(1);
  const double eff =
      fidelity::propagate_code_space(effective_model(jump, {4.0 * p.cooperativity(), 1.0}), code, 0.6, 1)
          .mean_fidelity(1);
  CHECK(std::abs(full - eff) < 0.01);
}

TEST_CASE("shifted-code helpers") {
  CHECK(mean_jump_probability(0, 0.02) == doctest::Approx(0.02));
  CHECK(mean_jump_probability(4, 0.5) == doctest::Approx(2.5));
  const std::vector<std::size_t> ms{0, 2};
  const auto rows = shifted_code_sweep(ms, 8.0, 0.02, 20.0, 20.0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].kl_degenerate);
  CHECK_FALSE(rows[1].kl_degenerate);
  for (const auto& r : rows) {
    CHECK(r.mean_fidelity > 0.0);
    CHECK(r.mean_fidelity <= 1.0);
    CHECK(r.equator_fidelity <= r.mean_fidelity + 1e-9);
  }
}

TEST_CASE("variant names") {
  CHECK(parse_variant("rl") == Variant::rl);
  CHECK(parse_variant("kl-modified") == Variant::kl_modified);
  CHECK(to_string(Variant::naive) == "naive");
  CHECK_THROWS_AS(parse_variant("other"), SpecError);
}
