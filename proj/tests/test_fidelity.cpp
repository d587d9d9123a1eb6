#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "aqec/codes.hpp"
#include "aqec/dynamics.hpp"
#include "aqec/error.hpp"
#include "aqec/fidelity.hpp"
#include "helpers.hpp"

using namespace aqec;
using namespace aqec::fidelity;

namespace {

constexpr double kPi = std::numbers::pi;

fidelity::Channel identity_channel() {
  return [](const Matrix& r) { return r; };
}

fidelity::Channel depolarize(const codes::CodePair& c) {
  const Matrix s0 = codes::logical_paulis(c).identity.matrix();
  return [s0](const Matrix& r) { return Matrix(r.trace() * s0 / 2.0); };
}

/// Random CPTP map on dimension d: Kraus operators from a random isometry.
fidelity::Channel random_channel(std::size_t d, std::mt19937_64& rng) {
  const std::size_t k = 3;
  const Matrix g = testutil::random_matrix(d * k, rng).leftCols(static_cast<Eigen::Index>(d));
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix v = qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(d * k), static_cast<Eigen::Index>(d));
  std::vector<Matrix> kraus;
  for (std::size_t i = 0; i < k; ++i) kraus.push_back(v.middleRows(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(d)));
  return [kraus](const Matrix& r) {
    Matrix out = Matrix::Zero(r.rows(), r.cols());
    for (const auto& m : kraus) out += m * r * m.adjoint();
    return out;
  };
}

codes::CodePair random_code(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> a{n(rng), n(rng)}, b{n(rng), n(rng)};
  const double na = std::hypot(a[0], a[1]), nb = std::hypot(b[0], b[1]);
  for (auto& x : a) x /= na;
  for (auto& x : b) x /= nb;
  return codes::code_pair_from_coeffs(a, b, 7);
}

}  // namespace

TEST_CASE("state fidelity") {
  const auto k2 = fock::basis_ket(4, 2);
  const auto r2 = fock::DensityMatrix::from_ket(k2);
  CHECK(state_fidelity(r2, r2) == doctest::Approx(1.0));
  CHECK(state_fidelity(r2, fock::DensityMatrix::from_ket(fock::basis_ket(4, 1))) == 0.0);
  std::mt19937_64 rng(1);
  const auto psi = fock::DensityMatrix::from_ket(fock::Ket({5}, testutil::random_unit(5, rng)));
  const fock::DensityMatrix mixed({5}, Matrix::Identity(5, 5) / 5.0);
  CHECK(state_fidelity(psi, mixed) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(state_fidelity(mixed, psi), InvalidStateError);
}

TEST_CASE("six-state mean fidelity on simple channels") {
  for (const auto& c : {codes::rl_code(), codes::binomial_code()}) {
    CHECK(mean_fidelity_six(identity_channel(), c) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean_fidelity_six(depolarize(c), c) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mean_fidelity_sphere(identity_channel(), c, 16, 16) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_fidelity_sphere(depolarize(c), c, 16, 16) == doctest::Approx(0.5).epsilon(1e-10));
  }
  const auto leaky = [](const Matrix& r) { return Matrix(0.5 * r); };
  CHECK_THROWS_AS(mean_fidelity_six(leaky, codes::rl_code()), InvalidStateError);
  CHECK_THROWS(mean_fidelity_sphere(identity_channel(), codes::rl_code(), 8, 16));
}

TEST_CASE("six-state formula equals the sphere average for random channels") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 20; ++k) {
    const auto code = random_code(rng);
    const auto ch = random_channel(code.dim(), rng);
    CHECK(std::abs(mean_fidelity_six(ch, code) - mean_fidelity_sphere(ch, code, 32, 32)) <= 1e-6);
  }
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  const auto q = gauss_legendre(8);
  double s0 = 0, s2 = 0, s14 = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    s0 += q.weights[i];
    s2 += q.weights[i] * q.nodes[i] * q.nodes[i];
    s14 += q.weights[i] * std::pow(q.nodes[i], 14);
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("closed forms") {
  CHECK(break_even_mean_fidelity(0.0) == 1.0);
  CHECK(break_even_mean_fidelity(0.6) == doctest::Approx(0.838408).epsilon(1e-6));
  CHECK(std::abs(break_even_mean_fidelity(0.17) - 0.9468) < 5e-5);
  CHECK(rl_analytic_mean_fidelity(0.0) == 1.0);
  // the quoted 0.9905 uses the rounded rate u = 0.17
  CHECK(std::abs(rl_analytic_mean_fidelity(0.17, 0.17) - 0.9905) < 5e-5);
  CHECK(std::abs(rl_analytic_mean_fidelity(0.17) - 0.9905) < 1e-4);
  CHECK(rl_analytic_mean_fidelity(0.6) == doctest::Approx(0.96739).epsilon(1e-5));
  CHECK(rl_analytic_state_fidelity(0.0, 1.3, 0.6) == 1.0);
  CHECK(rl_analytic_state_fidelity(kPi / 2, 0.0, 0.6) == doctest::Approx(0.95109).epsilon(1e-5));
  CHECK(rl_analytic_state_fidelity(kPi, 0.0, 5.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kRlDecayRate == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)));
}

TEST_CASE("closed-form monotonicity and ordering") {
  double prev_be = 1.0, prev_rl = 1.0;
  for (int i = 1; i <= 400; ++i) {
    const double t = 0.01 * i;
    const double be = break_even_mean_fidelity(t), rl = rl_analytic_mean_fidelity(t);
    CHECK(be < prev_be);
    CHECK(rl < prev_rl);
    CHECK(rl > 2.0 / 3.0);
    CHECK(rl > be);
    prev_be = be;
    prev_rl = rl;
    double lowest = 2.0;
    double at = 0.0;
    for (int k = 0; k <= 64; ++k) {
      const double th = kPi * k / 64.0;
      const double f = rl_analytic_state_fidelity(th, 0.0, t);
      if (f < lowest) {
        lowest = f;
        at = th;
      }
    }
    CHECK(at == doctest::Approx(kPi / 2));
  }
}

TEST_CASE("coarse graining") {
  FidelityCurve c;
  for (int i = 0; i <= 60; ++i) {
    c.times.push_back(0.01 * i);
    c.mean.push_back(0.9 + 0.05 * std::sin(0.7 * i));
  }
  const auto same = coarse_grained(c, 0.0);
  CHECK(same.mean == c.mean);
  const auto all = coarse_grained(c, 10.0);
  const double top = *std::max_element(c.mean.begin(), c.mean.end());
  CHECK(all.mean.front() == top);
  CHECK(all.mean.back() == c.mean.back());
  std::vector<double> prev = c.mean;
  for (double tau : {0.06, 0.12, 0.3}) {
    const auto cg = coarse_grained(c, tau);
    for (std::size_t i = 0; i < prev.size(); ++i) CHECK(cg.mean[i] >= prev[i]);
    prev = cg.mean;
  }
  CHECK_THROWS(coarse_grained(c, 0.03));  // spacing 0.01 > tau/6
}

TEST_CASE("trajectory-wise coarse graining averages after the window maximum") {
  const std::vector<double> t{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::vector<std::vector<double>> curves{{1, 0, 1, 1, 1, 1, 1}, {1, 1, 1, 0, 1, 1, 1}};
  const auto avg = coarse_grained_average(curves, t, 0.6);
  for (double v : avg) CHECK(v == 1.0);
  const auto raw = coarse_grained_average(curves, t, 0.0);
  CHECK(raw[1] == 0.5);
  CHECK(raw[3] == 0.5);
}

TEST_CASE("code-space evolution reconstructs arbitrary inputs by linearity") {
  const auto code = codes::rl_code();
  const auto model = dyn::aqec_model(codes::engineered_jump(code), 40.0, 1.0, 175.0);
  const auto ev = propagate_code_space(model, code, 0.4, 4);
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);
  for (const auto& [th, ph] : std::vector<std::pair<double, double>>{{0.3, 1.0}, {kPi / 2, 2.0}, {2.5, 4.0}}) {
    const auto psi = code.bloch_state(th, ph);
    const auto res = dyn::evolve(fock::DensityMatrix::unchecked(model.space, model.embed(psi.amplitudes() * psi.amplitudes().adjoint())),
                                 gen, dyn::uniform_grid(0.4, 4));
    const Matrix direct = model.reduce(res.states.back().matrix());
    CHECK(testutil::max_abs(direct - ev.output(th, ph, 4)) < 1e-7);
  }
  const auto curve = ev.curve(8);
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    CHECK(curve.min[i] <= curve.mean[i] + 1e-12);
    CHECK(curve.max[i] >= curve.mean[i] - 1e-12);
  }
  std::ostringstream os;
  write_csv(os, curve);
  CHECK(os.str().rfind("# ", 0) == 0);
  CHECK(os.str().find("t,F_mean,F_min,F_max") != std::string::npos);
  std::ostringstream bs;
  const auto samples = ev.bloch_grid(4, 4, 4);
  write_bloch_csv(bs, samples);
  CHECK(bs.str().find("theta,phi,F") != std::string::npos);
}
