// Acceptance checks. Each criterion prints one "criterion N: PASS|FAIL ..." line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aqec/codes.hpp"
#include "aqec/dynamics.hpp"
#include "aqec/effective.hpp"
#include "aqec/fidelity.hpp"
#include "aqec/hardware.hpp"
#include "aqec/rlsearch.hpp"

using namespace aqec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double v, int digits = 5) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_e(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Matrix random_complex(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(n(rng), n(rng));
  return m;
}

fidelity::Channel random_channel(std::size_t d, std::mt19937_64& rng) {
  const auto dd = static_cast<Eigen::Index>(d);
  const Eigen::Index k = 3;
  const Eigen::HouseholderQR<Matrix> qr(random_complex(dd * k, dd, rng));
  const Matrix v = qr.householderQ() * Matrix::Identity(dd * k, dd);
  std::vector<Matrix> kraus;
  for (Eigen::Index i = 0; i < k; ++i) kraus.push_back(v.middleRows(i * dd, dd));
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

std::vector<double> effective_curve(effective::Variant v, double lambda, double t_end, std::size_t intervals) {
  const auto code = codes::rl_code();
  const auto model = effective::effective_model(effective::variant_jump(v), {lambda, 1.0}, effective::variant_loss(v));
  return fidelity::propagate_code_space(model, code, t_end, intervals).curve().mean;
}

dyn::Model rl_full_model(double g = 400.0, double gamma_b = 1750.0) {
  return dyn::aqec_model(codes::engineered_jump(codes::rl_code()), g, 1.0, gamma_b);
}

// ---------------------------------------------------------------------------

void c1(Outcome& o) {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto code = random_code(rng);
    const auto ch = random_channel(code.dim(), rng);
    worst = std::max(worst, std::abs(fidelity::mean_fidelity_six(ch, code) -
                                     fidelity::mean_fidelity_sphere(ch, code, 32, 32)));
  }
  o.require(worst < 1e-6, "max |six - sphere| over 20 channels = " + fmt_e(worst));
}

void c2(Outcome& o) {
  const auto code = codes::break_even_code();
  const auto ev = fidelity::propagate_code_space(dyn::photon_loss_model(code.dim(), 1.0), code, 4.0, 400);
  double worst = 0.0;
  for (std::size_t i = 0; i < ev.times().size(); ++i) {
    worst = std::max(worst, std::abs(ev.mean_fidelity(i) - fidelity::break_even_mean_fidelity(ev.times()[i])));
  }
  const double f06 = ev.mean_fidelity(60);
  o.require(worst < 1e-3, "max deviation from closed form on [0, 4] = " + fmt_e(worst));
  o.require(std::abs(f06 - 0.84) < 0.005, "F(0.6) = " + fmt(f06, 4) + " (0.84)");
}

void c3(Outcome& o) {
  const auto code = codes::rl_code();
  const auto ev = fidelity::propagate_code_space(rl_full_model(), code, 4.0, 80);
  const double f06 = ev.mean_fidelity(12);
  const double f4 = ev.mean_fidelity(80);
  const double be4 = fidelity::break_even_mean_fidelity(4.0);
  const double excess = f4 / be4 - 1.0;
  o.require(std::abs(f06 - 0.95) <= 0.01, "F(0.6) = " + fmt(f06) + " (0.95 +- 0.01)");
  o.require(excess >= 0.30 && std::abs(excess - 0.36) <= 0.06,
            "excess over break-even at t = 4: " + fmt(100 * excess, 1) + "% (>= 30%, 36 +- 6)");
}

void c4(Outcome& o) {
  const auto code = codes::rl_code();
  const double lambda = 8000.0;
  const auto model = effective::effective_model(effective::variant_jump(effective::Variant::rl), {lambda, 1.0});
  const double sim = fidelity::propagate_code_space(model, code, 0.6, 1).mean_fidelity(1);
  const fidelity::Channel analytic = [&](const Matrix& rho) {
    const auto s = effective::FiveLevelState::from_matrix(rho);
    return effective::analytic_elements(s, lambda, 0.6, effective::Variant::rl).state.to_matrix(code.dim());
  };
  const double ana = fidelity::mean_fidelity_six(analytic, code);
  o.require(std::abs(sim - ana) <= 5e-3, "lambda 8000: simulated " + fmt(sim) + " vs closed form " + fmt(ana));
  std::vector<double> fs;
  std::string list;
  for (double l : {50.0, 200.0, 800.0, 8000.0}) {
    fs.push_back(effective_curve(effective::Variant::rl, l, 0.6, 1).back());
    list += (list.empty() ? "" : ", ") + fmt(fs.back());
  }
  o.require(std::is_sorted(fs.begin(), fs.end(), std::less_equal<>()) && fs.front() < fs.back(),
            "F(0.6) for lambda 50/200/800/8000 = " + list);
}

void c5(Outcome& o) {
  const auto code = codes::rl_code();
  const auto model = effective::effective_model(effective::variant_jump(effective::Variant::rl), {50000.0, 1.0});
  const auto ev = fidelity::propagate_code_space(model, code, 0.6, 1);
  const auto grid = ev.bloch_grid(1, 33, 64);
  const auto lo = std::min_element(grid.begin(), grid.end(), [](auto& a, auto& b) { return a.fidelity < b.fidelity; });
  double eq_lo = 1.0, eq_hi = 0.0;
  for (const auto& s : grid) {
    if (std::abs(s.theta - kPi / 2) < 1e-12) {
      eq_lo = std::min(eq_lo, s.fidelity);
      eq_hi = std::max(eq_hi, s.fidelity);
    }
  }
  o.require(std::abs(lo->fidelity - 0.951) <= 0.003, "min F = " + fmt(lo->fidelity) + " (0.951 +- 0.003)");
  o.require(std::abs(lo->theta - kPi / 2) < 1e-9, "at theta = " + fmt(lo->theta, 4));
  o.require(eq_hi - eq_lo <= 1e-3, "phi spread on the equator = " + fmt_e(eq_hi - eq_lo));
}

void c6(Outcome& o) {
  const double u_rl = effective::limit_decay_rate(effective::Variant::rl);
  const double u_naive = effective::limit_decay_rate(effective::Variant::naive);
  o.require(std::abs(u_rl - (3 - 2 * std::sqrt(2.0))) < 1e-12 && std::abs(u_naive - 1.0 / 3) < 1e-12,
            "u_rl = " + fmt(u_rl) + ", u_naive = " + fmt(u_naive));
  // Coherence decay measured from the five-level equations at very large lambda.
  const std::vector<double> grid{0.0, 0.6};
  for (auto [v, u] : {std::pair{effective::Variant::rl, u_rl}, std::pair{effective::Variant::naive, u_naive}}) {
    const auto s = effective::five_level_evolve(effective::FiveLevelState::bloch(kPi / 2, 0.0), 1e6, v, grid);
    const double measured = -std::log(std::abs(s[1].rho24) / std::abs(s[0].rho24)) / 0.6;
    o.require(std::abs(measured - u) < 1e-3, effective::to_string(v) + " measured u = " + fmt(measured));
  }
  const auto rl = effective_curve(effective::Variant::rl, 8000.0, 0.6, 60);
  const auto naive = effective_curve(effective::Variant::naive, 8000.0, 0.6, 60);
  double margin = 1.0;
  for (std::size_t i = 1; i < rl.size(); ++i) margin = std::min(margin, rl[i] - naive[i]);
  o.require(margin > 0.0, "min (F_rl - F_naive) on (0, 0.6] = " + fmt_e(margin));
}

void c7(Outcome& o) {
  const double kl8000 = effective_curve(effective::Variant::kl_modified, 8000.0, 0.6, 1).back();
  o.require(kl8000 >= 0.995, "a + a1, lambda 8000: F(0.6) = " + fmt(kl8000));
  const double kl50 = effective_curve(effective::Variant::kl_modified, 50.0, 0.6, 1).back();
  const double a50 = effective_curve(effective::Variant::rl, 50.0, 0.6, 1).back();
  o.require(kl50 < a50, "lambda 50: F_kl = " + fmt(kl50) + " < F_a = " + fmt(a50));
}

void c8(Outcome& o) {
  const std::vector<std::size_t> ms{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const double g = 8.0;
  const auto rows = effective::shifted_code_sweep(ms, g, 0.02, 2.5 * g, 150.0);
  std::size_t best = 1;
  std::string list;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mean_fidelity > rows[best].mean_fidelity) best = i;
    list += (list.size() ? " " : "") + fmt(rows[i].mean_fidelity, 4);
  }
  o.require(rows[best].m == 2, "argmax over m = 1..8 is " + std::to_string(rows[best].m) + " (" + list + ")");
  o.require(rows[0].invalid && rows[0].kl_degenerate,
            "m = 0 equator F = " + fmt(rows[0].equator_fidelity) + " vs break-even " +
                fmt(fidelity::break_even_mean_fidelity(0.02 * 150.0)));
}

void c9(Outcome& o) {
  const auto code = codes::rl_code();
  const auto model = rl_full_model();
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);
  const std::size_t intervals = 600;
  const auto grid = dyn::uniform_grid(0.6, intervals);
  const double tau = 0.018;
  const std::size_t count = 1000;

  std::vector<double> mean(grid.size(), 0.0), star(grid.size(), 0.0);
  const auto inputs = fidelity::six_states(code);
  for (std::size_t j = 0; j < 6; ++j) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(inputs[j]);
    const fock::Ket k(code.space(), Vector(es.eigenvectors().col(es.eigenvalues().size() - 1)));
    const Matrix proj = fock::tensor(fock::projector(k), fock::identity(2)).matrix();
    const auto trajs = dyn::run_trajectories(model.embed(k), gen, grid, count, dyn::derive_seed(1, j));
    std::vector<std::vector<double>> curves;
    for (const auto& tr : trajs) {
      std::vector<double> f;
      for (const auto& ket : tr.kets) {
        const Vector& v = ket.amplitudes();
        f.push_back(v.dot(proj * v).real() / v.squaredNorm());
      }
      curves.push_back(std::move(f));
    }
    const auto avg = dyn::average_curves(curves, grid);
    const auto cg = fidelity::coarse_grained_average(curves, grid, tau);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      mean[i] += avg.mean[i] / 6.0;
      star[i] += cg[i] / 6.0;
    }
  }
  const auto me = fidelity::propagate_code_space(model, code, 0.6, intervals).curve();
  o.require(std::abs(mean.back() - me.mean.back()) <= 0.01,
            "F_mcwf(0.6) = " + fmt(mean.back()) + " vs master equation " + fmt(me.mean.back()));
  double raw_gap = 1.0, star_gap = 1.0;
  for (std::size_t i = 0; i < grid.size() && grid[i] <= 0.1 + 1e-12; ++i) {
    const double be = fidelity::break_even_mean_fidelity(grid[i]);
    raw_gap = std::min(raw_gap, mean[i] - be);
    star_gap = std::min(star_gap, star[i] - be);
  }
  o.require(raw_gap < 0.0, "raw curve dips below break-even by " + fmt_e(-raw_gap));
  o.require(star_gap >= -1e-12, "min (F* - F_be) on [0, 0.1] = " + fmt_e(star_gap));
}

void c10(Outcome& o) {
  rl::EnvConfig env;
  int hits = 0;
  std::string list;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    rl::TrainConfig cfg;
    cfg.algorithm = rl::Algorithm::ppo;
    cfg.episodes = 2000;
    cfg.seed = seed;
    const auto r = rl::train(env, cfg);
    const double p4 = std::norm(r.best_code.zero().amplitudes()(4));
    const double p2 = std::norm(r.best_code.one().amplitudes()(2));
    if (p4 >= 0.95 && p2 >= 0.95) ++hits;
    list += (list.empty() ? "" : ", ") + std::string("seed ") + std::to_string(seed) + ": " + fmt(p4, 4) + "/" +
            fmt(p2, 4);
  }
  o.require(hits >= 2, std::to_string(hits) + " of 3 seeds reach the |4>/|2> code (" + list + ")");
}

void c11(Outcome& o) {
  auto cfg = hw::HardwareConfig::reference();
  std::vector<fidelity::FidelityCurve> curves;
  for (auto v : {hw::Variant::heff0, hw::Variant::heff1}) {
    cfg.variant = v;
    curves.push_back(hw::simulate_hardware(cfg).curve);
  }
  double gap = 0.0;
  for (std::size_t i = 0; i < curves[0].mean.size(); ++i) {
    gap = std::max(gap, std::abs(curves[0].mean[i] - curves[1].mean[i]));
  }
  o.require(gap <= 0.02, "max |heff0 - heff1| over 3 ms = " + fmt(gap));
  const double be = fidelity::break_even_mean_fidelity(cfg.gamma_a1 * 1000.0);
  const std::size_t at = 100;  // 1 ms on the 300-interval grid
  o.require(curves[0].mean[at] > be && curves[1].mean[at] > be,
            "F(1 ms) = " + fmt(curves[0].mean[at]) + " / " + fmt(curves[1].mean[at]) + " vs break-even " + fmt(be));
}

void c12(Outcome& o) {
  std::mt19937_64 rng(12);
  const auto code = codes::rl_code();
  const auto model = rl_full_model(4.0, 17.5);
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);

  double rhs_trace = 0.0, rhs_herm = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Matrix h = random_complex(14, 14, rng);
    const Matrix rho = h * h.adjoint() / (h * h.adjoint()).trace();
    const Matrix d = gen.apply(rho);
    rhs_trace = std::max(rhs_trace, std::abs(d.trace()));
    rhs_herm = std::max(rhs_herm, (d - d.adjoint()).cwiseAbs().maxCoeff());
  }
  o.require(rhs_trace < 1e-10 && rhs_herm < 1e-10, "dissipator trace/Hermiticity residual " + fmt_e(std::max(rhs_trace, rhs_herm)));

  double drift = 0.0, herm = 0.0, min_eig = 1.0;
  const auto grid = dyn::uniform_grid(0.6, 12);
  for (int k = 0; k < 5; ++k) {
    const Matrix h = random_complex(14, 14, rng);
    const fock::DensityMatrix rho(model.space, h * h.adjoint() / (h * h.adjoint()).trace());
    for (const auto& s : dyn::evolve(rho, gen, grid).states) {
      drift = std::max(drift, std::abs(s.matrix().trace() - 1.0));
      herm = std::max(herm, (s.matrix() - s.matrix().adjoint()).cwiseAbs().maxCoeff());
      min_eig = std::min(min_eig, s.min_eigenvalue());
    }
  }
  o.require(drift < 1e-8 && herm < 1e-10 && min_eig > -1e-9,
            "evolution trace drift " + fmt_e(drift) + ", min eigenvalue " + fmt_e(min_eig));

  const auto p = codes::logical_paulis(code);
  const Matrix& s0 = p.identity.matrix();
  const Matrix &x = p.x.matrix(), &y = p.y.matrix(), &z = p.z.matrix();
  const cplx i(0.0, 1.0);
  const double alg = std::max({(x * x - s0).cwiseAbs().maxCoeff(), (y * y - s0).cwiseAbs().maxCoeff(),
                               (z * z - s0).cwiseAbs().maxCoeff(), (x * y - y * x - 2.0 * i * z).cwiseAbs().maxCoeff(),
                               (x * z + z * x).cwiseAbs().maxCoeff()});
  o.require(alg < 1e-12, "Pauli algebra residual " + fmt_e(alg));

  const int d_l = codes::hamiltonian_distance(codes::engineered_jump(code));
  const int d_g = std::max({codes::hamiltonian_distance(p.x), codes::hamiltonian_distance(p.y),
                            codes::hamiltonian_distance(p.z)});
  o.require(d_l == 1 && d_g == 2, "d(L_eng) = " + std::to_string(d_l) + ", d_g = " + std::to_string(d_g));
}

const std::vector<std::function<void(Outcome&)>> kCriteria{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12};

bool run_one(int n) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    kCriteria[static_cast<std::size_t>(n - 1)](o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("criterion %d: %s  %s  (%.1f s)\n", n, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), s);
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aqec acceptance checks"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "Run only this criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  if (criterion > 0) {
    ok = run_one(criterion);
  } else {
    for (int n = 1; n <= 12; ++n) ok = run_one(n) && ok;
  }
  return ok ? 0 : 1;
}
