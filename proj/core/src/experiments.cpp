#include "aqec/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "aqec/codes.hpp"
#include "aqec/dynamics.hpp"
#include "aqec/effective.hpp"
#include "aqec/error.hpp"
#include "aqec/fidelity.hpp"
#include "aqec/hardware.hpp"
#include "aqec/rlsearch.hpp"

namespace aqec::exp {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<CatalogEntry> list_experiments() {
  return {
      {Kind::fidelity_curve, "fidelity-curve", "Fig. 1(c)",
       "mean fidelity vs gamma_a t for named or file-defined codes under the mode (x) qubit model",
       {"codes", "g", "gamma_b", "t_end", "intervals", "grid"}},
      {Kind::bloch_heatmap, "bloch-heatmap", "Fig. 1(d), Fig. S1(b,c)",
       "F(theta, phi) at one time, full model or effective model at a given lambda",
       {"model", "g", "gamma_b", "lambda", "gamma_t", "n_theta", "n_phi"}},
      {Kind::lambda_sweep, "lambda-sweep", "Fig. S1(a)",
       "effective-model mean fidelity for several lambda, with the first-order closed form",
       {"lambdas", "t_end", "intervals"}},
      {Kind::shifted_sweep, "shifted-sweep", "Fig. 3", "|m>, |m+2> codes under the full model at one time",
       {"ms", "g", "gamma_a", "gamma_b", "t"}},
      {Kind::rl_train, "rl-train", "Fig. S1q(a,b)", "policy search over the two-coefficient code ansatz",
       {"env", "train", "trace_seeds"}},
      {Kind::trajectories, "trajectories", "Fig. S-ad(b)",
       "MCWF ensemble vs master equation, with the coarse-grained fidelity",
       {"g", "gamma_b", "t_end", "dt", "count", "tau"}},
      {Kind::hardware, "hardware", "Fig. 2(b), Fig. S5", "three-component hardware model under heff0 / heff1",
       {"config", "variants"}},
      {Kind::kl_compare, "kl-compare", "Fig. S2(c)", "loss a vs KL-compensated loss a + a1 in the effective model",
       {"lambdas", "t_end", "intervals"}},
      {Kind::naive_compare, "naive-compare", "Fig. S2(b)", "engineered vs naive recovery jump in the effective model",
       {"lambda", "t_end", "intervals"}},
  };
}

std::string to_string(Kind k) {
  for (const auto& e : list_experiments()) {
    if (e.kind == k) return e.name;
  }
  return "unknown";
}

Kind parse_kind(const std::string& s) {
  for (const auto& e : list_experiments()) {
    if (e.name == s) return e.kind;
  }
  throw SpecError("unknown experiment kind '" + s + "'");
}

ExperimentSpec parse_spec(const json& j) {
  if (!j.is_object()) throw SpecError("spec must be a JSON object");
  static const std::set<std::string> top{"kind", "parameters", "seed", "output"};
  for (const auto& [k, v] : j.items()) {
    if (!top.contains(k)) throw SpecError("unknown spec key '" + k + "'");
  }
  if (!j.contains("kind") || !j["kind"].is_string()) throw SpecError("spec needs a string 'kind'");
  ExperimentSpec s;
  s.kind = parse_kind(j["kind"].get<std::string>());
  if (j.contains("parameters")) {
    if (!j["parameters"].is_object()) throw SpecError("'parameters' must be an object");
    s.parameters = j["parameters"];
  }
  const auto catalog = list_experiments();
  const auto& entry = *std::find_if(catalog.begin(), catalog.end(), [&](const auto& e) { return e.kind == s.kind; });
  for (const auto& [k, v] : s.parameters.items()) {
    if (std::find(entry.parameters.begin(), entry.parameters.end(), k) == entry.parameters.end()) {
      throw SpecError("unknown parameter '" + k + "' for kind " + entry.name);
    }
  }
  if (j.contains("seed")) {
    const auto& seed = j["seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      throw SpecError("'seed' must be a non-negative integer");
    }
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw SpecError("'output' must be a string");
    s.output = j["output"].get<std::string>();
  }
  return s;
}

ExperimentSpec load_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file " + path.string());
  try {
    return parse_spec(json::parse(in));
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec file: ") + e.what());
  }
}

namespace {

template <class T>
T param(const json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception&) {
    throw SpecError(std::string("parameter '") + key + "' has the wrong type");
  }
}

double positive(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw SpecError(std::string("parameter '") + key + "' must be > 0");
  return v;
}

std::size_t at_least_one(std::size_t v, const char* key) {
  if (v < 1) throw SpecError(std::string("parameter '") + key + "' must be >= 1");
  return v;
}

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw SpecError("cannot write " + (dir_ / name).string());
    os.precision(10);
    files_.push_back(name);
    return os;
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

struct Context {
  const ExperimentSpec& spec;
  unsigned threads;
  Writer& out;
  std::vector<Reference>& refs;
  json& extra;
};

codes::CodePair named_code(const json& entry) {
  if (entry.is_string()) {
    const auto name = entry.get<std::string>();
    if (name == "rl") return codes::rl_code();
    if (name == "binomial") return codes::binomial_code();
    if (name == "break-even") return codes::break_even_code();
    throw SpecError("unknown code '" + name + "' (rl, binomial, break-even or {\"file\": path})");
  }
  if (entry.is_object() && entry.contains("file")) return codes::load_code_file(entry["file"].get<std::string>());
  if (entry.is_object()) return codes::code_from_json(entry);
  throw SpecError("code entries are names, {\"file\": path} or inline coefficient objects");
}

bool is_break_even(const codes::CodePair& c) { return c.name() == codes::break_even_code().name(); }

/// Mode (x) qubit model for a code, or plain loss for the uncorrected code. Rates in units of gamma_a.
dyn::Model full_model(const codes::CodePair& code, double g, double gamma_b) {
  if (is_break_even(code)) return dyn::photon_loss_model(code.dim(), 1.0);
  return dyn::aqec_model(codes::engineered_jump(code), g, 1.0, gamma_b);
}

double value_at(const fidelity::FidelityCurve& c, double t) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    if (std::abs(c.times[i] - t) < std::abs(c.times[best] - t)) best = i;
  }
  return c.mean[best];
}

std::string safe_name(std::string s) {
  for (char& ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  }
  return s;
}

void fidelity_curve(Context& cx) {
  const auto& p = cx.spec.parameters;
  const json names = param<json>(p, "codes", json::array({"rl", "binomial", "break-even"}));
  if (!names.is_array() || names.empty()) throw SpecError("'codes' must be a non-empty array");
  const double g = positive(param(p, "g", 400.0), "g");
  const double gb = positive(param(p, "gamma_b", 1750.0), "gamma_b");
  const double t_end = positive(param(p, "t_end", 4.0), "t_end");
  const auto intervals = at_least_one(param<std::size_t>(p, "intervals", 80), "intervals");
  const auto grid = param<std::size_t>(p, "grid", 0);

  json summary = json::array();
  for (const auto& entry : names) {
    const auto code = named_code(entry);
    const auto ev = fidelity::propagate_code_space(full_model(code, g, gb), code, t_end, intervals);
    const auto curve = ev.curve(grid);
    auto os = cx.out.open("fidelity_" + safe_name(code.name()) + ".csv");
    fidelity::write_csv(os, curve);
    const double f06 = value_at(curve, 0.6);
    summary.push_back({{"code", code.name()}, {"F_0.6", f06}, {"F_end", curve.mean.back()}});
    if (code.name() == codes::rl_code().name()) {
      cx.refs.push_back({"rl F(0.6/gamma_a)", f06, 0.95, "reported"});
    }
    if (is_break_even(code)) {
      cx.refs.push_back({"break-even F(0.6/gamma_a)", f06, fidelity::break_even_mean_fidelity(0.6), "derived"});
    }
  }
  cx.extra["codes"] = summary;
}

void bloch_heatmap(Context& cx) {
  const auto& p = cx.spec.parameters;
  const auto model_kind = param<std::string>(p, "model", "full");
  const double gt = positive(param(p, "gamma_t", 0.6), "gamma_t");
  const auto nt = at_least_one(param<std::size_t>(p, "n_theta", 33), "n_theta");
  const auto np = at_least_one(param<std::size_t>(p, "n_phi", 64), "n_phi");
  const auto code = codes::rl_code();
  if (model_kind != "full" && model_kind != "effective") throw SpecError("'model' must be full or effective");
  const dyn::Model model =
      model_kind == "full"
          ? full_model(code, positive(param(p, "g", 400.0), "g"), positive(param(p, "gamma_b", 1750.0), "gamma_b"))
          : effective::effective_model(codes::engineered_jump(code),
                                       {positive(param(p, "lambda", 50000.0), "lambda"), 1.0});
  const auto ev = fidelity::propagate_code_space(model, code, gt, 1);
  const auto samples = ev.bloch_grid(1, nt, np);
  auto os = cx.out.open("bloch_heatmap.csv");
  fidelity::write_bloch_csv(os, samples);
  double lo = 1.0, hi = 0.0;
  for (const auto& s : samples) {
    lo = std::min(lo, s.fidelity);
    hi = std::max(hi, s.fidelity);
  }
  cx.extra["F_min"] = lo;
  cx.extra["F_max"] = hi;
  cx.extra["F_mean"] = ev.mean_fidelity(1);
  if (model_kind == "full") cx.refs.push_back({"heatmap F_min", lo, 0.93, "reported"});
  if (model_kind == "effective") {
    double eq_lo = 1.0;
    for (std::size_t k = 0; k < 64; ++k) {
      eq_lo = std::min(eq_lo, ev.state_fidelity(std::numbers::pi / 2, 2.0 * std::numbers::pi * k / 64.0, 1));
    }
    cx.refs.push_back({"equator F", eq_lo, 0.951, "reported"});
  }
}

void write_table(std::ostream& os, const std::string& units, const std::vector<std::string>& cols,
                 const std::vector<double>& t, const std::vector<std::vector<double>>& data) {
  os << "# " << units << '\n';
  os << 't';
  for (const auto& c : cols) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << t[i];
    for (const auto& d : data) os << ',' << d[i];
    os << '\n';
  }
}

const char* kUnits = "t in 1/gamma_a, fidelities dimensionless";

std::vector<double> effective_curve(effective::Variant v, double lambda, double t_end, std::size_t intervals) {
  const auto code = codes::rl_code();
  const auto model = effective::effective_model(effective::variant_jump(v, code.dim()), {lambda, 1.0},
                                                effective::variant_loss(v, code.dim()));
  return fidelity::propagate_code_space(model, code, t_end, intervals).curve().mean;
}

void lambda_sweep(Context& cx) {
  const auto& p = cx.spec.parameters;
  const auto lambdas = param<std::vector<double>>(p, "lambdas", {50, 200, 800, 8000});
  if (lambdas.empty()) throw SpecError("'lambdas' must be non-empty");
  const double t_end = positive(param(p, "t_end", 0.6), "t_end");
  const auto intervals = at_least_one(param<std::size_t>(p, "intervals", 60), "intervals");
  const auto t = dyn::uniform_grid(t_end, intervals);
  std::vector<std::string> cols;
  std::vector<std::vector<double>> data;
  for (double l : lambdas) {
    positive(l, "lambdas");
    std::ostringstream name;
    name << "F_lambda_" << l;
    cols.push_back(name.str());
    data.push_back(effective_curve(effective::Variant::rl, l, t_end, intervals));
  }
  std::vector<double> analytic;
  for (double ti : t) analytic.push_back(fidelity::rl_analytic_mean_fidelity(ti));
  cols.push_back("F_limit");
  data.push_back(analytic);
  auto os = cx.out.open("lambda_sweep.csv");
  write_table(os, kUnits, cols, t, data);
  const auto last = std::max_element(lambdas.begin(), lambdas.end()) - lambdas.begin();
  cx.refs.push_back({"F(t_end) at largest lambda vs limit", data[static_cast<std::size_t>(last)].back(),
                     analytic.back(), "derived"});
}

void shifted_sweep(Context& cx) {
  const auto& p = cx.spec.parameters;
  const auto ms = param<std::vector<std::size_t>>(p, "ms", {0, 1, 2, 3, 4, 5, 6, 7, 8});
  if (ms.empty()) throw SpecError("'ms' must be non-empty");
  const double g = positive(param(p, "g", 8.0), "g");
  const double ga = positive(param(p, "gamma_a", 0.02), "gamma_a");
  const double gb = positive(param(p, "gamma_b", 2.5 * g), "gamma_b");
  const double t = positive(param(p, "t", 150.0), "t");
  const auto rows = effective::shifted_code_sweep(ms, g, ga, gb, t, cx.threads);
  auto os = cx.out.open("shifted_sweep.csv");
  os << "# rates in MHz, t in us, fidelities dimensionless\n";
  os << "m,F_mean,F_equator,kl_degenerate,invalid\n";
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << r.m << ',' << r.mean_fidelity << ',' << r.equator_fidelity << ',' << int(r.kl_degenerate) << ','
       << int(r.invalid) << '\n';
    if (r.m >= 1 && (rows[best].m == 0 || r.mean_fidelity > rows[best].mean_fidelity)) best = i;
  }
  cx.extra["break_even"] = fidelity::break_even_mean_fidelity(ga * t);
  cx.refs.push_back({"argmax m", static_cast<double>(rows[best].m), 2.0, "reported"});
}

void rl_train(Context& cx) {
  const auto& p = cx.spec.parameters;
  const auto env = rl::env_config_from_json(param<json>(p, "env", json::object()));
  json tj = param<json>(p, "train", json::object());
  if (!tj.contains("seed")) tj["seed"] = cx.spec.seed;
  tj["threads"] = cx.threads;
  const auto cfg = rl::train_config_from_json(tj);
  const auto seeds = param<std::vector<std::uint64_t>>(p, "trace_seeds", {1, 2, 3});
  const auto result = rl::train(env, cfg);
  {
    auto os = cx.out.open("rewards.csv");
    rl::write_reward_csv(os, result);
  }
  {
    auto os = cx.out.open("train_result.json");
    os << rl::to_json(result).dump(2) << '\n';
  }
  auto os = cx.out.open("episode_trace.csv");
  os << "# step index, fidelities dimensionless at gamma_a t = " << env.gamma_t << '\n';
  os << "step";
  std::vector<std::vector<double>> traces;
  for (auto s : seeds) {
    os << ",F_seed_" << s;
    traces.push_back(rl::episode_fidelity_trace(env, *result.policy, s));
  }
  os << '\n';
  for (std::size_t k = 0; k < env.steps_per_episode; ++k) {
    os << k + 1;
    for (const auto& tr : traces) os << ',' << tr[k];
    os << '\n';
  }
  const auto& z = result.best_code.zero().amplitudes();
  const auto& o = result.best_code.one().amplitudes();
  cx.refs.push_back({"|<0_L|4>|^2", std::norm(z(4)), 1.0, "reported"});
  cx.refs.push_back({"|<1_L|2>|^2", std::norm(o(2)), 1.0, "reported"});
  cx.extra["best_mean_fidelity"] = result.best_mean_fidelity;
}

/// Pure six-state inputs as kets (top eigenvectors of the rank-one projectors).
std::vector<fock::Ket> six_kets(const codes::CodePair& code) {
  std::vector<fock::Ket> out;
  for (const auto& rho : fidelity::six_states(code)) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    out.emplace_back(code.space(), Vector(es.eigenvectors().col(es.eigenvalues().size() - 1)));
  }
  return out;
}

void trajectories(Context& cx) {
  const auto& p = cx.spec.parameters;
  const double g = positive(param(p, "g", 400.0), "g");
  const double gb = positive(param(p, "gamma_b", 1750.0), "gamma_b");
  const double t_end = positive(param(p, "t_end", 0.6), "t_end");
  const double dt = positive(param(p, "dt", 1e-3), "dt");
  const auto count = at_least_one(param<std::size_t>(p, "count", 1000), "count");
  const double tau = positive(param(p, "tau", 0.018), "tau");
  const auto intervals = static_cast<std::size_t>(std::llround(t_end / dt));
  if (intervals < 1) throw SpecError("dt must be below t_end");

  const auto code = codes::rl_code();
  const auto model = full_model(code, g, gb);
  const dyn::Lindbladian gen(model.hamiltonian, model.noise);
  const auto grid = dyn::uniform_grid(t_end, intervals);
  const auto kets = six_kets(code);

  std::vector<double> mean(grid.size(), 0.0), se2(grid.size(), 0.0), star(grid.size(), 0.0);
  for (std::size_t j = 0; j < 6; ++j) {
    const fock::Ket psi = model.embed(kets[j]);
    const Matrix proj = fock::tensor(fock::projector(kets[j]), fock::identity(2)).matrix();
    const auto trajs = dyn::run_trajectories(psi, gen, grid, count, dyn::derive_seed(cx.spec.seed, j), cx.threads);
    std::vector<std::vector<double>> curves;
    for (const auto& tr : trajs) {
      std::vector<double> f;
      for (const auto& k : tr.kets) {
        const Vector& v = k.amplitudes();
        f.push_back(v.dot(proj * v).real() / v.squaredNorm());
      }
      curves.push_back(std::move(f));
    }
    const auto avg = dyn::average_curves(curves, grid);
    const auto cg = fidelity::coarse_grained_average(curves, grid, tau);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      mean[i] += avg.mean[i] / 6.0;
      se2[i] += avg.stderr_[i] * avg.stderr_[i] / 36.0;
      star[i] += cg[i] / 6.0;
    }
  }
  const auto me = fidelity::propagate_code_space(model, code, t_end, intervals).curve();

  auto os = cx.out.open("trajectories.csv");
  std::vector<double> se, be;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    se.push_back(std::sqrt(se2[i]));
    be.push_back(fidelity::break_even_mean_fidelity(grid[i]));
  }
  write_table(os, kUnits, {"F_mcwf", "F_mcwf_stderr", "F_master", "F_star", "F_break_even"}, grid,
              {mean, se, me.mean, star, be});
  cx.refs.push_back({"mcwf F(t_end) vs master equation", mean.back(), me.mean.back(), "derived"});
}

void hardware(Context& cx) {
  const auto& p = cx.spec.parameters;
  auto cfg = hw::hardware_config_from_json(param<json>(p, "config", json::object()));
  const auto variants = param<std::vector<std::string>>(p, "variants", {"heff0", "heff1"});
  if (variants.empty()) throw SpecError("'variants' must be non-empty");
  cx.extra["regime_ok"] = cfg.regime_ok();
  std::vector<std::vector<double>> curves;
  for (const auto& v : variants) {
    if (v == "heff0") {
      cfg.variant = hw::Variant::heff0;
    } else if (v == "heff1") {
      cfg.variant = hw::Variant::heff1;
    } else {
      throw SpecError("unknown hardware variant '" + v + "'");
    }
    const auto r = hw::simulate_hardware(cfg, codes::rl_code(cfg.truncation_a - 1), cx.threads);
    auto os = cx.out.open("hardware_" + v + ".csv");
    hw::write_csv(os, r.curve);
    curves.push_back(r.curve.mean);
    cx.extra["max_c_population_" + v] = r.max_c_population;
    const double f1 = value_at(r.curve, 1000.0);
    cx.refs.push_back({v + " F(1 ms) vs break-even", f1,
                       fidelity::break_even_mean_fidelity(cfg.gamma_a1 * 1000.0), "derived"});
  }
  if (curves.size() == 2) {
    double gap = 0.0;
    for (std::size_t i = 0; i < curves[0].size(); ++i) gap = std::max(gap, std::abs(curves[0][i] - curves[1][i]));
    cx.refs.push_back({"max |heff0 - heff1| vs allowed gap", gap, 0.02, "reported"});
  }
}

void kl_compare(Context& cx) {
  const auto& p = cx.spec.parameters;
  const auto lambdas = param<std::vector<double>>(p, "lambdas", {50, 200, 8000});
  if (lambdas.empty()) throw SpecError("'lambdas' must be non-empty");
  const double t_end = positive(param(p, "t_end", 0.6), "t_end");
  const auto intervals = at_least_one(param<std::size_t>(p, "intervals", 60), "intervals");
  std::vector<std::string> cols;
  std::vector<std::vector<double>> data;
  for (double l : lambdas) {
    positive(l, "lambdas");
    std::ostringstream a, b;
    a << "F_a_lambda_" << l;
    b << "F_kl_lambda_" << l;
    cols.push_back(a.str());
    cols.push_back(b.str());
    data.push_back(effective_curve(effective::Variant::rl, l, t_end, intervals));
    data.push_back(effective_curve(effective::Variant::kl_modified, l, t_end, intervals));
    cx.extra["F_end_a_" + std::to_string(static_cast<long long>(l))] = data[data.size() - 2].back();
    cx.extra["F_end_kl_" + std::to_string(static_cast<long long>(l))] = data.back().back();
  }
  auto os = cx.out.open("kl_compare.csv");
  write_table(os, kUnits, cols, dyn::uniform_grid(t_end, intervals), data);
  const auto last = static_cast<std::size_t>(std::max_element(lambdas.begin(), lambdas.end()) - lambdas.begin());
  cx.refs.push_back({"kl F(t_end) at largest lambda", data[2 * last + 1].back(), 1.0, "reported"});
}

void naive_compare(Context& cx) {
  const auto& p = cx.spec.parameters;
  const double l = positive(param(p, "lambda", 8000.0), "lambda");
  const double t_end = positive(param(p, "t_end", 0.6), "t_end");
  const auto intervals = at_least_one(param<std::size_t>(p, "intervals", 60), "intervals");
  const auto t = dyn::uniform_grid(t_end, intervals);
  const auto rl = effective_curve(effective::Variant::rl, l, t_end, intervals);
  const auto naive = effective_curve(effective::Variant::naive, l, t_end, intervals);
  std::vector<double> rl_lim, naive_lim;
  for (double ti : t) {
    rl_lim.push_back(fidelity::rl_analytic_mean_fidelity(ti, effective::limit_decay_rate(effective::Variant::rl)));
    naive_lim.push_back(
        fidelity::rl_analytic_mean_fidelity(ti, effective::limit_decay_rate(effective::Variant::naive)));
  }
  auto os = cx.out.open("naive_compare.csv");
  write_table(os, kUnits, {"F_rl", "F_naive", "F_rl_limit", "F_naive_limit"}, t, {rl, naive, rl_lim, naive_lim});
  cx.refs.push_back({"u_rl", effective::limit_decay_rate(effective::Variant::rl), 3.0 - 2.0 * std::sqrt(2.0), "derived"});
  cx.refs.push_back({"u_naive", effective::limit_decay_rate(effective::Variant::naive), 1.0 / 3.0, "derived"});
}

}  // namespace

RunReport run(const ExperimentSpec& spec_in, const RunOptions& options) {
  ExperimentSpec spec = spec_in;
  if (options.seed) spec.seed = *options.seed;
  if (options.out_dir) spec.output = *options.out_dir;
  const auto start = std::chrono::steady_clock::now();

  Writer writer(spec.output);
  RunReport report;
  report.out_dir = spec.output;
  json extra = json::object();
  Context cx{spec, std::max(1u, options.threads), writer, report.references, extra};
  switch (spec.kind) {
    case Kind::fidelity_curve: fidelity_curve(cx); break;
    case Kind::bloch_heatmap: bloch_heatmap(cx); break;
    case Kind::lambda_sweep: lambda_sweep(cx); break;
    case Kind::shifted_sweep: shifted_sweep(cx); break;
    case Kind::rl_train: rl_train(cx); break;
    case Kind::trajectories: trajectories(cx); break;
    case Kind::hardware: hardware(cx); break;
    case Kind::kl_compare: kl_compare(cx); break;
    case Kind::naive_compare: naive_compare(cx); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json refs = json::array();
  for (const auto& r : report.references) {
    refs.push_back({{"quantity", r.quantity},
                    {"value", r.value},
                    {"reference", r.reference},
                    {"delta", r.value - r.reference},
                    {"source", r.source}});
  }
  report.files = writer.files();
  report.manifest = {{"spec",
                      {{"kind", to_string(spec.kind)},
                       {"parameters", spec.parameters},
                       {"seed", spec.seed},
                       {"output", spec.output.string()}}},
                     {"version", AQEC_VERSION},
                     {"threads", cx.threads},
                     {"wall_time_s", wall},
                     {"files", report.files},
                     {"results", extra},
                     {"references", refs}};
  std::ofstream m(fs::path(spec.output) / "manifest.json");
  m << report.manifest.dump(2) << '\n';
  return report;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SpecError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const NormalizationError*>(&e) || dynamic_cast<const UndefinedErrorBasis*>(&e) ||
      dynamic_cast<const json::exception*>(&e)) {
    return 2;
  }
  return 3;
}

nlohmann::json error_json(const std::exception& e) {
  const int code = exit_code_for(e);
  return {{"error", {{"type", code == 2 ? "spec_error" : "numerical_failure"}, {"message", e.what()}}},
          {"exit_code", code}};
}

}  // namespace aqec::exp
