#include "aqec/mlp.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "aqec/error.hpp"

namespace aqec::rl {

Mlp::Mlp(std::vector<int> sizes, std::mt19937_64& rng, double output_gain) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw Error("Mlp needs at least input and output sizes");
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    // Glorot-uniform.
    const double bound = std::sqrt(6.0 / (in + out)) * (l + 1 == layers ? output_gain : 1.0);
    std::uniform_real_distribution<double> u(-bound, bound);
    RealMatrix w(out, in);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
    w_.push_back(std::move(w));
    b_.push_back(Eigen::VectorXd::Zero(out));
  }
  zero_grad();
}

RealMatrix Mlp::forward(const RealMatrix& x) {
  acts_.clear();
  RealMatrix h = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    acts_.push_back(h);
    RealMatrix z = (w_[l] * h).colwise() + b_[l];
    h = (l + 1 < w_.size()) ? RealMatrix(z.array().tanh()) : z;
  }
  acts_.push_back(h);
  return h;
}

RealMatrix Mlp::predict(const RealMatrix& x) const {
  RealMatrix h = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    RealMatrix z = (w_[l] * h).colwise() + b_[l];
    h = (l + 1 < w_.size()) ? RealMatrix(z.array().tanh()) : z;
  }
  return h;
}

void Mlp::backward(const RealMatrix& grad_out) {
  if (acts_.size() != w_.size() + 1) throw Error("Mlp::backward called without forward");
  RealMatrix delta = grad_out;
  for (std::size_t l = w_.size(); l-- > 0;) {
    gw_[l] += delta * acts_[l].transpose();
    gb_[l] += delta.rowwise().sum();
    if (l == 0) break;
    RealMatrix back = w_[l].transpose() * delta;
    // acts_[l] is tanh output of layer l-1.
    delta = back.array() * (1.0 - acts_[l].array().square());
  }
}

void Mlp::zero_grad() {
  gw_.resize(w_.size());
  gb_.resize(b_.size());
  for (std::size_t l = 0; l < w_.size(); ++l) {
    gw_[l] = RealMatrix::Zero(w_[l].rows(), w_[l].cols());
    gb_[l] = Eigen::VectorXd::Zero(b_[l].size());
  }
}

nlohmann::json Mlp::to_json() const {
  nlohmann::json j;
  j["sizes"] = sizes_;
  auto& layers = j["layers"] = nlohmann::json::array();
  for (std::size_t l = 0; l < w_.size(); ++l) {
    layers.push_back({{"w", std::vector<double>(w_[l].data(), w_[l].data() + w_[l].size())},
                      {"b", std::vector<double>(b_[l].data(), b_[l].data() + b_[l].size())}});
  }
  return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  Mlp m;
  m.sizes_ = j.at("sizes").get<std::vector<int>>();
  const auto& layers = j.at("layers");
  if (layers.size() + 1 != m.sizes_.size()) throw SpecError("Mlp json: layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto w = layers[l].at("w").get<std::vector<double>>();
    const auto b = layers[l].at("b").get<std::vector<double>>();
    const int in = m.sizes_[l];
    const int out = m.sizes_[l + 1];
    if (w.size() != static_cast<std::size_t>(in * out) || b.size() != static_cast<std::size_t>(out)) {
      throw SpecError("Mlp json: layer shape mismatch");
    }
    m.w_.push_back(Eigen::Map<const RealMatrix>(w.data(), out, in));
    m.b_.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(), out));
  }
  m.zero_grad();
  return m;
}

void Adam::update(double* p, const double* g, std::size_t n, std::size_t slot) {
  if (m_.size() <= slot) {
    m_.resize(slot + 1);
    v_.resize(slot + 1);
    t_.resize(slot + 1, 0);
  }
  if (m_[slot].size() != n) {
    m_[slot].assign(n, 0.0);
    v_[slot].assign(n, 0.0);
    t_[slot] = 0;
  }
  const auto t = static_cast<double>(++t_[slot]);
  const double c1 = 1.0 - std::pow(b1_, t);
  const double c2 = 1.0 - std::pow(b2_, t);
  auto& m = m_[slot];
  auto& v = v_[slot];
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1_ * m[i] + (1 - b1_) * g[i];
    v[i] = b2_ * v[i] + (1 - b2_) * g[i] * g[i];
    p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
  }
}

void Adam::step(Mlp& net) {
  std::size_t slot = 0;
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    auto& w = net.weights()[l];
    auto& b = net.biases()[l];
    update(w.data(), net.weight_grads()[l].data(), static_cast<std::size_t>(w.size()), slot++);
    update(b.data(), net.bias_grads()[l].data(), static_cast<std::size_t>(b.size()), slot++);
  }
}

void Adam::step(Eigen::VectorXd& param, const Eigen::VectorXd& grad) {
  update(param.data(), grad.data(), static_cast<std::size_t>(param.size()), 0);
}

}  // namespace aqec::rl
