#pragma once

// Small fully connected network (tanh hidden layers, linear output) with
// manual backpropagation and an Adam optimizer. Samples are columns.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace aqec::rl {

using RealMatrix = Eigen::MatrixXd;

class Mlp {
 public:
  Mlp() = default;
  /// sizes = {input, hidden..., output}. Output-layer weights are scaled by
  /// `output_gain` at initialization.
  Mlp(std::vector<int> sizes, std::mt19937_64& rng, double output_gain = 1.0);

  const std::vector<int>& sizes() const noexcept { return sizes_; }

  /// Forward pass that caches activations for backward().
  RealMatrix forward(const RealMatrix& x);
  RealMatrix predict(const RealMatrix& x) const;
  /// Accumulates parameter gradients for d loss / d output = grad_out.
  void backward(const RealMatrix& grad_out);
  void zero_grad();

  std::vector<RealMatrix>& weights() noexcept { return w_; }
  std::vector<Eigen::VectorXd>& biases() noexcept { return b_; }
  const std::vector<RealMatrix>& weight_grads() const noexcept { return gw_; }
  const std::vector<Eigen::VectorXd>& bias_grads() const noexcept { return gb_; }

  nlohmann::json to_json() const;
  static Mlp from_json(const nlohmann::json& j);

 private:
  std::vector<int> sizes_;
  std::vector<RealMatrix> w_;
  std::vector<Eigen::VectorXd> b_;
  std::vector<RealMatrix> gw_;
  std::vector<Eigen::VectorXd> gb_;
  std::vector<RealMatrix> acts_;  // layer inputs of the last forward()
};

/// Adam over a list of parameter blocks of fixed shapes.
class Adam {
 public:
  explicit Adam(double lr = 3e-4, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

  void step(Mlp& net);
  void step(Eigen::VectorXd& param, const Eigen::VectorXd& grad);

 private:
  void update(double* p, const double* g, std::size_t n, std::size_t slot);

  double lr_, b1_, b2_, eps_;
  std::vector<std::vector<double>> m_, v_;
  std::vector<std::size_t> t_;
};

}  // namespace aqec::rl
