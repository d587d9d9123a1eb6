#include <algorithm>
#include <vector>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "aqec/dynamics.hpp"
#include "aqec/error.hpp"

namespace aqec::dyn {

namespace {

// vec(rho) is column-major: index = i + j * d for element (i, j).
// Superoperator of X rho Y is kron(Y^T, X).
Matrix build_superoperator(const Lindbladian& gen) {
  const auto d = gen.effective_hamiltonian().rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix& hnh = gen.effective_hamiltonian();
  Matrix s = Matrix::Zero(d * d, d * d);
  // -i H_nh rho + i rho H_nh^dag
  for (Eigen::Index j = 0; j < d; ++j) {
    s.block(j * d, j * d, d, d) += -kI * hnh;
  }
  const Matrix hnh_dag_t = hnh.adjoint().transpose();  // = conj(H_nh)
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const cplx c = kI * hnh_dag_t(a, b);
      if (c != cplx(0.0)) s.block(a * d, b * d, d, d) += c * id;
    }
  }
  for (std::size_t k = 0; k < gen.jump_matrices().size(); ++k) {
    const Matrix& l = gen.jump_matrices()[k];
    const Matrix lconj = l.conjugate();  // (L^dag)^T
    const double r = gen.rates()[k];
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        const cplx c = r * lconj(a, b);
        if (c != cplx(0.0)) s.block(a * d, b * d, d, d) += c * l;
      }
    }
  }
  return s;
}

}  // namespace

BlockPropagator::BlockPropagator(const Lindbladian& generator, std::span<const Matrix> seeds,
                                 double t)
    : dim_(generator.space().dim()) {
  const std::size_t n = dim_ * dim_;
  const Matrix s = build_superoperator(generator);

  // Reachability from the seeds' support along nonzero superoperator columns.
  in_reach_.assign(n, 0);
  std::vector<std::size_t> stack;
  for (const auto& seed : seeds) {
    if (static_cast<std::size_t>(seed.rows()) != dim_ || seed.rows() != seed.cols()) {
      throw DimensionError("BlockPropagator: seed does not match generator space");
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (seed(k % dim_, k / dim_) != cplx(0.0) && !in_reach_[k]) {
        in_reach_[k] = 1;
        stack.push_back(k);
      }
    }
  }
  while (!stack.empty()) {
    const std::size_t col = stack.back();
    stack.pop_back();
    for (std::size_t row = 0; row < n; ++row) {
      if (!in_reach_[row] && s(row, col) != cplx(0.0)) {
        in_reach_[row] = 1;
        stack.push_back(row);
      }
    }
  }

  // Undirected connected components on the reachable set (union-find).
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t col = 0; col < n; ++col) {
    if (!in_reach_[col]) continue;
    for (std::size_t row = 0; row < n; ++row) {
      if (in_reach_[row] && s(row, col) != cplx(0.0)) parent[find(row)] = find(col);
    }
  }
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (in_reach_[k]) {
      groups[find(k)].push_back(k);
      ++reachable_;
    }
  }
  for (auto& g : groups) {
    if (g.empty()) continue;
    const auto m = static_cast<Eigen::Index>(g.size());
    Matrix sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = s(g[a], g[b]);
    }
    Matrix p = (sub * t).exp();
    blocks_.push_back(Block{std::move(g), std::move(p)});
  }
}

Matrix BlockPropagator::apply(const Matrix& rho) const {
  if (static_cast<std::size_t>(rho.rows()) != dim_ || rho.rows() != rho.cols()) {
    throw DimensionError("BlockPropagator::apply: state does not match generator space");
  }
  for (std::size_t k = 0; k < dim_ * dim_; ++k) {
    if (!in_reach_[k] && rho(k % dim_, k / dim_) != cplx(0.0)) {
      throw DimensionError("BlockPropagator::apply: state has support outside the seeds' closure");
    }
  }
  Matrix out = Matrix::Zero(dim_, dim_);
  for (const auto& b : blocks_) {
    const auto m = static_cast<Eigen::Index>(b.indices.size());
    Vector v(m);
    for (Eigen::Index a = 0; a < m; ++a) v(a) = rho(b.indices[a] % dim_, b.indices[a] / dim_);
    const Vector w = b.propagator * v;
    for (Eigen::Index a = 0; a < m; ++a) out(b.indices[a] % dim_, b.indices[a] / dim_) = w(a);
  }
  return out;
}

std::vector<std::size_t> BlockPropagator::block_sizes() const {
  std::vector<std::size_t> s;
  for (const auto& b : blocks_) s.push_back(b.indices.size());
  std::sort(s.rbegin(), s.rend());
  return s;
}

}  // namespace aqec::dyn
