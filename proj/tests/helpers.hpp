#pragma once

#include <complex>
#include <random>

#include "aqec/fock.hpp"

namespace testutil {

using aqec::cplx;
using aqec::Matrix;
using aqec::Vector;

inline Matrix random_matrix(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(n(rng), n(rng));
  return m;
}

inline Matrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  const Matrix m = random_matrix(d, rng);
  return 0.5 * (m + m.adjoint());
}

inline Matrix random_density(std::size_t d, std::mt19937_64& rng) {
  const Matrix m = random_matrix(d, rng);
  Matrix r = m * m.adjoint();
  return r / r.trace();
}

inline Vector random_unit(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(n(rng), n(rng));
  return v.normalized();
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testutil
