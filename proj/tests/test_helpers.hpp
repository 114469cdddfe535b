#pragma once

#include "qdiv/linalg.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace qdiv::testing {

inline DensityOperator diag_state(std::vector<double> p) {
  return DensityOperator::diagonal(std::span<const double>(p.data(), p.size()));
}

inline PositiveOperator diag_positive(std::vector<double> p) {
  RealVector v(static_cast<long>(p.size()));
  for (size_t i = 0; i < p.size(); ++i) v(static_cast<long>(i)) = p[i];
  return PositiveOperator(Matrix(v.cast<Complex>().asDiagonal()));
}

inline DensityOperator ket_plus() {
  Eigen::VectorXcd v(2);
  v << 1.0, 1.0;
  return DensityOperator::pure(v);
}

inline DensityOperator bell_state() {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = 1.0;
  v(3) = 1.0;
  return DensityOperator::pure(v);
}

inline Matrix hermitize_for_test(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace qdiv::testing
