#pragma once
// Thin wrappers over Eigen for the dense linear algebra used across the
// toolkit: numeric rank, null spaces, and small complex matrix helpers.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "superint/common.hpp"

namespace superint {

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

inline int numeric_rank(const MatC& m, double rel_tol = 1e-8) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatC> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double smax = s(0);
  if (smax == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * smax) ++r;
  return r;
}

inline int numeric_rank(const MatR& m, double rel_tol = 1e-8) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatR> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double smax = s(0);
  if (smax == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * smax) ++r;
  return r;
}

// Orthonormal basis of the (right) null space of m, relative threshold on
// singular values.
inline MatR null_space(const MatR& m, double rel_tol = 1e-8) {
  Eigen::JacobiSVD<MatR> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s(i) > rel_tol * smax) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

inline double max_abs(const MatC& m) {
  double r = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

// Relative residual of a matrix identity lhs == rhs: max|lhs-rhs| normalized
// by the largest entry magnitude among the summands (floor 1).
inline double matrix_residual(const MatC& lhs, const MatC& rhs) {
  const double scale = std::max(1.0, std::max(max_abs(lhs), max_abs(rhs)));
  return max_abs(lhs - rhs) / scale;
}

inline MatC commutator(const MatC& a, const MatC& b) { return a * b - b * a; }
inline MatC anticommutator(const MatC& a, const MatC& b) { return a * b + b * a; }

// Symmetrizer sums (all orderings, summed, not averaged).
inline MatC sym3(const MatC& a, const MatC& b, const MatC& c) {
  return a * b * c + a * c * b + b * a * c + b * c * a + c * a * b + c * b * a;
}

}  // namespace superint
