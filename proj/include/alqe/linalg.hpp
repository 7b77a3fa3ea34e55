// Exact dense linear algebra over a field scalar (Rational in practice).
//
// Eigen's decompositions choose pivots by magnitude and assume rounding; over
// an exact field any nonzero pivot is as good as another, so these routines
// pivot on the first nonzero entry and never compare against a tolerance.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "alqe/rational.hpp"

namespace alqe {

/// Row-reduces `m` in place to reduced row echelon form and returns the pivot
/// columns in order.
template <typename Scalar>
std::vector<Eigen::Index> row_reduce(Matrix<Scalar>& m) {
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index pivot = row;
    while (pivot < m.rows() && m(pivot, col) == Scalar(0)) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row) m.row(pivot).swap(m.row(row));
    const Scalar inv = Scalar(1) / m(row, col);
    for (Eigen::Index j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == Scalar(0)) continue;
      const Scalar factor = m(i, col);
      for (Eigen::Index j = col; j < m.cols(); ++j) m(i, j) -= factor * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <typename Scalar>
Eigen::Index exact_rank(Matrix<Scalar> m) {
  return static_cast<Eigen::Index>(row_reduce(m).size());
}

/// Exact determinant by fraction-preserving elimination.
template <typename Scalar>
Scalar exact_determinant(Matrix<Scalar> m) {
  Scalar det(1);
  const Eigen::Index n = m.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    while (pivot < n && m(pivot, col) == Scalar(0)) ++pivot;
    if (pivot == n) return Scalar(0);
    if (pivot != col) {
      m.row(pivot).swap(m.row(col));
      det = -det;
    }
    det *= m(col, col);
    for (Eigen::Index i = col + 1; i < n; ++i) {
      if (m(i, col) == Scalar(0)) continue;
      const Scalar factor = m(i, col) / m(col, col);
      for (Eigen::Index j = col; j < n; ++j) m(i, j) -= factor * m(col, j);
    }
  }
  return det;
}

/// Gauss-Jordan inverse; std::nullopt when `m` is singular.
template <typename Scalar>
std::optional<Matrix<Scalar>> exact_inverse(const Matrix<Scalar>& m) {
  const Eigen::Index n = m.rows();
  Matrix<Scalar> augmented(n, 2 * n);
  augmented.leftCols(n) = m;
  augmented.rightCols(n) = Matrix<Scalar>::Identity(n, n);
  const auto pivots = row_reduce(augmented);
  if (static_cast<Eigen::Index>(pivots.size()) < n || (n > 0 && pivots[n - 1] != n - 1)) {
    return std::nullopt;
  }
  return Matrix<Scalar>(augmented.rightCols(n));
}

/// Finds x >= 0 with A x = b by phase-one simplex on an exact tableau.
///
/// Bland's smallest-index rule for both entering and leaving variables makes
/// the method terminate without any anti-cycling perturbation.
template <typename Scalar>
std::optional<Vector<Scalar>> nonnegative_solution(const Matrix<Scalar>& a, const Vector<Scalar>& b) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index vars = a.cols();
  // Tableau columns: structural vars, one artificial per row, rhs.
  Matrix<Scalar> t = Matrix<Scalar>::Zero(rows + 1, vars + rows + 1);
  std::vector<Eigen::Index> basis(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const bool flip = b(i) < Scalar(0);
    for (Eigen::Index j = 0; j < vars; ++j) t(i, j) = flip ? Scalar(-a(i, j)) : a(i, j);
    t(i, vars + i) = Scalar(1);
    t(i, vars + rows) = flip ? Scalar(-b(i)) : b(i);
    basis[i] = vars + i;
  }
  // Objective row holds reduced costs of minimizing the artificial sum.
  for (Eigen::Index j = 0; j <= vars + rows; ++j) {
    if (j >= vars && j < vars + rows) continue;
    Scalar s(0);
    for (Eigen::Index i = 0; i < rows; ++i) s += t(i, j);
    t(rows, j) = -s;
  }

  for (;;) {
    Eigen::Index entering = -1;
    for (Eigen::Index j = 0; j < vars + rows; ++j) {
      if (t(rows, j) < Scalar(0)) {
        entering = j;
        break;
      }
    }
    if (entering < 0) break;
    Eigen::Index leaving = -1;
    Scalar best_ratio(0);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (!(t(i, entering) > Scalar(0))) continue;
      const Scalar ratio = t(i, vars + rows) / t(i, entering);
      if (leaving < 0 || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leaving])) {
        leaving = i;
        best_ratio = ratio;
      }
    }
    if (leaving < 0) break;  // unbounded direction; cannot happen in phase one
    const Scalar inv = Scalar(1) / t(leaving, entering);
    for (Eigen::Index j = 0; j <= vars + rows; ++j) t(leaving, j) *= inv;
    for (Eigen::Index i = 0; i <= rows; ++i) {
      if (i == leaving || t(i, entering) == Scalar(0)) continue;
      const Scalar factor = t(i, entering);
      for (Eigen::Index j = 0; j <= vars + rows; ++j) t(i, j) -= factor * t(leaving, j);
    }
    basis[leaving] = entering;
  }

  if (t(rows, vars + rows) != Scalar(0)) return std::nullopt;
  Vector<Scalar> x = Vector<Scalar>::Zero(vars);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (basis[i] < vars) x(basis[i]) = t(i, vars + rows);
  }
  // Degenerate artificials may stay basic at zero; the solution is still exact.
  if (a * x != b) return std::nullopt;
  return x;
}

}  // namespace alqe
