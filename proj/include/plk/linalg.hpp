#pragma once

#include <cmath>
#include <optional>
#include <type_traits>

#include <Eigen/Core>

#include "plk/rational.hpp"

namespace plk {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename Scalar>
bool is_negligible(const Scalar& v, const Scalar& scale) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    (void)scale;
    return v.is_zero();
  } else {
    using std::abs;
    return abs(v) <= Scalar(1e-13) * (Scalar(1) + abs(scale));
  }
}

template <typename Scalar>
Scalar magnitude(const Scalar& v) {
  using std::abs;
  return abs(v);
}

/// Row-reduces `m` in place to reduced echelon form; returns pivot columns.
template <typename Scalar>
std::vector<Eigen::Index> row_reduce(Mat<Scalar>& m, Eigen::Index ncols_pivotable) {
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  Scalar scale(0);
  if constexpr (!std::is_same_v<Scalar, Rational>) scale = m.cwiseAbs().maxCoeff();
  for (Eigen::Index col = 0; col < ncols_pivotable && row < m.rows(); ++col) {
    Eigen::Index best = -1;
    for (Eigen::Index r = row; r < m.rows(); ++r) {
      if (is_negligible(m(r, col), scale)) continue;
      if constexpr (std::is_same_v<Scalar, Rational>) {
        best = r;
        break;
      } else {
        if (best < 0 || magnitude(m(r, col)) > magnitude(m(best, col))) best = r;
      }
    }
    if (best < 0) continue;
    m.row(row).swap(m.row(best));
    Scalar inv = Scalar(1) / m(row, col);
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(row, c) *= inv;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == row || is_negligible(m(r, col), scale)) continue;
      Scalar factor = m(r, col);
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) -= factor * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace detail

/// Rank of a matrix (exact for Rational, tolerance-based for floating point).
template <typename Scalar>
Eigen::Index rank(Mat<Scalar> m) {
  return static_cast<Eigen::Index>(detail::row_reduce(m, m.cols()).size());
}

/// Solves the square system `a x = b`; nullopt when singular.
template <typename Scalar>
std::optional<Vec<Scalar>> solve(const Mat<Scalar>& a, const Vec<Scalar>& b) {
  const Eigen::Index n = a.rows();
  Mat<Scalar> aug(n, a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = b;
  auto pivots = detail::row_reduce(aug, a.cols());
  if (static_cast<Eigen::Index>(pivots.size()) < a.cols()) return std::nullopt;
  Vec<Scalar> x(a.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) x(pivots[i]) = aug(i, a.cols());
  // consistency of the remaining rows
  for (Eigen::Index r = a.cols(); r < n; ++r)
    if (!detail::is_negligible(aug(r, a.cols()), Scalar(1))) return std::nullopt;
  return x;
}

template <typename Scalar>
Vec<double> to_double(const Vec<Scalar>& v) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    Vec<double> out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i).to_double();
    return out;
  } else {
    return v.template cast<double>();
  }
}

}  // namespace plk
