#pragma once

#include <vector>

#include "pml/linalg.hpp"
#include "pml/scalar.hpp"

namespace pml {

// Rectangular Hankel block: entry (i, j) = seq[offset + i + j].
template <class T>
Mat<T> hankel_block(const std::vector<T>& seq, Eigen::Index rows,
                    Eigen::Index cols, Eigen::Index offset = 0) {
  if (offset + rows + cols - 1 > static_cast<Eigen::Index>(seq.size()))
    throw internal_error("hankel_block: sequence too short");
  Mat<T> M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      M(i, j) = seq[static_cast<size_t>(offset + i + j)];
  return M;
}

// Square Hankel matrix of a sequence (s_0, ..., s_2m); size (m+1) x (m+1).
template <class T>
Mat<T> hankel_matrix(const std::vector<T>& seq) {
  if (seq.size() % 2 == 0)
    throw internal_error("hankel_matrix: sequence length must be odd");
  Eigen::Index m1 = static_cast<Eigen::Index>((seq.size() + 1) / 2);
  return hankel_block(seq, m1, m1);
}

template <class T>
Mat<T> leading_principal(const Mat<T>& M, Eigen::Index size) {
  if (size < 0 || size > M.rows() || size > M.cols())
    throw internal_error("leading_principal: size out of range");
  return M.topLeftCorner(size, size);
}

// Rank of a sequence (s_0, ..., s_2m): m + 1 when the Hankel matrix is
// nonsingular, otherwise the smallest i whose column lies in the span of
// the previous ones.
template <class T>
Eigen::Index rank_of_sequence(const std::vector<T>& seq, const Tol& tol = {}) {
  Mat<T> A = hankel_matrix(seq);
  const Eigen::Index n = A.rows();
  Eigen::Index prev = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index cur = rank(Mat<T>(A.leftCols(i + 1)), tol);
    if (cur == prev) return i;
    prev = cur;
  }
  return n;
}

}  // namespace pml
