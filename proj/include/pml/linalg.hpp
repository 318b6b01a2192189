#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pml/scalar.hpp"

namespace pml {

template <class T>
MatD to_double_matrix(const Mat<T>& M) {
  MatD out(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out(i, j) = to_double(M(i, j));
  return out;
}

template <class T>
VecD to_double_vector(const Vec<T>& v) {
  VecD out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = to_double(v(i));
  return out;
}

template <class T>
Mat<T> submatrix(const Mat<T>& M, const std::vector<Eigen::Index>& rows,
                 const std::vector<Eigen::Index>& cols) {
  Mat<T> out(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          M(rows[i], cols[j]);
  return out;
}

template <class T>
Mat<T> sym_submatrix(const Mat<T>& M, const std::vector<Eigen::Index>& idx) {
  return submatrix(M, idx, idx);
}

template <class T>
void symmetrize(Mat<T>& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = i + 1; j < M.cols(); ++j) {
      T avg = (M(i, j) + M(j, i)) / T(2);
      M(i, j) = avg;
      M(j, i) = avg;
    }
}

// Chained Eigen products over multiprecision scalars trip a hard error in
// Boost's converting-constructor traits, so quadratic forms and triple
// products materialize their intermediates.
template <class T>
T quadratic_form(const Mat<T>& A, const Vec<T>& v) {
  Vec<T> Av = A * v;
  T out(0);
  for (Eigen::Index i = 0; i < v.size(); ++i) out += v(i) * Av(i);
  return out;
}

enum class PsdVerdict { PD, PsdSingular, NotPsd };

template <class T>
struct PsdCertificate {
  PsdVerdict verdict = PsdVerdict::NotPsd;
  Eigen::Index rank = 0;
  std::vector<Vec<T>> kernel;
  std::optional<Vec<T>> neg_witness;

  bool is_psd() const { return verdict != PsdVerdict::NotPsd; }
  bool is_pd() const { return verdict == PsdVerdict::PD; }
};

namespace detail {

// Symmetric congruence elimination over an exact field.  Maintains the
// invariant S = Phi * A * Phi^T, so certificates come straight out of Phi:
// a negative pivot at p gives the witness Phi^T e_p, and once the remaining
// block is identically zero its Phi rows span the kernel.
template <class T>
PsdCertificate<T> psd_check_exact(const Mat<T>& A) {
  const Eigen::Index n = A.rows();
  Mat<T> S = A;
  Mat<T> Phi = Mat<T>::Identity(n, n);
  std::vector<Eigen::Index> remaining(n);
  for (Eigen::Index i = 0; i < n; ++i) remaining[static_cast<size_t>(i)] = i;

  PsdCertificate<T> cert;
  cert.rank = 0;
  while (!remaining.empty()) {
    size_t pivot_pos = remaining.size();
    for (size_t i = 0; i < remaining.size(); ++i) {
      if (S(remaining[i], remaining[i]) != T(0)) {
        pivot_pos = i;
        break;
      }
    }
    if (pivot_pos == remaining.size()) {
      for (size_t a = 0; a < remaining.size(); ++a)
        for (size_t b = a + 1; b < remaining.size(); ++b) {
          Eigen::Index p = remaining[a], q = remaining[b];
          if (S(p, q) != T(0)) {
            Vec<T> v = Phi.row(p).transpose();
            if (S(p, q) > T(0))
              v -= Vec<T>(Phi.row(q).transpose());
            else
              v += Vec<T>(Phi.row(q).transpose());
            cert.verdict = PsdVerdict::NotPsd;
            cert.neg_witness = v;
            return cert;
          }
        }
      for (Eigen::Index q : remaining)
        cert.kernel.push_back(Phi.row(q).transpose());
      cert.verdict = PsdVerdict::PsdSingular;
      return cert;
    }

    Eigen::Index p = remaining[pivot_pos];
    if (S(p, p) < T(0)) {
      cert.verdict = PsdVerdict::NotPsd;
      cert.neg_witness = Vec<T>(Phi.row(p).transpose());
      return cert;
    }
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pivot_pos));
    const T piv = S(p, p);
    for (Eigen::Index q : remaining) {
      if (S(q, p) == T(0)) continue;
      T f = S(q, p) / piv;
      for (Eigen::Index r : remaining) S(q, r) -= f * S(p, r);
      Phi.row(q) -= f * Phi.row(p);
    }
    for (Eigen::Index q : remaining) {
      S(q, p) = T(0);
      S(p, q) = T(0);
    }
    ++cert.rank;
  }
  cert.verdict = PsdVerdict::PD;
  return cert;
}

inline PsdCertificate<double> psd_check_float(const MatD& A, const Tol& tol) {
  const Eigen::Index n = A.rows();
  PsdCertificate<double> cert;
  if (n == 0) {
    cert.verdict = PsdVerdict::PD;
    return cert;
  }
  MatD Asym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<MatD> es(Asym);
  const VecD& lam = es.eigenvalues();
  double scale = std::max(std::fabs(lam(0)), std::fabs(lam(n - 1)));
  double tau = tol.threshold(scale);
  if (lam(0) < -tau) {
    cert.verdict = PsdVerdict::NotPsd;
    cert.neg_witness = VecD(es.eigenvectors().col(0));
    return cert;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam(i) > tau)
      ++cert.rank;
    else
      cert.kernel.push_back(es.eigenvectors().col(i));
  }
  cert.verdict = (cert.rank == n) ? PsdVerdict::PD : PsdVerdict::PsdSingular;
  return cert;
}

}  // namespace detail

template <class T>
PsdCertificate<T> psd_check(const Mat<T>& A, const Tol& tol = {}) {
  if (A.rows() != A.cols()) throw internal_error("psd_check needs a square matrix");
  if constexpr (is_exact_v<T>) {
    (void)tol;
    return detail::psd_check_exact(A);
  } else {
    return detail::psd_check_float(A, tol);
  }
}

// Row echelon reduction; returns the reduced matrix and pivot column list.
template <class T>
std::pair<Mat<T>, std::vector<Eigen::Index>> row_reduce(Mat<T> M,
                                                        const Tol& tol = {}) {
  const Eigen::Index nr = M.rows(), nc = M.cols();
  double tau = 0.0;
  if constexpr (!is_exact_v<T>) tau = tol.threshold(norm_inf(M));
  std::vector<Eigen::Index> pivots;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < nc && r < nr; ++c) {
    Eigen::Index best = -1;
    if constexpr (is_exact_v<T>) {
      for (Eigen::Index i = r; i < nr; ++i)
        if (M(i, c) != T(0)) {
          best = i;
          break;
        }
    } else {
      double mag = tau;
      for (Eigen::Index i = r; i < nr; ++i)
        if (std::fabs(M(i, c)) > mag) {
          mag = std::fabs(M(i, c));
          best = i;
        }
    }
    if (best < 0) continue;
    M.row(r).swap(M.row(best));
    M.row(r) /= M(r, c);
    for (Eigen::Index i = 0; i < nr; ++i) {
      if (i == r) continue;
      if (M(i, c) != T(0)) M.row(i) -= M(i, c) * M.row(r);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(M), std::move(pivots)};
}

// Null space basis from the reduced echelon form: one vector per free column.
template <class T>
std::vector<Vec<T>> kernel_basis(const Mat<T>& M, const Tol& tol = {}) {
  auto [R, pivots] = row_reduce(M, tol);
  std::vector<bool> is_pivot(static_cast<size_t>(M.cols()), false);
  for (Eigen::Index c : pivots) is_pivot[static_cast<size_t>(c)] = true;
  std::vector<Vec<T>> basis;
  for (Eigen::Index c = 0; c < M.cols(); ++c) {
    if (is_pivot[static_cast<size_t>(c)]) continue;
    Vec<T> v = Vec<T>::Zero(M.cols());
    v(c) = T(1);
    for (size_t r = 0; r < pivots.size(); ++r)
      v(pivots[r]) = -R(static_cast<Eigen::Index>(r), c);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
Eigen::Index rank(const Mat<T>& M, const Tol& tol = {}) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  if constexpr (is_exact_v<T>) {
    return static_cast<Eigen::Index>(row_reduce(M).second.size());
  } else {
    Eigen::JacobiSVD<MatD> svd(M);
    const VecD& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    double tau = tol.threshold(sv(0));
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tau) ++r;
    return r;
  }
}

// Solves A X = B for square invertible A; throws on singularity.
template <class T>
Mat<T> solve_linear(Mat<T> A, Mat<T> B) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n)
    throw internal_error("solve_linear dimension mismatch");
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index best = -1;
    if constexpr (is_exact_v<T>) {
      for (Eigen::Index i = c; i < n; ++i)
        if (A(i, c) != T(0)) {
          best = i;
          break;
        }
    } else {
      double mag = 0.0;
      for (Eigen::Index i = c; i < n; ++i)
        if (std::fabs(A(i, c)) > mag) {
          mag = std::fabs(A(i, c));
          best = i;
        }
    }
    if (best < 0) throw internal_error("solve_linear: singular matrix");
    A.row(c).swap(A.row(best));
    B.row(c).swap(B.row(best));
    T piv = A(c, c);
    A.row(c) /= piv;
    B.row(c) /= piv;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == c || A(i, c) == T(0)) continue;
      T f = A(i, c);
      A.row(i) -= f * A.row(c);
      B.row(i) -= f * B.row(c);
    }
  }
  return B;
}

template <class T>
Vec<T> solve_linear(const Mat<T>& A, const Vec<T>& b) {
  Mat<T> B = b;
  return Vec<T>(solve_linear(A, B));
}

// Moore-Penrose pseudoinverse.  The exact path goes through a rank
// factorization A = C R with C the pivot columns of A and R the nonzero
// rows of its reduced echelon form, giving A^+ = R^T (R R^T)^-1 (C^T C)^-1 C^T.
template <class T>
Mat<T> pinv(const Mat<T>& A, const Tol& tol = {}) {
  const Eigen::Index nr = A.rows(), nc = A.cols();
  if (nr == 0 || nc == 0) return Mat<T>::Zero(nc, nr);
  if constexpr (is_exact_v<T>) {
    auto [R0, pivots] = row_reduce(A);
    const Eigen::Index r = static_cast<Eigen::Index>(pivots.size());
    if (r == 0) return Mat<T>::Zero(nc, nr);
    Mat<T> C(nr, r), R(r, nc);
    for (Eigen::Index j = 0; j < r; ++j)
      C.col(j) = A.col(pivots[static_cast<size_t>(j)]);
    R = R0.topRows(r);
    Mat<T> RRt = R * R.transpose();
    Mat<T> CtC = C.transpose() * C;
    Mat<T> left = solve_linear(CtC, Mat<T>(C.transpose()));
    Mat<T> mid = solve_linear(RRt, left);
    return R.transpose() * mid;
  } else {
    Eigen::JacobiSVD<MatD> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VecD& sv = svd.singularValues();
    double tau = sv.size() ? tol.threshold(sv(0)) : 0.0;
    VecD inv = VecD::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tau) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  }
}

// Generalized Schur complement M / A where A is the leading a x a block.
template <class T>
Mat<T> schur_complement(const Mat<T>& M, Eigen::Index a, const Tol& tol = {}) {
  const Eigen::Index n = M.rows();
  if (M.cols() != n || a < 0 || a > n)
    throw internal_error("schur_complement block size out of range");
  Mat<T> A = M.topLeftCorner(a, a);
  Mat<T> B = M.topRightCorner(a, n - a);
  Mat<T> C = M.bottomLeftCorner(n - a, a);
  Mat<T> D = M.bottomRightCorner(n - a, n - a);
  Mat<T> CAp = C * pinv(A, tol);
  return D - CAp * B;
}

template <class T>
bool in_column_space(const Mat<T>& A, const Mat<T>& B, const Tol& tol = {}) {
  if (A.rows() != B.rows()) throw internal_error("in_column_space shape mismatch");
  Mat<T> X = pinv(A, tol) * B;
  Mat<T> resid = A * X - B;
  if constexpr (is_exact_v<T>) {
    return resid.isZero(0);
  } else {
    double tau = tol.threshold(std::max(norm_inf(A), norm_inf(B)));
    return norm_inf(resid) <= tau;
  }
}

template <class T>
bool in_column_space(const Mat<T>& A, const Vec<T>& b, const Tol& tol = {}) {
  Mat<T> B = b;
  return in_column_space(A, B, tol);
}

// Checks the kernel extension property: if A is psd and v annihilates the
// principal submatrix on rows/cols Q, the zero-padded v must annihilate A.
template <class T>
bool extend_kernel_check(const Mat<T>& A, const std::vector<Eigen::Index>& Q,
                         const Vec<T>& v, const Tol& tol = {}) {
  if (static_cast<Eigen::Index>(Q.size()) != v.size())
    throw internal_error("extend_kernel_check index/vector mismatch");
  Vec<T> padded = Vec<T>::Zero(A.rows());
  for (size_t i = 0; i < Q.size(); ++i) padded(Q[i]) = v(static_cast<Eigen::Index>(i));
  Vec<T> image = A * padded;
  if constexpr (is_exact_v<T>) {
    return image.isZero(0);
  } else {
    double tau = tol.threshold(norm_inf(A) * std::max(1.0, norm_inf(v)));
    return norm_inf(image) <= tau;
  }
}

template <class T>
double min_eigenvalue(const Mat<T>& A) {
  if (A.rows() == 0) return std::numeric_limits<double>::infinity();
  MatD Ad = to_double_matrix(A);
  MatD Asym = 0.5 * (Ad + Ad.transpose());
  Eigen::SelfAdjointEigenSolver<MatD> es(Asym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

template <class T>
double max_eigenvalue(const Mat<T>& A) {
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  MatD Ad = to_double_matrix(A);
  MatD Asym = 0.5 * (Ad + Ad.transpose());
  Eigen::SelfAdjointEigenSolver<MatD> es(Asym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(A.rows() - 1);
}

}  // namespace pml
