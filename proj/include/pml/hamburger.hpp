#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <optional>
#include <vector>

#include "pml/hankel.hpp"
#include "pml/linalg.hpp"
#include "pml/measure.hpp"
#include "pml/scalar.hpp"

namespace pml {

enum class ThmpBranch { Direct, FlatExtension };

template <class T>
struct ThmpDecision {
  bool solvable = false;
  ThmpBranch branch = ThmpBranch::Direct;
  Eigen::Index rank_hankel = 0;
  Eigen::Index rank_sequence = 0;
  std::optional<Vec<T>> psd_witness;
  // The three classical characterizations are provably equivalent; in
  // floating point they are still evaluated independently and compared.
  bool conditions_agree = true;
};

namespace detail {

template <class T>
bool is_zero_sequence(const std::vector<T>& seq) {
  for (const auto& v : seq)
    if (v != T(0)) return false;
  return true;
}

inline std::vector<double> companion_roots(const VecD& phi) {
  const Eigen::Index r = phi.size();
  if (r == 0) return {};
  MatD C = MatD::Zero(r, r);
  for (Eigen::Index i = 1; i < r; ++i) C(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < r; ++i) C(i, r - 1) = phi(i);
  Eigen::EigenSolver<MatD> es(C);
  std::vector<double> roots;
  roots.reserve(static_cast<size_t>(r));
  for (Eigen::Index i = 0; i < r; ++i) {
    std::complex<double> z = es.eigenvalues()(i);
    if (std::fabs(z.imag()) > 1e-7 * (1.0 + std::fabs(z.real())))
      throw internal_error("complex roots in atom polynomial");
    roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end());
  for (size_t i = 1; i < roots.size(); ++i)
    if (roots[i] - roots[i - 1] <= 1e-7 * (1.0 + std::fabs(roots[i])))
      throw internal_error("coincident roots in atom polynomial");
  return roots;
}

// Atoms are the roots of t^r - sum_j phi_j t^j; densities come from the
// Vandermonde system against the first r moments.
template <class T>
AtomicMeasure1D thmp_solve_direct(const std::vector<T>& seq, Eigen::Index r,
                                  const Tol& tol) {
  if (r == 0) return {};
  Mat<T> Ar = hankel_block(seq, r, r);
  Vec<T> rhs(r);
  for (Eigen::Index i = 0; i < r; ++i) rhs(i) = seq[static_cast<size_t>(r + i)];
  Vec<T> phi = solve_linear(Ar, rhs);

  std::vector<double> roots = companion_roots(to_double_vector(phi));
  std::vector<XValue> atoms;
  atoms.reserve(roots.size());
  bool all_exact = false;
  if constexpr (is_exact_v<T>) {
    all_exact = true;
    for (double x : roots) {
      std::optional<Rational> cand = rationalize(x);
      if (cand) {
        Rational acc(1), val(0);
        for (Eigen::Index j = 0; j < r; ++j) {
          val += phi(j) * acc;
          acc *= *cand;
        }
        if (acc != val) cand.reset();
      }
      if (cand)
        atoms.emplace_back(*cand);
      else {
        atoms.emplace_back(x);
        all_exact = false;
      }
    }
  } else {
    for (double x : roots) atoms.emplace_back(x);
  }

  AtomicMeasure1D mu;
  if (all_exact && is_exact_v<T>) {
    MatQ V(r, r);
    VecQ b(r);
    for (Eigen::Index j = 0; j < r; ++j) {
      Rational acc(1);
      for (Eigen::Index i = 0; i < r; ++i) {
        V(i, j) = acc;
        acc *= *atoms[static_cast<size_t>(j)].exact;
      }
    }
    for (Eigen::Index i = 0; i < r; ++i) b(i) = Rational(seq[static_cast<size_t>(i)]);
    VecQ rho = solve_linear(V, b);
    Rational total(0);
    for (Eigen::Index j = 0; j < r; ++j) {
      if (rho(j) <= 0) throw internal_error("non-positive density in 1-d solve");
      total += rho(j);
      mu.atoms.push_back({atoms[static_cast<size_t>(j)], XValue(rho(j))});
    }
    if (total != b(0)) throw internal_error("densities do not sum to the mass");
  } else {
    MatD V(r, r);
    VecD b(r);
    for (Eigen::Index j = 0; j < r; ++j) {
      double acc = 1.0;
      for (Eigen::Index i = 0; i < r; ++i) {
        V(i, j) = acc;
        acc *= atoms[static_cast<size_t>(j)].value;
      }
    }
    for (Eigen::Index i = 0; i < r; ++i) b(i) = to_double(seq[static_cast<size_t>(i)]);
    VecD rho = solve_linear(V, b);
    double total = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) {
      if (rho(j) <= 0.0) throw internal_error("non-positive density in 1-d solve");
      total += rho(j);
      mu.atoms.push_back({atoms[static_cast<size_t>(j)], XValue(rho(j))});
    }
    if (std::fabs(total - b(0)) > tol.threshold(std::fabs(b(0))) + 1e-12)
      throw internal_error("densities do not sum to the mass");
  }
  return mu;
}

// Next moment continuing the orthogonal-polynomial recurrence of a positive
// definite Hankel: with monic p_0..p_k and a_m = L(x p_m^2)/L(p_m^2), the
// choice a_k := a_{k-1} fixes L(x^{2k+1}). Any value closes the extension,
// but this one keeps the balancing atom near the data scale.
template <class T>
T recurrence_continuation(const std::vector<T>& seq) {
  const Eigen::Index k = static_cast<Eigen::Index>((seq.size() - 1) / 2);
  if (k == 0) return T(0);
  auto riesz = [&](const std::vector<T>& p, const std::vector<T>& q,
                   size_t shift) {
    T s(0);
    for (size_t i = 0; i < p.size(); ++i)
      for (size_t j = 0; j < q.size(); ++j) {
        size_t m = i + j + shift;
        if (m < seq.size()) s += p[i] * q[j] * seq[m];
      }
    return s;
  };
  std::vector<T> prev{T(1)};
  std::vector<T> cur{-seq[1] / seq[0], T(1)};
  for (Eigen::Index m = 1; m < k; ++m) {
    T sc = riesz(cur, cur, 0);
    T a = riesz(cur, cur, 1) / sc;
    T b = sc / riesz(prev, prev, 0);
    std::vector<T> nxt(cur.size() + 1, T(0));
    for (size_t i = 0; i < cur.size(); ++i) {
      nxt[i + 1] += cur[i];
      nxt[i] -= a * cur[i];
    }
    for (size_t i = 0; i < prev.size(); ++i) nxt[i] -= b * prev[i];
    prev = std::move(cur);
    cur = std::move(nxt);
  }
  T a_last = riesz(prev, prev, 1) / riesz(prev, prev, 0);
  return a_last * riesz(cur, cur, 0) - riesz(cur, cur, 1);
}

}  // namespace detail

template <class T>
ThmpDecision<T> thmp_decide(const std::vector<T>& seq, const Tol& tol = {}) {
  if (seq.empty() || seq.size() % 2 == 0)
    throw internal_error("thmp_decide expects moments 0..2k");
  if (!(seq[0] > T(0)))
    throw std::invalid_argument("leading moment must be positive");
  const Eigen::Index k = static_cast<Eigen::Index>((seq.size() - 1) / 2);

  Mat<T> A = hankel_matrix(seq);
  auto cert = psd_check(A, tol);
  ThmpDecision<T> d;
  d.rank_sequence = rank_of_sequence(seq, tol);
  if (!cert.is_psd()) {
    d.rank_hankel = rank(A, tol);
    d.psd_witness = cert.neg_witness;
    return d;
  }
  d.rank_hankel = cert.rank;

  bool c_rank = d.rank_hankel == d.rank_sequence;

  Mat<T> Ak1 = leading_principal(A, k);
  auto cert_k1 = psd_check(Ak1, tol);
  Eigen::Index rank_k1 = cert_k1.is_psd() ? cert_k1.rank : rank(Ak1, tol);
  bool c_principal = cert_k1.is_pd() || rank_k1 == d.rank_hankel;

  Vec<T> tail(k);
  for (Eigen::Index i = 0; i < k; ++i) tail(i) = seq[static_cast<size_t>(k + 1 + i)];
  bool c_range = in_column_space(Ak1, tail, tol);

  d.conditions_agree = (c_rank == c_principal) && (c_principal == c_range);
  if constexpr (is_exact_v<T>) {
    if (!d.conditions_agree)
      throw internal_error("equivalent solvability conditions disagree");
  }
  d.solvable = c_rank;
  d.branch = d.rank_sequence <= k ? ThmpBranch::Direct : ThmpBranch::FlatExtension;
  return d;
}

template <class T>
AtomicMeasure1D thmp_solve(const std::vector<T>& seq, const Tol& tol = {}) {
  if (detail::is_zero_sequence(seq)) return {};
  auto d = thmp_decide(seq, tol);
  if (!d.solvable) throw internal_error("thmp_solve needs a solvable sequence");
  const Eigen::Index k = static_cast<Eigen::Index>((seq.size() - 1) / 2);
  if (d.branch == ThmpBranch::Direct)
    return detail::thmp_solve_direct(seq, d.rank_sequence, tol);

  // Nonsingular Hankel: extend by one degree, continuing the recurrence for
  // the free moment and choosing the closing corner to make the extension
  // flat.
  std::vector<T> ext = seq;
  ext.push_back(detail::recurrence_continuation(seq));
  Mat<T> A = hankel_matrix(seq);
  Vec<T> w(k + 1);
  for (Eigen::Index i = 0; i <= k; ++i) w(i) = ext[static_cast<size_t>(k + 1 + i)];
  Vec<T> sol = solve_linear(A, w);
  T corner(0);
  for (Eigen::Index i = 0; i <= k; ++i) corner += w(i) * sol(i);
  ext.push_back(corner);
  return detail::thmp_solve_direct(ext, k + 1, tol);
}

}  // namespace pml
