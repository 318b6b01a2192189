#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pml/hankel.hpp"
#include "pml/linalg.hpp"
#include "pml/lmi.hpp"
#include "pml/measure.hpp"
#include "pml/outcome.hpp"
#include "pml/scalar.hpp"
#include "pml/sequence.hpp"
#include "pml/tmp2pl.hpp"
#include "pml/transform.hpp"

namespace pml {

enum class ThreeLineCondition {
  None,
  LowerShiftInvertible,
  UpperShiftInvertible,
  KernelCompletion
};

inline const char* three_line_condition_tag(ThreeLineCondition c) {
  switch (c) {
    case ThreeLineCondition::LowerShiftInvertible:
      return "a";
    case ThreeLineCondition::UpperShiftInvertible:
      return "b";
    case ThreeLineCondition::KernelCompletion:
      return "c";
    default:
      return "none";
  }
}

template <class T>
struct ThreeLineDecision {
  bool feasible = false;
  ThreeLineCondition condition = ThreeLineCondition::None;
  Eigen::Index rank_m = 0;
  Eigen::Index rank_n = 0;
  std::optional<T> t_prime;
  std::optional<T> u_prime;
  Witness witness;
  AffineMap<T> map;
  bool via_pure = false;
};

// Shared data for the normalized lines y = 0 < a2 < a3 (after shifting the
// pivot line to zero).  rows[j][i] holds the shifted moment of x^i y^j,
// extended past total degree 2k by the line recurrence where the bordered
// completion needs it.  gamma[m] is the x^m moment the two off-pivot lines
// must carry jointly, read off from the j = 1, 2 rows.
template <class T>
struct ThreeLineWorkspace {
  int k = 0;
  AffineMap<T> map;
  T a2{};
  T a3{};
  BivariateMomentSequence<T> tilde;
  std::array<std::vector<T>, 5> rows;
  std::vector<T> gamma;
  Mat<T> m_full;
  Mat<T> m_res;
  Mat<T> n_mat;
  Mat<T> b00;
  Mat<T> a01;
  Mat<T> a11;
  AffineMatrixPencil<T> pencil;
};

template <class T>
ThreeLineWorkspace<T> three_line_workspace(const BivariateMomentSequence<T>& seq,
                                           const std::vector<T>& alphas) {
  if (seq.k() < 3)
    throw std::invalid_argument("three-line solver needs degree at least six");
  if (alphas.size() != 3)
    throw std::invalid_argument("three-line solver needs three line values");

  ThreeLineWorkspace<T> ws;
  ws.k = seq.k();
  const int k = ws.k;
  auto norm = normalize_lines(alphas);
  ws.map = norm.map;
  ws.a2 = norm.alphas[1];
  ws.a3 = norm.alphas[2];
  ws.tilde = transform_sequence(seq, norm.map);
  const T s = ws.a2 + ws.a3;
  const T p = ws.a2 * ws.a3;

  for (int j = 0; j <= 4; ++j) {
    int hi = (j <= 1) ? 2 * k - j : 2 * k - 2;
    ws.rows[static_cast<size_t>(j)].assign(static_cast<size_t>(hi + 1), T(0));
    for (int i = 0; i <= hi && i + j <= 2 * k; ++i)
      ws.rows[static_cast<size_t>(j)][static_cast<size_t>(i)] = ws.tilde.beta(i, j);
  }
  ws.rows[3][static_cast<size_t>(2 * k - 2)] =
      s * ws.rows[2][static_cast<size_t>(2 * k - 2)] -
      p * ws.rows[1][static_cast<size_t>(2 * k - 2)];
  ws.rows[4][static_cast<size_t>(2 * k - 3)] =
      s * ws.rows[3][static_cast<size_t>(2 * k - 3)] -
      p * ws.rows[2][static_cast<size_t>(2 * k - 3)];
  ws.rows[4][static_cast<size_t>(2 * k - 2)] =
      s * ws.rows[3][static_cast<size_t>(2 * k - 2)] -
      p * ws.rows[2][static_cast<size_t>(2 * k - 2)];

  ws.gamma.resize(static_cast<size_t>(2 * k - 1));
  for (int m = 0; m <= 2 * k - 2; ++m)
    ws.gamma[static_cast<size_t>(m)] =
        (s * ws.rows[1][static_cast<size_t>(m)] - ws.rows[2][static_cast<size_t>(m)]) / p;

  MonomialIndex idx(k);
  ws.m_full = build_moment_matrix(ws.tilde);
  ws.m_res = line_restricted_matrix(ws.m_full, idx, MonomialIndex::line_prefix_size(k, 3));

  // Labels for the bordered completion: the y-degree <= 2 prefix plus one
  // extra column x^{k-1} y^2.  The single unknown entry sits where x^k meets
  // that extra column.
  std::vector<Monomial> ext;
  for (int i = 0; i <= k; ++i) ext.push_back({i, 0});
  for (int i = 0; i <= k - 1; ++i) ext.push_back({i, 1});
  for (int i = 0; i <= k - 2; ++i) ext.push_back({i, 2});
  ext.push_back({k - 1, 2});
  const Eigen::Index m = static_cast<Eigen::Index>(ext.size());

  Mat<T> s0(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) {
      const Monomial& la = ext[static_cast<size_t>(r)];
      const Monomial& lb = ext[static_cast<size_t>(c)];
      int i = la.i + lb.i;
      int j = la.j + lb.j;
      s0(r, c) = (j == 2 && i == 2 * k - 1)
                     ? T(0)
                     : ws.rows[static_cast<size_t>(j)][static_cast<size_t>(i)];
    }
  Mat<T> slot = Mat<T>::Zero(m, m);
  slot(k, m - 1) = T(1);
  slot(m - 1, k) = T(1);
  ws.pencil.s0 = std::move(s0);
  ws.pencil.terms = {std::move(slot)};

  std::vector<Monomial> nlab;
  for (Eigen::Index r = 0; r < m; ++r)
    if (r != static_cast<Eigen::Index>(k)) nlab.push_back(ext[static_cast<size_t>(r)]);
  Mat<T> n(m - 1, m - 1);
  for (Eigen::Index r = 0; r + 1 < m; ++r)
    for (Eigen::Index c = 0; c + 1 < m; ++c) {
      const Monomial& la = nlab[static_cast<size_t>(r)];
      const Monomial& lb = nlab[static_cast<size_t>(c)];
      n(r, c) = ws.rows[static_cast<size_t>(la.j + lb.j)][static_cast<size_t>(la.i + lb.i)];
    }
  ws.n_mat = std::move(n);

  ws.b00 = hankel_block(ws.gamma, k, k);
  ws.a01 = hankel_block(ws.rows[1], k, k);
  ws.a11 = hankel_block(ws.rows[2], k, k);
  return ws;
}

struct CompletionResult {
  XValue t0;
  Interval1D interval;
  Eigen::Index rank = 0;
  bool at_right_endpoint = false;
};

// Fills the single unknown entry of the bordered matrix.  The left endpoint
// of the feasibility interval gives a minimal-rank completion; the right one
// is the backstop.  In exact mode an irrational endpoint is handed back
// unevaluated so the caller can drop to floating point.
template <class T>
CompletionResult complete_one_parameter(const ThreeLineWorkspace<T>& ws,
                                        const Tol& tol = {}) {
  CompletionResult out;
  out.interval = feasible_interval_1d(ws.pencil, tol);
  if (!out.interval.nonempty)
    throw internal_error("one-parameter completion has an empty feasible interval");
  if constexpr (is_exact_v<T>) {
    if (!out.interval.exact_endpoints) {
      out.t0 = out.interval.lo;
      return out;
    }
  }
  const Eigen::Index target = std::max(rank(ws.m_res, tol), rank(ws.n_mat, tol));
  auto rank_at = [&](const XValue& xv) {
    Vec<T> tv(1);
    if constexpr (is_exact_v<T>)
      tv(0) = T(*xv.exact);
    else
      tv(0) = T(xv.value);
    Mat<T> filled = ws.pencil.at(tv);
    return rank(filled, tol);
  };
  out.t0 = out.interval.lo;
  out.rank = rank_at(out.t0);
  if (out.rank != target) {
    Eigen::Index alt = rank_at(out.interval.hi);
    if (alt != target)
      throw internal_error("no interval endpoint yields a minimal-rank completion");
    out.t0 = out.interval.hi;
    out.rank = alt;
    out.at_right_endpoint = true;
  }
  return out;
}

namespace detail {

// Kernel vector of the singular shift matrix, scaled so the trailing
// coordinate is one.  The completion value it induces does not depend on
// which admissible basis vector is taken.
template <class T>
std::optional<Vec<T>> completion_kernel(const Mat<T>& upper, const Tol& tol) {
  const Eigen::Index kk = upper.rows();
  for (const Vec<T>& w : kernel_basis(upper, tol)) {
    const T& last = w(kk - 1);
    bool usable;
    if constexpr (is_exact_v<T>)
      usable = last != T(0);
    else
      usable = std::abs(to_double(last)) > tol.threshold(norm_inf(w));
    if (usable) {
      T c = last;
      Vec<T> v = w / c;
      return v;
    }
  }
  return std::nullopt;
}

template <class T>
ThreeLineDecision<T> decide_three_lines(const ThreeLineWorkspace<T>& ws,
                                        const Tol& tol) {
  ThreeLineDecision<T> dec;
  dec.map = ws.map;
  const int k = ws.k;

  auto rel = check_line_relations(ws.tilde, {T(0), ws.a2, ws.a3}, tol);
  if (!rel.ok) {
    dec.rank_m = rank(ws.m_res, tol);
    dec.rank_n = rank(ws.n_mat, tol);
    dec.witness = RelationWitness{rel.i, rel.j, rel.max_residual,
                                  "three-line moment recurrence fails"};
    return dec;
  }

  auto mcert = psd_check(ws.m_res, tol);
  dec.rank_m = mcert.is_psd() ? mcert.rank : rank(ws.m_res, tol);
  auto ncert = psd_check(ws.n_mat, tol);
  dec.rank_n = ncert.is_psd() ? ncert.rank : rank(ws.n_mat, tol);
  if (!mcert.is_psd()) {
    PsdWitness w;
    w.matrix = "M";
    w.min_eigenvalue = min_eigenvalue(ws.m_res);
    if (mcert.neg_witness) w.vector = unit_double_vector(*mcert.neg_witness);
    dec.witness = w;
    return dec;
  }
  if (!ncert.is_psd()) {
    PsdWitness w;
    w.matrix = "N";
    w.min_eigenvalue = min_eigenvalue(ws.n_mat);
    if (ncert.neg_witness) w.vector = unit_double_vector(*ncert.neg_witness);
    dec.witness = w;
    return dec;
  }

  Mat<T> lower = ws.a01 - ws.b00 * ws.a2;
  if (rank(lower, tol) == k) {
    dec.condition = ThreeLineCondition::LowerShiftInvertible;
    dec.feasible = true;
    return dec;
  }
  Mat<T> upper = ws.b00 * ws.a3 - ws.a01;
  if (rank(upper, tol) == k) {
    dec.condition = ThreeLineCondition::UpperShiftInvertible;
    dec.feasible = true;
    return dec;
  }

  auto vopt = completion_kernel(upper, tol);
  if (!vopt) {
    dec.witness = TextWitness{"no admissible kernel vector"};
    return dec;
  }
  const Vec<T>& w = *vopt;
  T hv(0);
  T av(0);
  for (int i = 0; i + 1 < k; ++i) {
    hv += ws.gamma[static_cast<size_t>(k + i)] * w(i);
    av += ws.rows[1][static_cast<size_t>(k + i)] * w(i);
  }
  T tp = (av - ws.a3 * hv + ws.rows[1][static_cast<size_t>(2 * k - 1)]) / ws.a3;

  Mat<T> gram(2 * k, 2 * k);
  gram.topLeftCorner(k, k) = ws.b00;
  gram.topRightCorner(k, k) = ws.a01;
  gram.bottomLeftCorner(k, k) = ws.a01.transpose();
  gram.bottomRightCorner(k, k) = ws.a11;
  Vec<T> z(2 * k);
  for (int i = 0; i + 1 < k; ++i) z(i) = ws.gamma[static_cast<size_t>(k + i)];
  z(k - 1) = tp;
  for (int i = 0; i < k; ++i) z(k + i) = ws.rows[1][static_cast<size_t>(k + i)];
  T up = quadratic_form(pinv(gram, tol), z);

  // The pivot line's own Hankel matrix with the induced closing entries must
  // stay psd and must not gain rank in its last step.
  std::vector<T> aseq(static_cast<size_t>(2 * k + 1));
  for (int m = 0; m <= 2 * k - 2; ++m)
    aseq[static_cast<size_t>(m)] =
        ws.rows[0][static_cast<size_t>(m)] - ws.gamma[static_cast<size_t>(m)];
  aseq[static_cast<size_t>(2 * k - 1)] = ws.rows[0][static_cast<size_t>(2 * k - 1)] - tp;
  aseq[static_cast<size_t>(2 * k)] = ws.rows[0][static_cast<size_t>(2 * k)] - up;
  Mat<T> agamma = hankel_matrix(aseq);
  auto acert = psd_check(agamma, tol);
  if (!acert.is_psd()) {
    PsdWitness w2;
    w2.matrix = "A_gamma";
    w2.min_eigenvalue = min_eigenvalue(agamma);
    if (acert.neg_witness) w2.vector = unit_double_vector(*acert.neg_witness);
    dec.witness = w2;
    return dec;
  }
  Mat<T> head = leading_principal(agamma, k);
  auto hcert = psd_check(head, tol);
  Eigen::Index headrank = hcert.is_psd() ? hcert.rank : rank(head, tol);
  if (!hcert.is_pd() && headrank != acert.rank) {
    dec.witness = RankWitness{"A_gamma", acert.rank, headrank};
    return dec;
  }
  dec.condition = ThreeLineCondition::KernelCompletion;
  dec.t_prime = tp;
  dec.u_prime = up;
  dec.feasible = true;
  return dec;
}

}  // namespace detail

template <class T>
ThreeLineDecision<T> decide_3pl(const BivariateMomentSequence<T>& seq,
                                const std::vector<T>& alphas, const Tol& tol = {}) {
  auto ws = three_line_workspace(seq, alphas);
  return detail::decide_three_lines(ws, tol);
}

// Faster criterion for pure sequences: when the column relation of the line
// polynomial holds, the matrix is recursively generated and its y-degree <= 2
// restriction is positive definite, feasibility reduces to N being psd.
// Anything short of that falls back to the general decision.
template <class T>
ThreeLineDecision<T> decide_3pl_pure(const BivariateMomentSequence<T>& seq,
                                     const std::vector<T>& alphas,
                                     const Tol& tol = {}) {
  auto ws = three_line_workspace(seq, alphas);
  MonomialIndex idx(ws.k);
  Poly2<T> cubic;
  cubic[{0, 3}] = T(1);
  cubic[{0, 2}] = -(ws.a2 + ws.a3);
  cubic[{0, 1}] = ws.a2 * ws.a3;
  Vec<T> image = ws.m_full * poly_to_vec(cubic, idx);
  bool pure;
  if constexpr (is_exact_v<T>)
    pure = norm_inf(image) == 0.0;
  else
    pure = norm_inf(image) <= tol.threshold(norm_inf(ws.m_full));
  if (pure) pure = check_recursively_generated(ws.tilde, tol).ok;
  if (pure) pure = psd_check(ws.m_res, tol).is_pd();
  if (!pure) return detail::decide_three_lines(ws, tol);

  ThreeLineDecision<T> dec;
  dec.map = ws.map;
  dec.via_pure = true;
  dec.rank_m = static_cast<Eigen::Index>(ws.m_res.rows());
  auto ncert = psd_check(ws.n_mat, tol);
  dec.rank_n = ncert.is_psd() ? ncert.rank : rank(ws.n_mat, tol);
  if (ncert.is_psd()) {
    dec.feasible = true;
  } else {
    PsdWitness w;
    w.matrix = "N";
    w.min_eigenvalue = min_eigenvalue(ws.n_mat);
    if (ncert.neg_witness) w.vector = detail::unit_double_vector(*ncert.neg_witness);
    dec.witness = w;
  }
  return dec;
}

template <class T>
SolveOutcome solve_3pl(const BivariateMomentSequence<T>& seq,
                       const std::vector<T>& alphas, const Tol& tol = {}) {
  auto ws = three_line_workspace(seq, alphas);
  auto dec = detail::decide_three_lines(ws, tol);

  SolveOutcome out;
  out.trace.ranks["M"] = dec.rank_m;
  out.trace.ranks["N"] = dec.rank_n;
  if (!dec.feasible) {
    out.verdict = Verdict::Infeasible;
    out.witness = dec.witness;
    out.trace.branch = "three-lines";
    return out;
  }

  const int k = ws.k;
  const T s = ws.a2 + ws.a3;
  const T p = ws.a2 * ws.a3;
  double scale = 1.0;
  for (const T& v : ws.rows[0]) scale = std::max(scale, std::abs(to_double(v)));

  T t_like{};
  T u_like{};
  if (dec.condition == ThreeLineCondition::KernelCompletion) {
    t_like = *dec.t_prime;
    u_like = *dec.u_prime;
    out.trace.branch = "three-lines:case2";
    out.trace.t_prime = make_xvalue(t_like);
    out.trace.u_prime = make_xvalue(u_like);
  } else {
    CompletionResult comp = complete_one_parameter(ws, tol);
    if constexpr (is_exact_v<T>) {
      if (!comp.t0.exact) {
        std::vector<double> dal;
        dal.reserve(alphas.size());
        for (const T& a : alphas) dal.push_back(to_double(a));
        SolveOutcome retry = solve_3pl(seq.template cast<double>(), dal, tol);
        std::string note = "completion parameter is irrational; continuing in floating point";
        retry.message = retry.message.empty() ? note : note + "; " + retry.message;
        return retry;
      }
    }
    T t0;
    if constexpr (is_exact_v<T>)
      t0 = T(*comp.t0.exact);
    else
      t0 = T(comp.t0.value);
    Vec<T> tv(1);
    tv(0) = t0;
    Mat<T> filled = ws.pencil.at(tv);
    Mat<T> chat = filled.bottomRightCorner(2 * k, 2 * k);
    Mat<T> btilde = filled.topRightCorner(k + 1, 2 * k);
    Mat<T> chat_pinv = pinv(chat, tol);
    Mat<T> cross = btilde * chat_pinv;
    Mat<T> wmat = cross * btilde.transpose();

    T alpha = (s * ws.rows[1][static_cast<size_t>(2 * k - 1)] - t0) / p;

    // The off-pivot mass recovered through the completed matrix has to be a
    // Hankel block matching gamma and the induced degree 2k-1 entry; its
    // bottom corner is the only new number.
    double wspan = std::max(scale, norm_inf(wmat));
    for (Eigen::Index r = 0; r <= k; ++r)
      for (Eigen::Index c = 0; c <= k; ++c) {
        int mdeg = static_cast<int>(r + c);
        if (mdeg > 2 * k - 1) continue;
        T want = (mdeg <= 2 * k - 2) ? ws.gamma[static_cast<size_t>(mdeg)] : alpha;
        if constexpr (is_exact_v<T>) {
          if (wmat(r, c) != want)
            throw internal_error("completed matrix lost the Hankel structure");
        } else {
          if (std::abs(to_double(wmat(r, c) - want)) > tol.threshold(wspan))
            throw internal_error("completed matrix lost the Hankel structure");
        }
      }
    T u0 = wmat(k, k);

    Mat<T> a00_head = hankel_block(ws.rows[0], k, k);
    Mat<T> comp_block = a00_head - ws.b00;
    Vec<T> gap(k);
    for (int i = 0; i + 1 < k; ++i)
      gap(i) = ws.rows[0][static_cast<size_t>(k + i)] - ws.gamma[static_cast<size_t>(k + i)];
    gap(k - 1) = ws.rows[0][static_cast<size_t>(2 * k - 1)] - alpha;
    T corr = quadratic_form(pinv(comp_block, tol), gap);
    T delta = (ws.rows[0][static_cast<size_t>(2 * k)] - u0) - corr;
    if constexpr (is_exact_v<T>) {
      if (delta < T(0)) throw internal_error("negative closing mass on three lines");
    } else {
      double dd = to_double(delta);
      double span = std::max({scale, std::abs(to_double(u0)), std::abs(to_double(corr))});
      if (dd < 0.0) {
        if (-dd > tol.threshold(span))
          throw internal_error("negative closing mass on three lines");
        delta = T(0);
      }
    }

    t_like = alpha;
    u_like = u0 + delta;
    out.trace.branch =
        std::string("three-lines:case1(") + three_line_condition_tag(dec.condition) + ")";
    out.trace.t0 = comp.t0;
    out.trace.u0 = make_xvalue(u0);
    out.trace.delta = make_xvalue(delta);
  }

  std::vector<T> line0(static_cast<size_t>(2 * k + 1));
  for (int m = 0; m <= 2 * k - 2; ++m)
    line0[static_cast<size_t>(m)] =
        ws.rows[0][static_cast<size_t>(m)] - ws.gamma[static_cast<size_t>(m)];
  line0[static_cast<size_t>(2 * k - 1)] =
      ws.rows[0][static_cast<size_t>(2 * k - 1)] - t_like;
  line0[static_cast<size_t>(2 * k)] = ws.rows[0][static_cast<size_t>(2 * k)] - u_like;
  AtomicMeasure1D mu0 = detail::solve_line_sequence(line0, scale, tol);

  BivariateMomentSequence<T> sub(k);
  for (int d = 0; d <= 2 * k; ++d)
    for (int j = 0; j <= d; ++j) {
      int i = d - j;
      if (j == 0) {
        if (i <= 2 * k - 2)
          sub.set(i, 0, ws.gamma[static_cast<size_t>(i)]);
        else if (i == 2 * k - 1)
          sub.set(i, 0, t_like);
        else
          sub.set(i, 0, u_like);
      } else {
        sub.set(i, j, ws.tilde.beta(i, j));
      }
    }
  SolveOutcome inner = solve_2pl(sub, {ws.a2, ws.a3}, tol);
  if (inner.verdict != Verdict::Feasible || !inner.measure)
    throw internal_error("two-line subproblem of a feasible three-line split failed");

  AtomicMeasure2D normalized = merge(on_line(mu0, make_xvalue(T(0))), *inner.measure);
  AtomicMeasure2D measure = pullback_measure(normalized, ws.map);
  validate_measure(measure);

  const Eigen::Index expected = dec.rank_n <= dec.rank_m ? dec.rank_m : dec.rank_m + 1;
  if (static_cast<Eigen::Index>(measure.atoms.size()) != expected) {
    if constexpr (is_exact_v<T>)
      throw internal_error("atom count does not match the moment matrix rank");
    else
      out.message = "atom count differs from the moment matrix rank";
  }

  out.verdict = Verdict::Feasible;
  out.measure = std::move(measure);
  return out;
}

}  // namespace pml
