#pragma once

#include <string>
#include <vector>

#include "pml/hamburger.hpp"
#include "pml/outcome.hpp"
#include "pml/sequence.hpp"
#include "pml/transform.hpp"

namespace pml {

// Feasibility on two lines holds when the restricted moment matrix M is psd,
// the two-line moment recurrence holds, and one of three regularity conditions
// is met.  With coordinates normalized so the lines are y = 0 and y = 1, the
// conditions are stated on the Hankel blocks D (first-order moments) and
// A1 - D inside the compressed matrix N.
enum class TwoLineCondition { None, DInvertible, ComplementInvertible, RankEquality };

inline const char* two_line_condition_tag(TwoLineCondition c) {
  switch (c) {
    case TwoLineCondition::DInvertible: return "a";
    case TwoLineCondition::ComplementInvertible: return "b";
    case TwoLineCondition::RankEquality: return "c";
    default: return "none";
  }
}

template <class T>
struct TwoLineDecision {
  bool feasible = false;
  TwoLineCondition condition = TwoLineCondition::None;
  Eigen::Index rank_m = 0;
  Eigen::Index rank_n = 0;
  Witness witness;
  AffineMap<T> map;
};

namespace detail {

template <class T>
struct TwoLineData {
  AffineMap<T> map;
  BivariateMomentSequence<T> tilde;
  std::vector<T> row0;
  std::vector<T> row1;
  Mat<T> m_res;
  Mat<T> n_mat;
  Mat<T> a1;
  Mat<T> dm;
  Vec<T> a_vec;
  Vec<T> d_vec;
};

template <class T>
TwoLineData<T> two_line_data(const BivariateMomentSequence<T>& seq,
                             const std::vector<T>& alphas) {
  if (seq.k() < 1) throw std::invalid_argument("two-line solver needs degree >= 2");
  if (alphas.size() != 2) throw std::invalid_argument("expected exactly two lines");
  auto norm = normalize_lines(alphas);

  TwoLineData<T> data;
  data.map = norm.map;
  data.tilde = transform_sequence(seq, norm.map);
  const int k = seq.k();

  data.row0.reserve(static_cast<size_t>(2 * k + 1));
  for (int i = 0; i <= 2 * k; ++i) data.row0.push_back(data.tilde.beta(i, 0));
  data.row1.reserve(static_cast<size_t>(2 * k));
  for (int i = 0; i < 2 * k; ++i) data.row1.push_back(data.tilde.beta(i, 1));

  MonomialIndex idx(k);
  Mat<T> M = build_moment_matrix(data.tilde);
  data.m_res = line_restricted_matrix(M, idx, MonomialIndex::line_prefix_size(k, 2));

  data.a1 = hankel_block(data.row0, k, k);
  data.dm = hankel_block(data.row1, k, k);
  Mat<T> c2(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      c2(i, j) = data.tilde.beta(static_cast<int>(i + j), 2);
  data.n_mat = Mat<T>(2 * k, 2 * k);
  data.n_mat.topLeftCorner(k, k) = data.a1;
  data.n_mat.topRightCorner(k, k) = data.dm;
  data.n_mat.bottomLeftCorner(k, k) = data.dm;
  data.n_mat.bottomRightCorner(k, k) = c2;

  data.a_vec = Vec<T>(k);
  data.d_vec = Vec<T>(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    data.a_vec(i) = data.row0[static_cast<size_t>(k + i)];
    data.d_vec(i) = data.row1[static_cast<size_t>(k + i)];
  }
  return data;
}

template <class T>
std::vector<double> unit_double_vector(const Vec<T>& v) {
  VecD vd = to_double_vector(v);
  double nrm = vd.norm();
  if (nrm > 0) vd /= nrm;
  return {vd.data(), vd.data() + vd.size()};
}

template <class T>
TwoLineDecision<T> decide_two_lines(const TwoLineData<T>& data, const Tol& tol) {
  TwoLineDecision<T> dec;
  dec.map = data.map;
  const int k = data.tilde.k();

  auto rel = check_line_relations(data.tilde, {T(0), T(1)}, tol);
  if (!rel.ok) {
    dec.rank_m = rank(data.m_res, tol);
    dec.rank_n = rank(data.n_mat, tol);
    dec.witness = RelationWitness{rel.i, rel.j, rel.max_residual,
                                  "two-line moment recurrence fails"};
    return dec;
  }

  auto cert = psd_check(data.m_res, tol);
  dec.rank_m = cert.is_psd() ? cert.rank : rank(data.m_res, tol);
  dec.rank_n = rank(data.n_mat, tol);
  if (!cert.is_psd()) {
    PsdWitness w;
    w.matrix = "M";
    w.min_eigenvalue = min_eigenvalue(data.m_res);
    if (cert.neg_witness) w.vector = unit_double_vector(*cert.neg_witness);
    dec.witness = w;
    return dec;
  }

  if (rank(data.dm, tol) == k)
    dec.condition = TwoLineCondition::DInvertible;
  else if (rank(Mat<T>(data.a1 - data.dm), tol) == k)
    dec.condition = TwoLineCondition::ComplementInvertible;
  else if (dec.rank_m == dec.rank_n)
    dec.condition = TwoLineCondition::RankEquality;

  if (dec.condition == TwoLineCondition::None) {
    dec.witness = RankWitness{"rank M vs rank N with D and A1 - D both singular",
                              dec.rank_m, dec.rank_n};
    return dec;
  }
  dec.feasible = true;
  return dec;
}

template <class T>
bool effectively_zero(const std::vector<T>& seq, double scale, const Tol& tol) {
  if constexpr (is_exact_v<T>) {
    return is_zero_sequence(seq);
  } else {
    double m = 0.0;
    for (const T& v : seq) m = std::max(m, std::abs(to_double(v)));
    return m <= tol.threshold(scale);
  }
}

template <class T>
AtomicMeasure1D solve_line_sequence(const std::vector<T>& seq, double scale,
                                    const Tol& tol) {
  if (effectively_zero(seq, scale, tol)) return {};
  return thmp_solve(seq, tol);
}

}  // namespace detail

template <class T>
TwoLineDecision<T> decide_2pl(const BivariateMomentSequence<T>& seq,
                              const std::vector<T>& alphas, const Tol& tol = {}) {
  auto data = detail::two_line_data(seq, alphas);
  return detail::decide_two_lines(data, tol);
}

template <class T>
SolveOutcome solve_2pl(const BivariateMomentSequence<T>& seq,
                       const std::vector<T>& alphas, const Tol& tol = {}) {
  auto data = detail::two_line_data(seq, alphas);
  auto dec = detail::decide_two_lines(data, tol);

  SolveOutcome out;
  out.trace.ranks["M"] = dec.rank_m;
  out.trace.ranks["N"] = dec.rank_n;
  if (!dec.feasible) {
    out.verdict = Verdict::Infeasible;
    out.witness = dec.witness;
    out.trace.branch = "two-lines";
    return out;
  }
  out.trace.branch = std::string("two-lines(") + two_line_condition_tag(dec.condition) + ")";

  const int k = data.tilde.k();
  double scale = 1.0;
  for (const T& v : data.row0) scale = std::max(scale, std::abs(to_double(v)));

  Vec<T> ddag_d = pinv(data.dm, tol) * data.d_vec;
  T corner1(0);
  for (Eigen::Index i = 0; i < k; ++i) corner1 += data.d_vec(i) * ddag_d(i);

  std::vector<T> line1 = data.row1;
  line1.push_back(corner1);
  std::vector<T> line0(data.row0.size());

  if (dec.condition == TwoLineCondition::DInvertible) {
    Vec<T> gap = data.a_vec - data.d_vec;
    Mat<T> comp = data.a1 - data.dm;
    Vec<T> comp_gap = pinv(comp, tol) * gap;
    T corr(0);
    for (Eigen::Index i = 0; i < k; ++i) corr += gap(i) * comp_gap(i);
    T delta = data.row0[static_cast<size_t>(2 * k)] - corner1 - corr;
    if constexpr (is_exact_v<T>) {
      if (delta < T(0)) throw internal_error("negative closing mass on two lines");
    } else {
      double dd = to_double(delta);
      double span = std::max({scale, std::abs(to_double(corner1)),
                              std::abs(to_double(corr))});
      if (dd < 0.0) {
        if (-dd > tol.threshold(span))
          throw internal_error("negative closing mass on two lines");
        delta = T(0);
      }
    }
    line1.back() += delta;
    out.trace.delta = make_xvalue(delta);
  }

  for (size_t i = 0; i < line0.size(); ++i) line0[i] = data.row0[i] - line1[i];

  AtomicMeasure1D mu1 = detail::solve_line_sequence(line1, scale, tol);
  AtomicMeasure1D mu0 = detail::solve_line_sequence(line0, scale, tol);

  AtomicMeasure2D normalized =
      merge(on_line(mu0, make_xvalue(T(0))), on_line(mu1, make_xvalue(T(1))));
  AtomicMeasure2D measure = pullback_measure(normalized, data.map);
  validate_measure(measure);

  const Eigen::Index count = static_cast<Eigen::Index>(measure.atoms.size());
  if (dec.rank_n <= dec.rank_m && count != dec.rank_m) {
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
