#pragma once

#include <map>
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

// Number of labels in the bordered extension for n lines: the y-degree < n
// prefix plus one shortened column block per y-degree 2..n-1.
inline Eigen::Index line_extension_size(int k, int n) {
  return MonomialIndex::line_prefix_size(k, n) +
         static_cast<Eigen::Index>((n - 1) * (n - 2) / 2);
}

// Bordered moment matrix for a union of n horizontal lines, normalized so one
// line is y = 0.  Entries of y-degree >= n reduce through the line recurrence;
// reduced entries of total degree > 2k are free parameters, and the matrix is
// affine in them.  gamma[i] is the x^i moment jointly carried by the lines off
// y = 0, read from the rows of y-degree 1..n-1.
template <class T>
struct NLineWorkspace {
  int k = 0;
  int n = 0;
  AffineMap<T> map;
  std::vector<T> alphas;
  std::vector<T> c;
  BivariateMomentSequence<T> tilde;
  std::vector<Monomial> labels;
  std::vector<Monomial> param_labels;
  AffineMatrixPencil<T> pencil;
  std::vector<T> gamma;
  Mat<T> m_full;
  Mat<T> m_res;

  // Hankel closure of gamma by the free tail values u (one per off-zero line).
  Mat<T> completion_hankel(const std::vector<T>& u) const {
    std::vector<T> h(gamma);
    h.insert(h.end(), u.begin(), u.end());
    if (h.size() != static_cast<size_t>(2 * k + 1))
      throw internal_error("completion tail has the wrong length");
    return hankel_matrix(h);
  }

  // Extension at parameter point t with the corner block replaced by Z.
  Mat<T> corner_replaced(const Vec<T>& t, const Mat<T>& Z) const {
    Mat<T> S = pencil.at(t);
    if (Z.rows() != k + 1 || Z.cols() != k + 1)
      throw internal_error("corner block has the wrong size");
    S.topLeftCorner(k + 1, k + 1) = Z;
    return S;
  }
};

namespace detail {

template <class T>
struct AffineEntry {
  T constant{0};
  std::map<size_t, T> coef;
};

}  // namespace detail

template <class T>
NLineWorkspace<T> n_line_workspace(const BivariateMomentSequence<T>& seq,
                                   const std::vector<T>& alphas) {
  const int n = static_cast<int>(alphas.size());
  if (n < 2) throw std::invalid_argument("n-line solver needs two or more lines");
  if (seq.k() < n)
    throw std::invalid_argument("n-line solver needs degree at least twice the line count");

  NLineWorkspace<T> ws;
  ws.k = seq.k();
  ws.n = n;
  const int k = ws.k;
  auto norm = normalize_lines(alphas);
  ws.map = norm.map;
  ws.alphas = norm.alphas;
  ws.tilde = transform_sequence(seq, norm.map);
  ws.c = elementary_symmetric(std::vector<T>(ws.alphas.begin() + 1, ws.alphas.end()));

  for (int j = 0; j <= n - 1; ++j)
    for (int i = 0; i <= k - j; ++i) ws.labels.push_back({i, j});
  for (int j = 2; j <= n - 1; ++j)
    for (int i = k + 1 - j; i <= k - 1; ++i) ws.labels.push_back({i, j});
  for (int j = 2; j <= n - 1; ++j)
    for (int i = 2 * k + 1 - j; i <= 2 * k - 1; ++i) ws.param_labels.push_back({i, j});

  std::map<std::pair<int, int>, size_t> pidx;
  for (size_t m = 0; m < ws.param_labels.size(); ++m)
    pidx[{ws.param_labels[m].i, ws.param_labels[m].j}] = m;

  std::map<std::pair<int, int>, detail::AffineEntry<T>> memo;
  auto entry = [&](auto&& self, int a, int b) -> const detail::AffineEntry<T>& {
    auto found = memo.find({a, b});
    if (found != memo.end()) return found->second;
    detail::AffineEntry<T> out;
    if (b <= n - 1) {
      if (a + b <= 2 * k) {
        out.constant = ws.tilde.beta(a, b);
      } else {
        auto slot = pidx.find({a, b});
        if (slot == pidx.end())
          throw internal_error("free entry outside the parameter list");
        out.coef[slot->second] = T(1);
      }
    } else {
      T sign(1);
      for (int l = 1; l <= n - 1; ++l) {
        const detail::AffineEntry<T>& sub = self(self, a, b - l);
        out.constant += sign * ws.c[static_cast<size_t>(l)] * sub.constant;
        for (const auto& [m, v] : sub.coef)
          out.coef[m] += sign * ws.c[static_cast<size_t>(l)] * v;
        sign = -sign;
      }
    }
    return memo.emplace(std::pair<int, int>{a, b}, std::move(out)).first->second;
  };

  const Eigen::Index dim = static_cast<Eigen::Index>(ws.labels.size());
  ws.pencil.s0 = Mat<T>::Zero(dim, dim);
  ws.pencil.terms.assign(ws.param_labels.size(), Mat<T>::Zero(dim, dim));
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index col = 0; col < dim; ++col) {
      const Monomial& la = ws.labels[static_cast<size_t>(r)];
      const Monomial& lb = ws.labels[static_cast<size_t>(col)];
      const auto& e = entry(entry, la.i + lb.i, la.j + lb.j);
      ws.pencil.s0(r, col) = e.constant;
      for (const auto& [m, v] : e.coef) ws.pencil.terms[m](r, col) = v;
    }

  ws.gamma.reserve(static_cast<size_t>(2 * k - n + 2));
  const T lead = (n % 2 == 0 ? T(1) : T(-1)) * ws.c[static_cast<size_t>(n - 1)];
  for (int i = 0; i <= 2 * k - n + 1; ++i) {
    T s(0);
    T sign(1);
    for (int j = 0; j <= n - 2; ++j) {
      s += sign * ws.c[static_cast<size_t>(j)] * ws.tilde.beta(i, n - 1 - j);
      sign = -sign;
    }
    ws.gamma.push_back(s / lead);
  }

  MonomialIndex idx(k);
  ws.m_full = build_moment_matrix(ws.tilde);
  ws.m_res = line_restricted_matrix(ws.m_full, idx, MonomialIndex::line_prefix_size(k, n));
  return ws;
}

template <class T>
AffineMatrixPencil<T> build_parametric_extension(const BivariateMomentSequence<T>& seq,
                                                 const std::vector<T>& alphas,
                                                 const Tol& tol = {}) {
  auto ws = n_line_workspace(seq, alphas);
  auto rel = check_line_relations(ws.tilde, ws.alphas, tol);
  if (!rel.ok)
    throw std::invalid_argument("moment sequence violates the line recurrence");
  return ws.pencil;
}

// x^i moments of the mass off the zero line, for i = 0 .. 2k-n+1.  The frame
// must already contain the zero line; the remaining lines enter only through
// their elementary symmetric sums.
template <class T>
std::vector<T> gamma_sequence(const BivariateMomentSequence<T>& seq,
                              const std::vector<T>& alphas) {
  const int n = static_cast<int>(alphas.size());
  if (n < 2) throw std::invalid_argument("gamma_sequence needs two or more lines");
  std::vector<T> others;
  bool seen_zero = false;
  for (const T& a : alphas) {
    if (a == T(0)) {
      if (seen_zero) throw std::invalid_argument("some shifted alpha is zero");
      seen_zero = true;
    } else {
      others.push_back(a);
    }
  }
  if (!seen_zero)
    throw std::invalid_argument("gamma_sequence expects a line at zero");
  std::vector<T> c = elementary_symmetric(others);
  const int k = seq.k();
  const T lead = (n % 2 == 0 ? T(1) : T(-1)) * c[static_cast<size_t>(n - 1)];
  std::vector<T> out;
  out.reserve(static_cast<size_t>(2 * k - n + 2));
  for (int i = 0; i <= 2 * k - n + 1; ++i) {
    T s(0);
    T sign(1);
    for (int j = 0; j <= n - 2; ++j) {
      s += sign * c[static_cast<size_t>(j)] * seq.beta(i, n - 1 - j);
      sign = -sign;
    }
    out.push_back(s / lead);
  }
  return out;
}

namespace detail {

template <class T>
Vec<T> inherited_parameters(const NLineWorkspace<T>& ws, const std::vector<T>& h,
                            const Vec<T>& tvec) {
  const int k = ws.k;
  const int n = ws.n;
  const T a2 = ws.alphas[1];
  std::vector<Monomial> next;
  for (int j = 2; j <= n - 2; ++j)
    for (int i = 2 * k + 1 - j; i <= 2 * k - 1; ++i) next.push_back({i, j});

  auto value_at = [&](int i, int m) -> T {
    if (m == 0) return h[static_cast<size_t>(i)];
    if (i + m <= 2 * k) return ws.tilde.beta(i, m);
    for (size_t p = 0; p < ws.param_labels.size(); ++p)
      if (ws.param_labels[p].i == i && ws.param_labels[p].j == m)
        return tvec(static_cast<Eigen::Index>(p));
    throw internal_error("inherited entry outside the parameter list");
  };

  Vec<T> out(static_cast<Eigen::Index>(next.size()));
  for (size_t q = 0; q < next.size(); ++q) {
    const int i = next[q].i;
    const int j = next[q].j;
    T total(0);
    T binom(1);
    for (int m = 0; m <= j; ++m) {
      T shift(1);
      for (int p = 0; p < j - m; ++p) shift *= -a2;
      total += binom * shift * value_at(i, m);
      binom = binom * T(j - m) / T(m + 1);
    }
    out(static_cast<Eigen::Index>(q)) = total;
  }
  return out;
}

template <class T>
AtomicMeasure2D npl_solve_level(const BivariateMomentSequence<T>& seq,
                                const std::vector<T>& alphas, const Vec<T>& tvec,
                                const Tol& tol, Trace& trace, int depth);

// One split at the zero line: Schur-complement the bordered extension to get
// the Hankel data of the off-line mass, slacken its last value by delta, solve
// the difference sequence on y = 0, and recurse on the remaining lines with
// the parameter values the completed matrix dictates.
template <class T>
AtomicMeasure2D npl_descend(const NLineWorkspace<T>& ws, const Vec<T>& tvec,
                            const Tol& tol, Trace& trace, int depth) {
  const int k = ws.k;
  const int n = ws.n;
  const Eigen::Index kk = k + 1;
  const std::string tag = std::to_string(n);

  Mat<T> S = ws.pencil.at(tvec);
  if (depth > 0) {
    bool strictly;
    if constexpr (is_exact_v<T>)
      strictly = psd_check(S).is_pd();
    else
      strictly = min_eigenvalue(S) > 0.0;
    if (!strictly)
      throw internal_error("inherited extension is not positive definite");
  }

  Mat<T> A00 = S.topLeftCorner(kk, kk);
  Mat<T> Bh = S.topRightCorner(kk, S.cols() - kk);
  Mat<T> Ch = S.bottomRightCorner(S.rows() - kk, S.cols() - kk);
  Mat<T> X = solve_linear(Ch, Mat<T>(Bh.transpose()));
  Mat<T> H = Bh * X;
  symmetrize(H);

  const double hspan = std::max(1.0, norm_inf(H));
  std::vector<T> h(static_cast<size_t>(2 * k + 1));
  for (int m = 0; m <= 2 * k; ++m) {
    const int lo = std::max(0, m - k);
    const int hi = std::min(k, m);
    for (int i = lo; i <= hi; ++i) {
      if constexpr (is_exact_v<T>) {
        if (H(i, m - i) != H(lo, m - lo))
          throw internal_error("completed matrix lost the Hankel structure");
      } else {
        if (std::abs(to_double(H(i, m - i) - H(lo, m - lo))) > tol.threshold(hspan))
          throw internal_error("completed matrix lost the Hankel structure");
      }
    }
    h[static_cast<size_t>(m)] = H(lo, m - lo);
  }
  for (int i = 0; i <= 2 * k - n + 1; ++i) {
    const T& want = ws.gamma[static_cast<size_t>(i)];
    if constexpr (is_exact_v<T>) {
      if (h[static_cast<size_t>(i)] != want)
        throw internal_error("completion disagrees with the off-line mass moments");
    } else {
      if (std::abs(to_double(h[static_cast<size_t>(i)] - want)) > tol.threshold(hspan))
        throw internal_error("completion disagrees with the off-line mass moments");
    }
    h[static_cast<size_t>(i)] = want;
  }

  Mat<T> gap = A00 - hankel_matrix(h);
  if (!psd_check(gap, tol).is_pd())
    throw internal_error("Schur complement of the completion is not positive definite");

  const double lam_gap = min_eigenvalue(gap);
  T delta = from_double<T>(std::min(1e-3, 0.5 * lam_gap));
  if constexpr (is_exact_v<T>) {
    if (delta <= T(0)) delta = Rational(1, 1000);
  }
  bool slack_ok = false;
  for (int halvings = 0; halvings < 80; ++halvings) {
    Mat<T> trial = gap;
    trial(k, k) -= delta;
    if (psd_check(trial, tol).is_pd()) {
      slack_ok = true;
      break;
    }
    delta = delta / T(2);
  }
  if (!slack_ok)
    throw internal_error("no positive slack keeps the pivot-line block positive definite");
  h[static_cast<size_t>(2 * k)] += delta;
  if (depth == 0) {
    trace.u0 = make_xvalue(T(h[static_cast<size_t>(2 * k)] - delta));
    trace.delta = make_xvalue(delta);
  }

  double scale = 1.0;
  for (int i = 0; i <= 2 * k; ++i)
    scale = std::max(scale, std::abs(to_double(ws.tilde.beta(i, 0))));
  std::vector<T> line0(static_cast<size_t>(2 * k + 1));
  for (int i = 0; i <= 2 * k; ++i)
    line0[static_cast<size_t>(i)] = ws.tilde.beta(i, 0) - h[static_cast<size_t>(i)];
  AtomicMeasure1D mu0 = solve_line_sequence(line0, scale, tol);

  BivariateMomentSequence<T> reduced = ws.tilde;
  for (int i = 0; i <= 2 * k; ++i) reduced.set(i, 0, h[static_cast<size_t>(i)]);
  std::vector<T> sub_alphas(ws.alphas.begin() + 1, ws.alphas.end());
  auto rel = check_line_relations(reduced, sub_alphas, tol);
  if (!rel.ok)
    throw internal_error("reduced sequence violates the line recurrence");

  Mat<T> extended = ws.corner_replaced(tvec, hankel_matrix(h));
  Eigen::Index reduced_rank;
  if constexpr (is_exact_v<T>) {
    reduced_rank = rank(extended);
  } else {
    Tol sharp = tol;
    sharp.rel = 1e-12;
    sharp.floor = 0.0;
    reduced_rank = rank(extended, sharp);
  }
  trace.ranks["M_delta_" + tag] = reduced_rank;
  if (reduced_rank != static_cast<Eigen::Index>((n - 1) * k + 1))
    throw internal_error("reduced extension has unexpected rank");

  Vec<T> tnext = inherited_parameters(ws, h, tvec);
  AtomicMeasure2D below = npl_solve_level(reduced, sub_alphas, tnext, tol, trace, depth + 1);
  return merge(on_line(mu0, make_xvalue(T(0))), below);
}

template <class T>
AtomicMeasure2D npl_solve_level(const BivariateMomentSequence<T>& seq,
                                const std::vector<T>& alphas, const Vec<T>& tvec,
                                const Tol& tol, Trace& trace, int depth) {
  if (alphas.size() == 2) {
    SolveOutcome base = solve_2pl(seq, alphas, tol);
    if (base.verdict != Verdict::Feasible || !base.measure)
      throw internal_error("two-line base of the descent failed");
    trace.ranks["M_2"] = base.trace.ranks["M"];
    trace.ranks["N_2"] = base.trace.ranks["N"];
    return *base.measure;
  }
  auto ws = n_line_workspace(seq, alphas);
  return pullback_measure(npl_descend(ws, tvec, tol, trace, depth), ws.map);
}

}  // namespace detail

// Sufficient test for n parallel lines in the pure case: search the free
// entries of the bordered extension for a strictly positive completion and,
// when one is found, build the measure by stripping one line at a time.  A
// failed search is Undecided, never Infeasible: strict positivity is not
// necessary for a representing measure.
template <class T>
SolveOutcome solve_npl_pure(const BivariateMomentSequence<T>& seq,
                            const std::vector<T>& alphas, const Tol& tol = {},
                            const LmiConfig& config = {}) {
  if (alphas.size() < 2)
    throw std::invalid_argument("n-line solver needs two or more lines");
  if (alphas.size() == 2) return solve_2pl(seq, alphas, tol);

  auto ws = n_line_workspace(seq, alphas);
  SolveOutcome out;

  auto rel = check_line_relations(ws.tilde, ws.alphas, tol);
  if (!rel.ok) {
    out.verdict = Verdict::Infeasible;
    out.witness = RelationWitness{rel.i, rel.j, rel.max_residual,
                                  "n-line moment recurrence fails"};
    out.trace.branch = "n-lines";
    return out;
  }

  auto mcert = psd_check(ws.m_res, tol);
  out.trace.ranks["M"] = mcert.is_psd() ? mcert.rank : rank(ws.m_res, tol);
  if (!mcert.is_psd()) {
    PsdWitness w;
    w.matrix = "M";
    w.min_eigenvalue = min_eigenvalue(ws.m_res);
    if (mcert.neg_witness) w.vector = detail::unit_double_vector(*mcert.neg_witness);
    out.verdict = Verdict::Infeasible;
    out.witness = w;
    out.trace.branch = "n-lines";
    return out;
  }

  const Eigen::Index m = ws.pencil.params();
  FeasibilityReport report = maximize_min_eigenvalue(ws.pencil, VecD::Zero(m), config);
  LmiTraceInfo info;
  info.status = report.status == LmiStatus::StrictlyFeasible ? "strictly-feasible"
                                                             : "not-found";
  info.best_value = report.best_value;
  info.best_point.assign(report.best_point.data(),
                         report.best_point.data() + report.best_point.size());
  info.starts = report.starts;
  info.iterations = report.iterations;
  out.trace.lmi = info;

  if (report.status != LmiStatus::StrictlyFeasible) {
    out.verdict = Verdict::Undecided;
    out.trace.branch = "n-lines:search";
    out.message =
        "no strictly positive completion found; the extension test is sufficient only";
    return out;
  }

  Vec<T> tvec(m);
  if constexpr (is_exact_v<T>) {
    bool certified = false;
    for (int attempt = 0; attempt < 2 && !certified; ++attempt) {
      Vec<T> cand(m);
      bool built = true;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (attempt == 0) {
          auto r = rationalize(report.best_point(i));
          if (!r) {
            built = false;
            break;
          }
          cand(i) = T(*r);
        } else {
          cand(i) = T(Rational(report.best_point(i)));
        }
      }
      if (built && psd_check(ws.pencil.at(cand)).is_pd()) {
        tvec = cand;
        certified = true;
      }
    }
    if (!certified) {
      out.verdict = Verdict::Undecided;
      out.trace.branch = "n-lines:search";
      out.message = "the completion could not be certified in rational arithmetic";
      return out;
    }
  } else {
    for (Eigen::Index i = 0; i < m; ++i) tvec(i) = T(report.best_point(i));
  }
  if (m > 0) out.trace.t0 = make_xvalue(tvec(0));

  AtomicMeasure2D normalized = detail::npl_descend(ws, tvec, tol, out.trace, 0);
  AtomicMeasure2D measure = pullback_measure(normalized, ws.map);
  validate_measure(measure);

  out.verdict = Verdict::Feasible;
  out.measure = std::move(measure);
  out.trace.branch = "n-lines:descent";
  if constexpr (is_exact_v<T>) {
    if (!out.measure->all_exact())
      out.message = "some atom coordinates are irrational and carried in floating point";
  }
  return out;
}

}  // namespace pml
