#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "pml/linalg.hpp"
#include "pml/measure.hpp"
#include "pml/scalar.hpp"

namespace pml {

// S(t) = S0 + sum_i t_i * terms[i], all matrices symmetric of equal size.
template <class T>
struct AffineMatrixPencil {
  Mat<T> s0;
  std::vector<Mat<T>> terms;

  Eigen::Index size() const { return s0.rows(); }
  Eigen::Index params() const { return static_cast<Eigen::Index>(terms.size()); }

  Mat<T> at(const Vec<T>& t) const {
    if (t.size() != params()) throw internal_error("pencil parameter count mismatch");
    Mat<T> out = s0;
    for (Eigen::Index i = 0; i < params(); ++i) {
      Mat<T> scaled = terms[static_cast<size_t>(i)] * t(i);
      out += scaled;
    }
    return out;
  }
};

template <class T>
AffineMatrixPencil<double> to_double_pencil(const AffineMatrixPencil<T>& pencil) {
  AffineMatrixPencil<double> out;
  out.s0 = to_double_matrix(pencil.s0);
  out.terms.reserve(pencil.terms.size());
  for (const auto& term : pencil.terms) out.terms.push_back(to_double_matrix(term));
  return out;
}

struct LmiConfig {
  unsigned long long seed = 12345;
  int starts = 8;
  int iters = 300;
  double strict_tol_rel = 1e-10;
  int polish_sweeps = 2;
};

enum class LmiStatus { StrictlyFeasible, NotFound };

struct FeasibilityReport {
  LmiStatus status = LmiStatus::NotFound;
  VecD best_point;
  double best_value = -std::numeric_limits<double>::infinity();
  int starts = 0;
  int iterations = 0;
};

namespace detail {

inline double pencil_min_eig(const AffineMatrixPencil<double>& pencil, const VecD& t) {
  MatD S = pencil.at(t);
  MatD sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<MatD> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Golden-section maximization of a concave function of one variable; the
// bracket is grown first until the best value sits strictly inside.
template <class F>
double golden_max(const F& f, double lo, double hi, int iters, double& best_x) {
  for (int grow = 0; grow < 60; ++grow) {
    double mid = 0.5 * (lo + hi);
    double flo = f(lo), fhi = f(hi), fmid = f(mid);
    if (fmid >= flo && fmid >= fhi) break;
    double width = hi - lo;
    if (flo > fhi)
      lo -= width;
    else
      hi += width;
  }
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    }
  }
  best_x = f1 > f2 ? x1 : x2;
  return std::max(f1, f2);
}

template <class F>
double nelder_mead_max(const F& f, const VecD& start, double step, int iters,
                       VecD& best) {
  const Eigen::Index m = start.size();
  std::vector<VecD> pts(static_cast<size_t>(m + 1), start);
  std::vector<double> val(static_cast<size_t>(m + 1));
  for (Eigen::Index i = 0; i < m; ++i) pts[static_cast<size_t>(i + 1)](i) += step;
  for (size_t i = 0; i < pts.size(); ++i) val[i] = f(pts[i]);

  auto order = [&] {
    for (size_t i = 1; i < pts.size(); ++i)
      for (size_t j = i; j > 0 && val[j] > val[j - 1]; --j) {
        std::swap(val[j], val[j - 1]);
        std::swap(pts[j], pts[j - 1]);
      }
  };
  order();

  for (int it = 0; it < iters; ++it) {
    VecD centroid = VecD::Zero(m);
    for (size_t i = 0; i + 1 < pts.size(); ++i) centroid += pts[i];
    centroid /= static_cast<double>(m);
    VecD& worst = pts.back();

    VecD refl = centroid + (centroid - worst);
    double frefl = f(refl);
    if (frefl > val[0]) {
      VecD expd = centroid + 2.0 * (centroid - worst);
      double fexpd = f(expd);
      if (fexpd > frefl) {
        worst = expd;
        val.back() = fexpd;
      } else {
        worst = refl;
        val.back() = frefl;
      }
    } else if (frefl > val[val.size() - 2]) {
      worst = refl;
      val.back() = frefl;
    } else {
      VecD contr = centroid + 0.5 * (worst - centroid);
      double fcontr = f(contr);
      if (fcontr > val.back()) {
        worst = contr;
        val.back() = fcontr;
      } else {
        for (size_t i = 1; i < pts.size(); ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          val[i] = f(pts[i]);
        }
      }
    }
    order();
  }
  best = pts[0];
  return val[0];
}

}  // namespace detail

template <class T>
FeasibilityReport maximize_min_eigenvalue(const AffineMatrixPencil<T>& pencil,
                                          const VecD& start,
                                          const LmiConfig& config = {}) {
  AffineMatrixPencil<double> pd = to_double_pencil(pencil);
  const Eigen::Index m = pd.params();
  if (start.size() != m) throw internal_error("start point has wrong dimension");

  const double scale = std::max(1.0, norm_inf(pd.s0));
  const double strict_tol = config.strict_tol_rel * scale;
  auto eval = [&](const VecD& t) { return detail::pencil_min_eig(pd, t); };

  FeasibilityReport report;
  if (m == 0) {
    report.best_point = VecD();
    report.best_value = eval(VecD());
    report.starts = 1;
    report.iterations = 1;
  } else if (m == 1) {
    auto f1 = [&](double x) {
      VecD t(1);
      t(0) = x;
      return eval(t);
    };
    const double w = 1.0 + scale;
    double best_x = start(0);
    report.best_value = detail::golden_max(f1, start(0) - w, start(0) + w,
                                           config.iters, best_x);
    report.best_point = VecD::Constant(1, best_x);
    report.starts = 1;
    report.iterations = config.iters;
  } else {
    std::mt19937_64 gen(config.seed);
    const double w = 1.0 + scale;
    std::uniform_real_distribution<double> box(-w, w);
    const double step = std::max(1.0, 0.05 * w);
    for (int s = 0; s < config.starts; ++s) {
      VecD origin = start;
      if (s > 0)
        for (Eigen::Index i = 0; i < m; ++i) origin(i) = start(i) + box(gen);
      VecD cand;
      double got = detail::nelder_mead_max(eval, origin, step, config.iters, cand);
      if (got > report.best_value) {
        report.best_value = got;
        report.best_point = cand;
      }
      report.starts += 1;
      report.iterations += config.iters;
    }
    for (int sweep = 0; sweep < config.polish_sweeps; ++sweep)
      for (Eigen::Index i = 0; i < m; ++i) {
        VecD t = report.best_point;
        auto f1 = [&](double x) {
          t(i) = x;
          return eval(t);
        };
        double best_x = report.best_point(i);
        double h = std::max(1e-3, 1e-3 * w);
        double got = detail::golden_max(f1, best_x - h, best_x + h, 80, best_x);
        if (got > report.best_value) {
          report.best_value = got;
          report.best_point(i) = best_x;
        }
      }
  }

  report.status = report.best_value > strict_tol ? LmiStatus::StrictlyFeasible
                                                 : LmiStatus::NotFound;
  return report;
}

struct Interval1D {
  bool nonempty = false;
  bool exact_endpoints = false;
  XValue lo;
  XValue hi;
};

// Exact feasibility interval for a pencil whose single parameter occupies one
// symmetric off-diagonal slot (p, q).  Splitting off rows p and q leaves a
// parameter-free block A; S(t) is psd iff A is psd, the two cross columns lie
// in its range, and the 2x2 Schur complement stays psd, which pins the scaled
// parameter to an interval around -q12.
template <class T>
Interval1D feasible_interval_1d(const AffineMatrixPencil<T>& pencil,
                                const Tol& tol = {}) {
  if (pencil.params() != 1)
    throw std::invalid_argument("feasible_interval_1d needs exactly one parameter");
  const Mat<T>& term = pencil.terms[0];
  const Eigen::Index n = pencil.size();
  Eigen::Index p = -1, q = -1;
  T coeff(0);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = r; c < n; ++c) {
      if (term(r, c) == T(0)) continue;
      if (p >= 0 || r == c)
        throw std::invalid_argument(
            "pencil parameter must occupy one symmetric off-diagonal slot");
      p = r;
      q = c;
      coeff = term(r, c);
    }
  if (p < 0 || term(q, p) != coeff)
    throw std::invalid_argument(
        "pencil parameter must occupy one symmetric off-diagonal slot");

  std::vector<Eigen::Index> rest;
  rest.reserve(static_cast<size_t>(n - 2));
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != p && i != q) rest.push_back(i);

  Interval1D out;
  Mat<T> A = sym_submatrix(pencil.s0, rest);
  if (!psd_check(A, tol).is_psd()) return out;

  Mat<T> B(static_cast<Eigen::Index>(rest.size()), 2);
  for (size_t i = 0; i < rest.size(); ++i) {
    B(static_cast<Eigen::Index>(i), 0) = pencil.s0(rest[i], p);
    B(static_cast<Eigen::Index>(i), 1) = pencil.s0(rest[i], q);
  }
  if (!in_column_space(A, B, tol)) return out;

  Mat<T> Apinv_B = pinv(A, tol) * B;
  Mat<T> Bt_Apinv_B = B.transpose() * Apinv_B;
  T q11 = pencil.s0(p, p) - Bt_Apinv_B(0, 0);
  T q22 = pencil.s0(q, q) - Bt_Apinv_B(1, 1);
  T q12 = pencil.s0(p, q) - Bt_Apinv_B(0, 1);

  if constexpr (is_exact_v<T>) {
    if (q11 < T(0) || q22 < T(0)) return out;
    T disc = q11 * q22;
    Rational root;
    out.nonempty = true;
    if (is_perfect_square(Rational(disc), root)) {
      Rational s_lo = Rational(-q12) - root;
      Rational s_hi = Rational(-q12) + root;
      Rational t_lo = s_lo / Rational(coeff);
      Rational t_hi = s_hi / Rational(coeff);
      if (t_lo > t_hi) std::swap(t_lo, t_hi);
      out.exact_endpoints = true;
      out.lo = XValue(t_lo);
      out.hi = XValue(t_hi);
    } else {
      double rootd = std::sqrt(to_double(disc));
      double s_lo = to_double(-q12) - rootd;
      double s_hi = to_double(-q12) + rootd;
      double t_lo = s_lo / to_double(coeff);
      double t_hi = s_hi / to_double(coeff);
      if (t_lo > t_hi) std::swap(t_lo, t_hi);
      out.lo = XValue(t_lo);
      out.hi = XValue(t_hi);
    }
  } else {
    double tau = tol.threshold(norm_inf(pencil.s0));
    double d11 = to_double(q11), d22 = to_double(q22);
    if (d11 < -tau || d22 < -tau) return out;
    d11 = std::max(d11, 0.0);
    d22 = std::max(d22, 0.0);
    double rootd = std::sqrt(d11 * d22);
    double s_lo = -to_double(q12) - rootd;
    double s_hi = -to_double(q12) + rootd;
    double t_lo = s_lo / to_double(coeff);
    double t_hi = s_hi / to_double(coeff);
    if (t_lo > t_hi) std::swap(t_lo, t_hi);
    out.nonempty = true;
    out.lo = XValue(t_lo);
    out.hi = XValue(t_hi);
  }
  return out;
}

}  // namespace pml
