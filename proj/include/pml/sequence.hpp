#pragma once

#include <map>
#include <utility>
#include <vector>

#include "pml/linalg.hpp"
#include "pml/measure.hpp"
#include "pml/scalar.hpp"

namespace pml {

struct Monomial {
  int i = 0;
  int j = 0;
  int degree() const { return i + j; }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

// Degree-lexicographic position of x^i y^j: blocks by total degree, and
// within degree d the labels run (d,0), (d-1,1), ..., (0,d).
inline Eigen::Index monomial_position(int i, int j) {
  int d = i + j;
  return static_cast<Eigen::Index>(d * (d + 1) / 2 + j);
}

class MonomialIndex {
 public:
  explicit MonomialIndex(int k) : k_(k) {
    labels_.reserve(static_cast<size_t>(size()));
    for (int d = 0; d <= k; ++d)
      for (int j = 0; j <= d; ++j) labels_.push_back({d - j, j});
    line_perm_.reserve(labels_.size());
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i + j <= k; ++i) line_perm_.push_back(monomial_position(i, j));
  }

  int k() const { return k_; }
  Eigen::Index size() const {
    return static_cast<Eigen::Index>((k_ + 1) * (k_ + 2) / 2);
  }
  const std::vector<Monomial>& labels() const { return labels_; }

  // Line order lists labels by y-degree first, then x-degree; entry p of the
  // permutation is the degree-lex position of the p-th line-order label.
  const std::vector<Eigen::Index>& line_perm() const { return line_perm_; }

  Eigen::Index position(int i, int j) const {
    if (i < 0 || j < 0 || i + j > k_)
      throw internal_error("monomial outside index range");
    return monomial_position(i, j);
  }

  // Number of line-order labels with y-degree < n.
  static Eigen::Index line_prefix_size(int k, int n) {
    return static_cast<Eigen::Index>(n * (2 * k + 3 - n) / 2);
  }

 private:
  int k_;
  std::vector<Monomial> labels_;
  std::vector<Eigen::Index> line_perm_;
};

template <class T>
class BivariateMomentSequence {
 public:
  BivariateMomentSequence() : k_(0), m_(1, T(0)) {}
  explicit BivariateMomentSequence(int k)
      : k_(k), m_(static_cast<size_t>(monomial_position(0, 2 * k) + 1), T(0)) {}
  BivariateMomentSequence(int k, std::vector<T> values) : k_(k), m_(std::move(values)) {
    if (m_.size() != static_cast<size_t>(monomial_position(0, 2 * k_) + 1))
      throw internal_error("moment vector has wrong length");
  }

  int k() const { return k_; }
  int degree() const { return 2 * k_; }

  const T& beta(int i, int j) const { return m_[checked(i, j)]; }
  void set(int i, int j, const T& v) { m_[checked(i, j)] = v; }
  const std::vector<T>& raw() const { return m_; }

  template <class U>
  BivariateMomentSequence<U> cast() const {
    std::vector<U> vals;
    vals.reserve(m_.size());
    for (const auto& v : m_) {
      if constexpr (std::is_same_v<U, double>)
        vals.push_back(to_double(v));
      else
        vals.push_back(U(v));
    }
    return BivariateMomentSequence<U>(k_, std::move(vals));
  }

 private:
  size_t checked(int i, int j) const {
    if (i < 0 || j < 0 || i + j > 2 * k_)
      throw internal_error("moment index out of range");
    return static_cast<size_t>(monomial_position(i, j));
  }

  int k_;
  std::vector<T> m_;
};

template <class T>
using Poly2 = std::map<std::pair<int, int>, T>;

template <class T>
T riesz_apply(const BivariateMomentSequence<T>& seq, const Poly2<T>& p) {
  T out(0);
  for (const auto& [mono, c] : p) out += c * seq.beta(mono.first, mono.second);
  return out;
}

template <class T>
Vec<T> poly_to_vec(const Poly2<T>& p, const MonomialIndex& idx) {
  Vec<T> v = Vec<T>::Zero(idx.size());
  for (const auto& [mono, c] : p) v(idx.position(mono.first, mono.second)) += c;
  return v;
}

template <class T>
Poly2<T> shift_poly(const Poly2<T>& p, int a, int b) {
  Poly2<T> out;
  for (const auto& [mono, c] : p) out[{mono.first + a, mono.second + b}] = c;
  return out;
}

template <class T>
Poly2<T> poly_mul(const Poly2<T>& p, const Poly2<T>& q) {
  Poly2<T> out;
  for (const auto& [mp, cp] : p)
    for (const auto& [mq, cq] : q)
      out[{mp.first + mq.first, mp.second + mq.second}] += cp * cq;
  return out;
}

template <class T>
Mat<T> build_moment_matrix(const BivariateMomentSequence<T>& seq) {
  MonomialIndex idx(seq.k());
  const auto& labels = idx.labels();
  Mat<T> M(idx.size(), idx.size());
  for (Eigen::Index r = 0; r < idx.size(); ++r)
    for (Eigen::Index c = 0; c < idx.size(); ++c) {
      const Monomial& a = labels[static_cast<size_t>(r)];
      const Monomial& b = labels[static_cast<size_t>(c)];
      M(r, c) = seq.beta(a.i + b.i, a.j + b.j);
    }
  return M;
}

template <class T>
Mat<T> permute_line_order(const Mat<T>& M, const MonomialIndex& idx) {
  const auto& perm = idx.line_perm();
  Mat<T> out(M.rows(), M.cols());
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c)
      out(r, c) = M(perm[static_cast<size_t>(r)], perm[static_cast<size_t>(c)]);
  return out;
}

// Principal submatrix of the moment matrix on an explicit set of labels.
template <class T>
Mat<T> restrict(const Mat<T>& M, const MonomialIndex& idx,
                const std::vector<Monomial>& subset) {
  std::vector<Eigen::Index> pos;
  pos.reserve(subset.size());
  for (const Monomial& m : subset) pos.push_back(idx.position(m.i, m.j));
  return sym_submatrix(M, pos);
}

// First `prefix` labels of the line order: all labels with y-degree below n
// when prefix = line_prefix_size(k, n).
template <class T>
Mat<T> line_restricted_matrix(const Mat<T>& M, const MonomialIndex& idx,
                              Eigen::Index prefix) {
  std::vector<Eigen::Index> pos(idx.line_perm().begin(),
                                idx.line_perm().begin() + prefix);
  return sym_submatrix(M, pos);
}

struct RgReport {
  bool ok = true;
  double max_residual = 0.0;
  Monomial multiplier{};
};

// A moment matrix is recursively generated when every column relation stays
// a relation after multiplication by monomials, as long as degrees permit.
template <class T>
RgReport check_recursively_generated(const BivariateMomentSequence<T>& seq,
                                     const Tol& tol = {}) {
  MonomialIndex idx(seq.k());
  Mat<T> M = build_moment_matrix(seq);
  const int k = seq.k();
  double tau = 0.0;
  if constexpr (!is_exact_v<T>) tau = tol.threshold(norm_inf(M));
  RgReport report;
  for (const Vec<T>& ker : kernel_basis(M, tol)) {
    int deg = 0;
    Poly2<T> p;
    for (Eigen::Index c = 0; c < ker.size(); ++c) {
      if (ker(c) == T(0)) continue;
      const Monomial& mono = idx.labels()[static_cast<size_t>(c)];
      p[{mono.i, mono.j}] = ker(c);
      deg = std::max(deg, mono.degree());
    }
    for (int a = 0; a + deg <= k; ++a)
      for (int b = 0; a + b + deg <= k; ++b) {
        if (a == 0 && b == 0) continue;
        Vec<T> image = M * poly_to_vec(shift_poly(p, a, b), idx);
        double resid = norm_inf(image);
        if constexpr (is_exact_v<T>) {
          if (resid != 0.0) {
            report.ok = false;
            report.multiplier = {a, b};
            report.max_residual = std::max(report.max_residual, resid);
          }
        } else {
          if (resid > tau) {
            report.ok = false;
            report.multiplier = {a, b};
          }
          report.max_residual = std::max(report.max_residual, resid);
        }
      }
  }
  return report;
}

template <class T>
BivariateMomentSequence<T> moments_of_measure(const AtomicMeasure2D& mu, int k) {
  BivariateMomentSequence<T> seq(k);
  for (int d = 0; d <= 2 * k; ++d)
    for (int j = 0; j <= d; ++j) {
      int i = d - j;
      T total(0);
      for (const auto& atom : mu.atoms) {
        T x = atom.x.as<T>();
        T y = atom.y.as<T>();
        T term = atom.density.as<T>();
        for (int p = 0; p < i; ++p) term *= x;
        for (int p = 0; p < j; ++p) term *= y;
        total += term;
      }
      seq.set(i, j, total);
    }
  return seq;
}

// e[m] is the m-th elementary symmetric polynomial of the given values,
// with e[0] = 1.
template <class T>
std::vector<T> elementary_symmetric(const std::vector<T>& values) {
  std::vector<T> e(values.size() + 1, T(0));
  e[0] = T(1);
  for (const T& v : values)
    for (size_t m = e.size() - 1; m >= 1; --m) e[m] += v * e[m - 1];
  return e;
}

struct LineRelationReport {
  bool ok = true;
  int i = 0;
  int j = 0;
  double max_residual = 0.0;
};

// A measure supported on the union of horizontal lines y = lines[l] annihilates
// the product of (y - lines[l]), so its moments satisfy a linear recurrence in
// the second index.  Checks that recurrence over every index pair it reaches.
template <class T>
LineRelationReport check_line_relations(const BivariateMomentSequence<T>& seq,
                                        const std::vector<T>& lines,
                                        const Tol& tol = {}) {
  const int n = static_cast<int>(lines.size());
  const int kk = 2 * seq.k();
  std::vector<T> e = elementary_symmetric(lines);
  double tau = 0.0;
  if constexpr (!is_exact_v<T>) {
    double scale = 0.0;
    for (const T& v : seq.raw()) scale = std::max(scale, std::abs(to_double(v)));
    double factor = 1.0;
    for (const T& em : e) factor += std::abs(to_double(em));
    tau = tol.threshold(scale * factor);
  }
  LineRelationReport report;
  for (int i = 0; i + n <= kk; ++i)
    for (int j = 0; i + j + n <= kk; ++j) {
      T rhs(0);
      T sign(1);
      for (int m = 1; m <= n; ++m) {
        rhs += sign * e[static_cast<size_t>(m)] * seq.beta(i, j + n - m);
        sign = -sign;
      }
      double resid = std::abs(to_double(seq.beta(i, j + n) - rhs));
      bool bad = false;
      if constexpr (is_exact_v<T>)
        bad = seq.beta(i, j + n) != rhs;
      else
        bad = resid > tau;
      if (bad && report.ok) {
        report.ok = false;
        report.i = i;
        report.j = j;
      }
      report.max_residual = std::max(report.max_residual, resid);
    }
  return report;
}

template <class T>
std::vector<T> moments_of_measure_1d(const AtomicMeasure1D& mu, int count) {
  std::vector<T> out;
  out.reserve(static_cast<size_t>(count));
  for (int m = 0; m < count; ++m) {
    T total(0);
    for (const auto& atom : mu.atoms) {
      T x = atom.x.as<T>();
      T term = atom.density.as<T>();
      for (int p = 0; p < m; ++p) term *= x;
      total += term;
    }
    out.push_back(total);
  }
  return out;
}

}  // namespace pml
