#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "pml/measure.hpp"
#include "pml/scalar.hpp"
#include "pml/sequence.hpp"

namespace pml {

// Invertible affine change of coordinates
//   (x, y) |-> (a + b x + c y, d + e x + f y).
template <class T>
struct AffineMap {
  T a{0}, b{1}, c{0};
  T d{0}, e{0}, f{1};

  static AffineMap identity() { return {}; }

  T det() const { return b * f - c * e; }
  bool invertible() const { return det() != T(0); }

  std::pair<T, T> apply(const T& x, const T& y) const {
    return {a + b * x + c * y, d + e * x + f * y};
  }

  AffineMap inverse() const {
    T dt = det();
    if (dt == T(0)) throw internal_error("affine map is singular");
    AffineMap inv;
    inv.b = f / dt;
    inv.c = -c / dt;
    inv.e = -e / dt;
    inv.f = b / dt;
    inv.a = -(inv.b * a + inv.c * d);
    inv.d = -(inv.e * a + inv.f * d);
    return inv;
  }
};

// Composition acting as outer(inner(x, y)).
template <class T>
AffineMap<T> compose(const AffineMap<T>& outer, const AffineMap<T>& inner) {
  AffineMap<T> out;
  out.a = outer.a + outer.b * inner.a + outer.c * inner.d;
  out.b = outer.b * inner.b + outer.c * inner.e;
  out.c = outer.b * inner.c + outer.c * inner.f;
  out.d = outer.d + outer.e * inner.a + outer.f * inner.d;
  out.e = outer.e * inner.b + outer.f * inner.e;
  out.f = outer.e * inner.c + outer.f * inner.f;
  return out;
}

// Moments of the pushforward: the new (i, j) moment is the functional
// applied to (a + bx + cy)^i (d + ex + fy)^j.
template <class T>
BivariateMomentSequence<T> transform_sequence(const BivariateMomentSequence<T>& seq,
                                              const AffineMap<T>& map) {
  const int deg = seq.degree();
  Poly2<T> first, second;
  first[{0, 0}] = map.a;
  first[{1, 0}] = map.b;
  first[{0, 1}] = map.c;
  second[{0, 0}] = map.d;
  second[{1, 0}] = map.e;
  second[{0, 1}] = map.f;

  std::vector<Poly2<T>> pow1(static_cast<size_t>(deg) + 1);
  std::vector<Poly2<T>> pow2(static_cast<size_t>(deg) + 1);
  pow1[0][{0, 0}] = T(1);
  pow2[0][{0, 0}] = T(1);
  for (int i = 1; i <= deg; ++i) {
    pow1[static_cast<size_t>(i)] = poly_mul(pow1[static_cast<size_t>(i - 1)], first);
    pow2[static_cast<size_t>(i)] = poly_mul(pow2[static_cast<size_t>(i - 1)], second);
  }

  BivariateMomentSequence<T> out(seq.k());
  for (int d = 0; d <= deg; ++d)
    for (int j = 0; j <= d; ++j) {
      int i = d - j;
      Poly2<T> prod =
          poly_mul(pow1[static_cast<size_t>(i)], pow2[static_cast<size_t>(j)]);
      out.set(i, j, riesz_apply(seq, prod));
    }
  return out;
}

template <class T>
Atom2D apply_to_atom(const AffineMap<T>& map, const Atom2D& atom) {
  if constexpr (is_exact_v<T>) {
    if (atom.x.has_exact() && atom.y.has_exact()) {
      auto [xx, yy] = map.apply(*atom.x.exact, *atom.y.exact);
      return {XValue(xx), XValue(yy), atom.density};
    }
  }
  double xx = to_double(map.a) + to_double(map.b) * atom.x.value +
              to_double(map.c) * atom.y.value;
  double yy = to_double(map.d) + to_double(map.e) * atom.x.value +
              to_double(map.f) * atom.y.value;
  return {XValue(xx), XValue(yy), atom.density};
}

template <class T>
AtomicMeasure2D push_forward(const AtomicMeasure2D& mu, const AffineMap<T>& map) {
  AtomicMeasure2D out;
  out.atoms.reserve(mu.atoms.size());
  for (const auto& atom : mu.atoms) out.atoms.push_back(apply_to_atom(map, atom));
  return out;
}

// Returns the measure whose pushforward under `map` is `mu`: solvers work in
// normalized coordinates and pull their atoms back through the forward map.
template <class T>
AtomicMeasure2D pullback_measure(const AtomicMeasure2D& mu, const AffineMap<T>& map) {
  return push_forward(mu, map.inverse());
}

template <class T>
struct NormalizedLines {
  AffineMap<T> map;
  // Line values after the change of coordinates.  Two lines become {0, 1};
  // with three or more, the first entry is the designated zero line and the
  // rest are sorted ascending.
  std::vector<T> alphas;
};

template <class T>
NormalizedLines<T> normalize_lines(std::vector<T> alphas) {
  if (alphas.size() < 2) throw internal_error("normalize_lines needs two or more lines");
  std::sort(alphas.begin(), alphas.end());
  for (size_t i = 1; i < alphas.size(); ++i)
    if (alphas[i] == alphas[i - 1]) throw std::invalid_argument("repeated line value");

  NormalizedLines<T> out;
  if (alphas.size() == 2) {
    T span = alphas[1] - alphas[0];
    out.map.d = -alphas[0] / span;
    out.map.f = T(1) / span;
    out.map.e = T(0);
    out.alphas = {T(0), T(1)};
    return out;
  }

  // A shift keeps every y-scale intact; land on an existing zero line when
  // there is one, otherwise move the smallest line to zero.
  T pivot = alphas[0];
  for (const T& alpha : alphas)
    if (alpha == T(0)) pivot = T(0);
  out.map.d = -pivot;
  out.alphas.push_back(T(0));
  for (const T& alpha : alphas)
    if (alpha != pivot) out.alphas.push_back(alpha - pivot);
  return out;
}

}  // namespace pml
