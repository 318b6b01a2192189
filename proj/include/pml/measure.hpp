#pragma once

#include <optional>
#include <vector>

#include "pml/scalar.hpp"

namespace pml {

// A coordinate or density that always carries a double approximation and,
// when the value is known exactly, the rational it came from.  Solvers in
// exact mode keep the rational alongside; atoms obtained from polynomial
// roots are generally irrational and carry only the double.
struct XValue {
  double value = 0.0;
  std::optional<Rational> exact;

  XValue() = default;
  XValue(double v) : value(v) {}
  XValue(const Rational& r) : value(to_double(r)), exact(r) {}

  bool has_exact() const { return exact.has_value(); }

  template <class T>
  T as() const {
    if constexpr (is_exact_v<T>) {
      if (!exact)
        throw internal_error("exact value requested from a float-only quantity");
      return *exact;
    } else {
      return value;
    }
  }
};

template <class T>
XValue make_xvalue(const T& v) {
  return XValue(v);
}

struct Atom1D {
  XValue x;
  XValue density;
};

struct AtomicMeasure1D {
  std::vector<Atom1D> atoms;

  bool empty() const { return atoms.empty(); }
  double mass() const {
    double s = 0;
    for (const auto& a : atoms) s += a.density.value;
    return s;
  }
};

struct Atom2D {
  XValue x;
  XValue y;
  XValue density;
};

struct AtomicMeasure2D {
  std::vector<Atom2D> atoms;

  bool empty() const { return atoms.empty(); }

  bool all_exact() const {
    for (const auto& a : atoms)
      if (!a.x.has_exact() || !a.y.has_exact() || !a.density.has_exact())
        return false;
    return true;
  }
};

// Places a 1-d measure onto the horizontal line y = y0.
inline AtomicMeasure2D on_line(const AtomicMeasure1D& mu, const XValue& y0) {
  AtomicMeasure2D out;
  out.atoms.reserve(mu.atoms.size());
  for (const auto& a : mu.atoms) out.atoms.push_back({a.x, y0, a.density});
  return out;
}

inline AtomicMeasure2D merge(const AtomicMeasure2D& a, const AtomicMeasure2D& b) {
  AtomicMeasure2D out = a;
  out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
  return out;
}

inline void validate_measure(const AtomicMeasure2D& mu, double min_density = 0.0) {
  for (size_t i = 0; i < mu.atoms.size(); ++i) {
    if (mu.atoms[i].density.value <= min_density)
      throw internal_error("non-positive atom density");
    for (size_t j = i + 1; j < mu.atoms.size(); ++j) {
      double dx = mu.atoms[i].x.value - mu.atoms[j].x.value;
      double dy = mu.atoms[i].y.value - mu.atoms[j].y.value;
      double sep = 1e-7 * (1.0 + std::fabs(mu.atoms[i].x.value) +
                           std::fabs(mu.atoms[i].y.value));
      if (std::fabs(dx) <= sep && std::fabs(dy) <= sep)
        throw internal_error("coincident atoms in measure");
    }
  }
}

}  // namespace pml
