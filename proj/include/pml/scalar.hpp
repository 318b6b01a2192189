#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Core>

namespace pml {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatD = Mat<double>;
using VecD = Vec<double>;
using MatQ = Mat<Rational>;
using VecQ = Vec<Rational>;

template <class T>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline double abs_val(double x) { return std::fabs(x); }
inline Rational abs_val(const Rational& x) { return x < 0 ? Rational(-x) : x; }

template <class T>
T from_double(double x) {
  if constexpr (is_exact_v<T>) {
    return Rational(x);
  } else {
    return x;
  }
}

template <class T>
double norm_inf(const Mat<T>& a) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      m = std::max(m, std::fabs(to_double(a(i, j))));
  return m;
}

template <class T>
double norm_inf(const Vec<T>& a) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(to_double(a(i))));
  return m;
}

// Tolerance policy for the float backend.  `rel` scales with the matrix norm;
// `floor` lets callers anchor derived submatrices to the scale of the parent
// problem so that a numerically-zero Schur block is not treated as full rank.
struct Tol {
  double rel = 1e-9;
  double floor = 0.0;

  double threshold(double scale) const { return rel * std::max(scale, floor); }

  Tol with_floor(double f) const {
    Tol t = *this;
    t.floor = std::max(t.floor, f);
    return t;
  }
};

struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

// --- rational parsing / formatting ----------------------------------------

inline std::string to_fraction_string(const Rational& r) {
  std::string s = boost::multiprecision::numerator(r).str();
  if (boost::multiprecision::denominator(r) != 1)
    s += "/" + boost::multiprecision::denominator(r).str();
  return s;
}

Rational parse_rational(const std::string& text);

std::string format_double(double x);  // 12 significant digits

// Attempts to recover an exact rational from a double via continued fractions.
// Returns the first convergent within `rel_err * max(1,|x|)` of x, giving up
// once denominators exceed `max_den`.
std::optional<Rational> rationalize(double x, double rel_err = 1e-11,
                                    const Int& max_den = Int(1) << 40);

bool is_perfect_square(const Rational& r, Rational& root);

}  // namespace pml
