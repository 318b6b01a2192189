#pragma once

#include <random>
#include <vector>

#include "pml/measure.hpp"
#include "pml/scalar.hpp"

namespace pmltest {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(987654321ull);
  return gen;
}

inline int rand_int(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(rng());
}

inline double rand_real(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng());
}

inline pml::Rational rand_rational(int num_range = 9, int den_range = 5) {
  int num = rand_int(-num_range, num_range);
  int den = rand_int(1, den_range);
  return pml::Rational(num, den);
}

template <class T>
T rand_scalar() {
  if constexpr (pml::is_exact_v<T>)
    return rand_rational();
  else
    return rand_real(-2.0, 2.0);
}

template <class T>
pml::Mat<T> rand_matrix(Eigen::Index rows, Eigen::Index cols) {
  pml::Mat<T> M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = rand_scalar<T>();
  return M;
}

template <class T>
pml::Mat<T> rand_psd(Eigen::Index n, Eigen::Index gram_cols) {
  pml::Mat<T> G = rand_matrix<T>(n, gram_cols);
  return pml::Mat<T>(G * G.transpose());
}

template <class T>
pml::Mat<T> rand_symmetric(Eigen::Index n) {
  pml::Mat<T> M = rand_matrix<T>(n, n);
  return pml::Mat<T>((M + pml::Mat<T>(M.transpose())) / T(2));
}

// Random atomic measure supported on the horizontal lines y = alphas[l];
// atoms get distinct rational x-coordinates and positive rational weights.
inline pml::AtomicMeasure2D rand_line_measure(const std::vector<pml::Rational>& alphas,
                                              const std::vector<int>& atoms_per_line,
                                              int x_num_range = 12) {
  pml::AtomicMeasure2D mu;
  for (size_t l = 0; l < alphas.size(); ++l) {
    std::vector<pml::Rational> used;
    for (int a = 0; a < atoms_per_line[l]; ++a) {
      pml::Rational x;
      bool fresh = false;
      for (int tries = 0; tries < 100 && !fresh; ++tries) {
        x = pml::Rational(rand_int(-x_num_range, x_num_range), rand_int(1, 4));
        fresh = true;
        for (const auto& u : used)
          if (u == x) fresh = false;
      }
      used.push_back(x);
      pml::Rational w(rand_int(1, 9), rand_int(1, 5));
      mu.atoms.push_back({pml::XValue(x), pml::XValue(alphas[l]), pml::XValue(w)});
    }
  }
  return mu;
}

inline pml::AtomicMeasure2D rand_line_measure(const std::vector<pml::Rational>& alphas,
                                              int atoms_per_line) {
  return rand_line_measure(
      alphas, std::vector<int>(alphas.size(), atoms_per_line));
}

}  // namespace pmltest
