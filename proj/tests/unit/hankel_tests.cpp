#include <doctest.h>

#include <algorithm>

#include "pml/hankel.hpp"
#include "pml/sequence.hpp"
#include "support.hpp"

using namespace pml;
using pmltest::rand_int;

TEST_SUITE("hankel") {

TEST_CASE("hankel_matrix lays out antidiagonals") {
  std::vector<Rational> seq{Rational(1), Rational(2), Rational(3), Rational(4),
                            Rational(5)};
  MatQ A = hankel_matrix(seq);
  REQUIRE(A.rows() == 3);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      CHECK(A(i, j) == Rational(static_cast<int>(i + j) + 1));
  CHECK_THROWS(hankel_matrix(std::vector<Rational>{Rational(1), Rational(2)}));
}

TEST_CASE("hankel_block supports offsets and rectangles") {
  std::vector<Rational> seq;
  for (int i = 0; i < 8; ++i) seq.push_back(Rational(i));
  MatQ B = hankel_block(seq, 2, 3, 2);
  CHECK(B(0, 0) == Rational(2));
  CHECK(B(1, 2) == Rational(5));
  CHECK_THROWS(hankel_block(seq, 4, 6, 0));
}

TEST_CASE("leading_principal truncates square blocks") {
  std::vector<Rational> seq{Rational(2), Rational(1), Rational(3), Rational(1),
                            Rational(4)};
  MatQ A = hankel_matrix(seq);
  MatQ P = leading_principal(A, 2);
  CHECK(P.rows() == 2);
  CHECK(P(1, 1) == Rational(3));
  CHECK_THROWS(leading_principal(A, 4));
}

TEST_CASE("rank_of_sequence on structured sequences") {
  std::vector<Rational> zero(7, Rational(0));
  CHECK(rank_of_sequence(zero) == 0);

  std::vector<Rational> geo;
  Rational c(3, 2), p(1);
  for (int i = 0; i < 7; ++i) {
    geo.push_back(p);
    p *= c;
  }
  CHECK(rank_of_sequence(geo) == 1);

  for (int trial = 0; trial < 20; ++trial) {
    int k = rand_int(2, 5);
    int r = rand_int(1, k);
    AtomicMeasure1D mu;
    std::vector<int> xs;
    for (int a = 0; a < r; ++a) {
      int x;
      do {
        x = rand_int(-6, 6);
      } while (std::find(xs.begin(), xs.end(), x) != xs.end());
      xs.push_back(x);
      mu.atoms.push_back({XValue(Rational(x)), XValue(Rational(rand_int(1, 5)))});
    }
    auto seq = moments_of_measure_1d<Rational>(mu, 2 * k + 1);
    CHECK(rank_of_sequence(seq) == r);
  }
}

TEST_CASE("rank_of_sequence reaches full size on nonsingular data") {
  AtomicMeasure1D mu;
  for (int a = 0; a <= 3; ++a)
    mu.atoms.push_back({XValue(Rational(a)), XValue(Rational(1))});
  auto seq = moments_of_measure_1d<Rational>(mu, 7);
  CHECK(rank_of_sequence(seq) == 4);
}

}
