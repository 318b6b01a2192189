#include <doctest.h>

#include "pml/transform.hpp"
#include "support.hpp"

using namespace pml;
using pmltest::rand_int;
using pmltest::rand_line_measure;

namespace {

AffineMap<Rational> rand_invertible_map() {
  AffineMap<Rational> map;
  do {
    map.a = Rational(rand_int(-3, 3));
    map.b = Rational(rand_int(-2, 2));
    map.c = Rational(rand_int(-2, 2));
    map.d = Rational(rand_int(-3, 3));
    map.e = Rational(rand_int(-2, 2));
    map.f = Rational(rand_int(-2, 2));
  } while (!map.invertible());
  return map;
}

}  // namespace

TEST_SUITE("transform") {

TEST_CASE("inverse composes to the identity") {
  for (int trial = 0; trial < 20; ++trial) {
    auto map = rand_invertible_map();
    auto both = compose(map, map.inverse());
    CHECK(both.a == Rational(0));
    CHECK(both.b == Rational(1));
    CHECK(both.c == Rational(0));
    CHECK(both.d == Rational(0));
    CHECK(both.e == Rational(0));
    CHECK(both.f == Rational(1));
  }
}

TEST_CASE("transforming moments equals transforming the measure") {
  for (int trial = 0; trial < 15; ++trial) {
    int k = rand_int(2, 3);
    auto mu = rand_line_measure({Rational(0), Rational(1)}, rand_int(1, 2));
    auto seq = moments_of_measure<Rational>(mu, k);
    auto map = rand_invertible_map();
    auto lhs = transform_sequence(seq, map);
    auto rhs = moments_of_measure<Rational>(push_forward(mu, map), k);
    for (int d = 0; d <= 2 * k; ++d)
      for (int j = 0; j <= d; ++j) CHECK(lhs.beta(d - j, j) == rhs.beta(d - j, j));
  }
}

TEST_CASE("transform_sequence respects composition and inversion") {
  int k = 2;
  auto mu = rand_line_measure({Rational(-1), Rational(2)}, 2);
  auto seq = moments_of_measure<Rational>(mu, k);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = rand_invertible_map();
    auto g = rand_invertible_map();
    auto chained = transform_sequence(transform_sequence(seq, f), g);
    auto direct = transform_sequence(seq, compose(g, f));
    CHECK(chained.raw() == direct.raw());

    auto round = transform_sequence(transform_sequence(seq, f), f.inverse());
    CHECK(round.raw() == seq.raw());
  }
}

TEST_CASE("psd, rank and recursive generation survive invertible maps") {
  for (int trial = 0; trial < 10; ++trial) {
    int k = rand_int(2, 3);
    auto mu = rand_line_measure({Rational(0), Rational(1)}, rand_int(1, k - 1));
    auto seq = moments_of_measure<Rational>(mu, k);
    auto map = rand_invertible_map();
    auto moved = transform_sequence(seq, map);

    MatQ M = build_moment_matrix(seq);
    MatQ Mt = build_moment_matrix(moved);
    auto c1 = psd_check(M);
    auto c2 = psd_check(Mt);
    CHECK(c1.is_psd());
    CHECK(c2.is_psd());
    CHECK(c1.rank == c2.rank);
    CHECK(check_recursively_generated(moved).ok);
  }
}

TEST_CASE("pushforward then pullback restores atoms") {
  auto mu = rand_line_measure({Rational(0), Rational(3)}, 2);
  auto map = rand_invertible_map();
  auto there = push_forward(mu, map);
  auto back = pullback_measure(there, map);
  REQUIRE(back.atoms.size() == mu.atoms.size());
  for (size_t i = 0; i < mu.atoms.size(); ++i) {
    CHECK(*back.atoms[i].x.exact == *mu.atoms[i].x.exact);
    CHECK(*back.atoms[i].y.exact == *mu.atoms[i].y.exact);
    CHECK(*back.atoms[i].density.exact == *mu.atoms[i].density.exact);
  }
}

TEST_CASE("normalize_lines maps two lines onto zero and one") {
  auto norm = normalize_lines<Rational>({Rational(7, 2), Rational(-1, 2)});
  REQUIRE(norm.alphas.size() == 2);
  CHECK(norm.alphas[0] == Rational(0));
  CHECK(norm.alphas[1] == Rational(1));
  auto lo = norm.map.apply(Rational(5), Rational(-1, 2));
  CHECK(lo.first == Rational(5));
  CHECK(lo.second == Rational(0));
  auto hi = norm.map.apply(Rational(-2), Rational(7, 2));
  CHECK(hi.first == Rational(-2));
  CHECK(hi.second == Rational(1));
}

TEST_CASE("normalize_lines shifts three or more lines") {
  auto with_zero = normalize_lines<Rational>({Rational(1), Rational(-1), Rational(0)});
  CHECK(with_zero.map.d == Rational(0));
  CHECK(with_zero.alphas == std::vector<Rational>{Rational(0), Rational(-1), Rational(1)});

  auto shifted = normalize_lines<Rational>({Rational(1), Rational(2), Rational(4)});
  CHECK(shifted.map.d == Rational(-1));
  CHECK(shifted.alphas == std::vector<Rational>{Rational(0), Rational(1), Rational(3)});

  CHECK_THROWS_AS(normalize_lines<Rational>({Rational(1), Rational(1)}),
                  std::invalid_argument);
}

}
