#include <doctest.h>

#include "pml/scalar.hpp"

using namespace pml;

TEST_SUITE("scalar") {

TEST_CASE("parse_rational accepts fraction and decimal forms") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-7/2") == Rational(-7, 2));
  CHECK(parse_rational(" 12 ") == Rational(12));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("-2.5e1") == Rational(-25));
  CHECK(parse_rational("4e-2") == Rational(1, 25));
  CHECK(parse_rational("1331888/9295") == Rational(1331888, 9295));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK_THROWS(parse_rational(""));
}

TEST_CASE("format_double emits 12 significant digits") {
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-123456789.0) == "-123456789");
}

TEST_CASE("to_fraction_string round-trips") {
  Rational r(-355, 113);
  CHECK(parse_rational(to_fraction_string(r)) == r);
  CHECK(to_fraction_string(Rational(5)) == "5");
}

TEST_CASE("rationalize recovers small fractions from doubles") {
  auto r = rationalize(to_double(Rational(355, 113)));
  REQUIRE(r.has_value());
  CHECK(*r == Rational(355, 113));

  r = rationalize(1.0 / 3.0);
  REQUIRE(r.has_value());
  CHECK(*r == Rational(1, 3));

  r = rationalize(-7164.0 / 143.0);
  REQUIRE(r.has_value());
  CHECK(*r == Rational(-7164, 143));

  r = rationalize(0.0);
  REQUIRE(r.has_value());
  CHECK(*r == Rational(0));
}

TEST_CASE("rationalize candidates stay within tolerance") {
  double x = 3.141592653589793;
  auto r = rationalize(x);
  REQUIRE(r.has_value());
  CHECK(std::fabs(to_double(*r) - x) <= 1e-11 * std::max(1.0, std::fabs(x)));
}

TEST_CASE("is_perfect_square detects rational squares") {
  Rational root;
  CHECK(is_perfect_square(Rational(9, 4), root));
  CHECK(root == Rational(3, 2));
  CHECK(is_perfect_square(Rational(0), root));
  CHECK(root == Rational(0));
  CHECK_FALSE(is_perfect_square(Rational(2), root));
  CHECK_FALSE(is_perfect_square(Rational(9, 5), root));
}

TEST_CASE("tolerance thresholds scale with the floor") {
  Tol tol{1e-9, 0.0};
  CHECK(tol.threshold(100.0) == doctest::Approx(1e-7));
  CHECK(tol.threshold(0.0) == 0.0);
  Tol floored = tol.with_floor(1.0);
  CHECK(floored.threshold(0.0) == doctest::Approx(1e-9));
  CHECK(floored.threshold(100.0) == doctest::Approx(1e-7));
}

}
