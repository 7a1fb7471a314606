#include "doctest.h"

#include "cdense/rational.hpp"

using cdense::InputError;
using cdense::Rational;

TEST_CASE("rational parsing canonicalizes") {
  CHECK(Rational::parse("2/4").str() == "1/2");
  CHECK(Rational::parse("0").str() == "0");
  CHECK(Rational::parse("1").str() == "1");
  CHECK(Rational::parse("-1/3") < Rational(0));
  CHECK(Rational(6, 8) == Rational(3, 4));
}

TEST_CASE("malformed rationals are input errors") {
  CHECK_THROWS_AS(Rational::parse("3/0"), InputError);
  CHECK_THROWS_AS(Rational::parse("abc"), InputError);
  CHECK_THROWS_AS(Rational::parse(""), InputError);
  CHECK_THROWS_AS(Rational::parse("1/"), InputError);
  CHECK_THROWS_AS(Rational::parse("0.5"), InputError);
}

TEST_CASE("grid floor and ceil") {
  const Rational v(3, 4);
  CHECK(v.floor_mul(2) == 1);
  CHECK(v.ceil_mul(2) == 2);
  CHECK(v.floor_mul(4) == 3);
  CHECK(v.ceil_mul(4) == 3);
  CHECK(Rational(0).floor_mul(7) == 0);
  CHECK(Rational(-1, 3).floor_mul(1) == -1);
  CHECK(Rational(-1, 3).ceil_mul(1) == 0);
}

TEST_CASE("monus, min, max and cap") {
  CHECK(cdense::monus(Rational(1), Rational(1)) == Rational(0));
  CHECK(cdense::monus(Rational(3, 4), Rational(1, 4)) == Rational(1, 2));
  CHECK(cdense::monus(Rational(1, 4), Rational(3, 4)) == Rational(0));
  CHECK(cdense::rmin(Rational(1, 3), Rational(1, 2)) == Rational(1, 3));
  CHECK(cdense::rmax(Rational(1, 3), Rational(1, 2)) == Rational(1, 2));
  CHECK(cdense::cap1(Rational(5, 4)) == Rational(1));
  CHECK(cdense::cap1(Rational(1, 4)) == Rational(1, 4));
}

TEST_CASE("arithmetic is exact") {
  Rational acc(0);
  for (int k = 1; k <= 10; ++k) acc += Rational(1, k * (k + 1));
  CHECK(acc == Rational(10, 11));
  CHECK(Rational(1, 3) * Rational(3, 7) == Rational(1, 7));
  CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
  CHECK(Rational(1, 3).hash() == Rational(2, 6).hash());
}
