#include <catch2/catch_amalgamated.hpp>

#include "qsolve/rational.hpp"

using namespace qsolve;

TEST_CASE("construction canonicalizes") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational("6/9") == Rational(2, 3));
  CHECK_THROWS_AS(Rational(1, 0), arithmetic_error);
}

TEST_CASE("arithmetic") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(-a == Rational(-1, 3));
  CHECK_THROWS_AS(a / Rational(0), arithmetic_error);
}

TEST_CASE("ordering and predicates") {
  CHECK(Rational(-1, 2) < Rational(1, 3));
  CHECK(Rational(5).is_integer());
  CHECK_FALSE(Rational(5, 2).is_integer());
  CHECK(Rational(-3).is_negative());
  CHECK(Rational(0).is_zero());
  CHECK(Rational(7, 2).sign() == 1);
}

TEST_CASE("mod gives nonnegative remainders") {
  CHECK(Rational(7).mod(Rational(3)) == Rational(1));
  CHECK(Rational(-7).mod(Rational(3)) == Rational(2));
  CHECK(Rational(-7).mod(Rational(-3)) == Rational(2));
  CHECK(Rational(6).mod(Rational(3)) == Rational(0));
  CHECK_THROWS_AS(Rational(1, 2).mod(Rational(3)), sort_error);
  CHECK_THROWS_AS(Rational(5).mod(Rational(0)), arithmetic_error);
}

TEST_CASE("divides") {
  CHECK(Rational(3).divides(Rational(12)));
  CHECK(Rational(3).divides(Rational(-12)));
  CHECK_FALSE(Rational(5).divides(Rational(12)));
  CHECK(Rational(1).divides(Rational(0)));
}

TEST_CASE("floor ceil abs") {
  CHECK(Rational(7, 2).floor() == Rational(3));
  CHECK(Rational(-7, 2).floor() == Rational(-4));
  CHECK(Rational(7, 2).ceil() == Rational(4));
  CHECK(Rational(-7, 2).ceil() == Rational(-3));
  CHECK(Rational(-5, 3).abs() == Rational(5, 3));
}

TEST_CASE("gcd lcm") {
  CHECK(Rational::gcd(Rational(12), Rational(18)) == Rational(6));
  CHECK(Rational::gcd(Rational(-12), Rational(18)) == Rational(6));
  CHECK(Rational::lcm(Rational(4), Rational(6)) == Rational(12));
}

TEST_CASE("string round trip") {
  CHECK(Rational("22/7").str() == "22/7");
  CHECK(Rational(-3).str() == "-3");
}
