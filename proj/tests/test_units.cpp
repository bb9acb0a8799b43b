#include "doctest.h"
#include "iqsched/units.hpp"

using namespace iqsched;

TEST_SUITE("units") {

TEST_CASE("ceilDiv128 rounds toward positive infinity") {
  CHECK(ceilDiv128(7, 2) == 4);
  CHECK(ceilDiv128(8, 2) == 4);
  CHECK(ceilDiv128(-7, 2) == -3);
  CHECK(ceilDiv128(0, 5) == 0);
  CHECK(ceilDiv128(1, 1000) == 1);
  CHECK(ceilDiv128((__int128)INT64_MAX * 3, 3) == INT64_MAX);
  // quotients beyond int64 clamp instead of wrapping
  CHECK(ceilDiv128((__int128)INT64_MAX * 3, 1) == INT64_MAX);
  CHECK(ceilDiv128((__int128)INT64_MIN * 3, 1) == INT64_MIN);
}

TEST_CASE("floorDiv128 rounds toward negative infinity") {
  CHECK(floorDiv128(7, 2) == 3);
  CHECK(floorDiv128(-7, 2) == -4);
  CHECK(floorDiv128(-8, 2) == -4);
  CHECK(floorDiv128(9, 3) == 3);
}

TEST_CASE("satAddUs saturates at the duration cap") {
  CHECK(satAddUs(3, 4) == 7);
  CHECK(satAddUs(kDurationCap, 1) == kDurationCap);
  CHECK(satAddUs(kDurationCap - 1, 2) == kDurationCap);
  CHECK(satAddUs(kDurationCap, kDurationCap) == kDurationCap);
}

TEST_CASE("rationals reduce and normalize sign") {
  Rational r(2, 4);
  CHECK(r.num == 1);
  CHECK(r.den == 2);
  Rational n(1, -2);
  CHECK(n.num == -1);
  CHECK(n.den == 2);
  CHECK(Rational::whole(3).num == 3);
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("rational comparison is exact cross-multiplication") {
  CHECK(Rational(1, 2) == Rational(2, 4));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK_FALSE(Rational(2, 3) < Rational(2, 3));
  // values whose cross products overflow 64 bits still compare correctly
  Rational big1(INT64_MAX / 3, 1), big2(INT64_MAX / 3 + 1, 1);
  CHECK(big1 < big2);
}

TEST_CASE("scaleFloor and scaleRound") {
  CHECK(Rational(1, 2).scaleFloor(5) == 2);
  CHECK(Rational(2, 3).scaleFloor(-5) == -4);
  CHECK(Rational(1, 2).scaleRound(5) == 3);   // half away from zero
  CHECK(Rational(1, 2).scaleRound(-5) == -3);
  CHECK(Rational(1, 1).scaleRound(41) == 41);
  CHECK(Rational(0, 1).scaleFloor(100) == 0);
}

TEST_CASE("parseDecimal handles plain decimals only") {
  CHECK(parseDecimal("2") == Rational(2, 1));
  CHECK(parseDecimal("0.5") == Rational(1, 2));
  CHECK(parseDecimal("1.25") == Rational(5, 4));
  CHECK(parseDecimal("0.125") == Rational(1, 8));
  CHECK(parseDecimal(".5") == Rational(1, 2));
  CHECK(parseDecimal("-1.5") == Rational(-3, 2));
  CHECK_THROWS_AS(parseDecimal("1e5"), std::invalid_argument);
  CHECK_THROWS_AS(parseDecimal("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parseDecimal(""), std::invalid_argument);
  CHECK_THROWS_AS(parseDecimal("1.2.3"), std::invalid_argument);
}

}  // TEST_SUITE
