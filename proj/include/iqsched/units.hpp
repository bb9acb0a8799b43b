#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace iqsched {

// All wall-clock quantities are integer microseconds so schedule arithmetic is
// exact and runs are reproducible bit-for-bit.
using TimePoint = std::int64_t;  // microseconds since scenario epoch
using Duration = std::int64_t;   // microseconds
using TupleCount = std::int64_t;

constexpr Duration kUsPerMs = 1000;
constexpr Duration kUsPerSec = 1000000;

constexpr Duration msToUs(std::int64_t ms) { return ms * kUsPerMs; }
constexpr Duration secToUs(std::int64_t s) { return s * kUsPerSec; }

// Saturation level for durations that are effectively "never" / "unbounded".
constexpr Duration kDurationCap = INT64_MAX / 8;

// Cap on the open-ended inverse of a cost model: for a model that is flat
// beyond some point every tuple count has the same cost, so "max tuples within
// d" has no finite answer and we report this bound instead.
constexpr TupleCount kTupleSearchCap = 1000000000000LL;  // 1e12

inline Duration satAddUs(Duration a, Duration b) {
  if (a >= kDurationCap || b >= kDurationCap) return kDurationCap;
  Duration s = a + b;
  return s >= kDurationCap ? kDurationCap : s;
}

// ceil(a / b) for b > 0, exact for the full int64 range via 128-bit widening.
inline std::int64_t ceilDiv128(__int128 a, __int128 b) {
  __int128 q = a / b;
  if (a % b != 0 && ((a > 0) == (b > 0))) q += 1;
  if (q > (__int128)INT64_MAX) return INT64_MAX;
  if (q < (__int128)INT64_MIN) return INT64_MIN;
  return (std::int64_t)q;
}

inline std::int64_t floorDiv128(__int128 a, __int128 b) {
  __int128 q = a / b;
  if (a % b != 0 && ((a > 0) != (b > 0))) q -= 1;
  if (q > (__int128)INT64_MAX) return INT64_MAX;
  if (q < (__int128)INT64_MIN) return INT64_MIN;
  return (std::int64_t)q;
}

// Exact non-negative rational, used for rate/scale factors that arrive as
// decimal strings (e.g. rsf 0.5, deadline factor 0.4).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    reduce();
  }
  static Rational whole(std::int64_t n) { return Rational(n, 1); }

  void reduce() {
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  bool isZero() const { return num == 0; }
  double toDouble() const { return (double)num / (double)den; }

  // floor(v * num / den)
  std::int64_t scaleFloor(std::int64_t v) const {
    return floorDiv128((__int128)v * num, den);
  }
  // round-to-nearest (half away from zero)
  std::int64_t scaleRound(std::int64_t v) const {
    __int128 p = (__int128)v * num * 2 + (v < 0 ? -den : den);
    return (std::int64_t)(p / ((__int128)den * 2));
  }
};

inline bool operator==(const Rational& a, const Rational& b) {
  return (__int128)a.num * b.den == (__int128)b.num * a.den;
}
inline bool operator<(const Rational& a, const Rational& b) {
  return (__int128)a.num * b.den < (__int128)b.num * a.den;
}

// Parses a plain decimal ("2", "0.5", "1.25") into an exact rational.
// Exponents and other float syntax are rejected: scenario knobs are meant to
// be simple human-written numbers.
Rational parseDecimal(const std::string& text);

}  // namespace iqsched
