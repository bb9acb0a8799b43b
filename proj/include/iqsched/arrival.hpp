#pragma once

#include <vector>

#include "iqsched/errors.hpp"
#include "iqsched/units.hpp"

namespace iqsched {

struct TracePoint {
  TimePoint timeUs = 0;
  TupleCount cumulative = 0;
};

// Cumulative tuple-arrival curve for one input stream.
//
// FixedRate delivers tuple k (1-based) at startTime + (k-1)/rate, so the
// first tuple is countable exactly at startTime and arrivals stop at
// startTime + (total-1)/rate.  Trace interpolates a piecewise-linear
// cumulative count between explicit points (counts are floored to whole
// tuples between points), which is how bursty / late-finishing arrival
// shapes are described.
class ArrivalProfile {
 public:
  enum class Kind { FixedRate, Trace };

  ArrivalProfile() = default;  // empty stream

  static ArrivalProfile fixedRate(TimePoint startUs, Rational ratePerSec,
                                  TupleCount total);
  static ArrivalProfile trace(std::vector<TracePoint> points);

  Kind kind() const { return kind_; }
  TupleCount total() const { return total_; }
  TimePoint startTime() const { return startUs_; }
  Rational ratePerSec() const { return ratePerSec_; }
  const std::vector<TracePoint>& points() const { return points_; }

 private:
  Kind kind_ = Kind::FixedRate;
  TimePoint startUs_ = 0;       // FixedRate: first arrival; Trace: first point
  Rational ratePerSec_{0, 1};
  TupleCount total_ = 0;
  std::vector<TracePoint> points_;
};

// Number of tuples that have arrived by time t (inclusive).
TupleCount tuplesAvailableAt(const ArrivalProfile& profile, TimePoint t);

// Earliest time with at least n tuples available; inputTime(p, 0) is the
// profile start.  n beyond the declared total is a caller bug.
TimePoint inputTime(const ArrivalProfile& profile, TupleCount n);

// First / last arrival instants.
TimePoint windStartTime(const ArrivalProfile& profile);
TimePoint windEndTime(const ArrivalProfile& profile);

// Rescales the declared total by the ratio of observed arrivals to what the
// expected profile predicts at `now` (rounded to nearest).  Before any
// expected arrivals there is nothing to scale by and the declared total is
// returned unchanged.
TupleCount estimateTotalTuples(const ArrivalProfile& expected, TupleCount observed,
                               TimePoint now);

ArrivalProfile shiftProfile(const ArrivalProfile& profile, Duration offsetUs);

}  // namespace iqsched
