#include "iqsched/arrival.hpp"

#include <algorithm>
#include <string>

namespace iqsched {

ArrivalProfile ArrivalProfile::fixedRate(TimePoint startUs, Rational ratePerSec,
                                         TupleCount total) {
  if (total < 0) throw InvalidModelError("negative tuple total");
  if (total > 0 && ratePerSec.num <= 0)
    throw InvalidModelError("fixed-rate profile needs a positive rate");
  ArrivalProfile p;
  p.kind_ = Kind::FixedRate;
  p.startUs_ = startUs;
  p.ratePerSec_ = ratePerSec;
  p.total_ = total;
  return p;
}

ArrivalProfile ArrivalProfile::trace(std::vector<TracePoint> points) {
  if (points.empty()) throw InvalidModelError("trace profile needs points");
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].cumulative < 0)
      throw InvalidModelError("trace cumulative count must be non-negative");
    if (i > 0) {
      if (points[i].timeUs <= points[i - 1].timeUs)
        throw InvalidModelError("trace times must be strictly increasing");
      if (points[i].cumulative < points[i - 1].cumulative)
        throw InvalidModelError("trace counts must be non-decreasing");
    }
  }
  ArrivalProfile p;
  p.kind_ = Kind::Trace;
  p.startUs_ = points.front().timeUs;
  p.total_ = points.back().cumulative;
  p.points_ = std::move(points);
  return p;
}

TupleCount tuplesAvailableAt(const ArrivalProfile& profile, TimePoint t) {
  if (profile.total() == 0) return 0;
  if (profile.kind() == ArrivalProfile::Kind::FixedRate) {
    if (t < profile.startTime()) return 0;
    const Rational r = profile.ratePerSec();
    // tuple k arrives at start + (k-1)/rate  =>  count = floor(rate*dt) + 1
    TupleCount k =
        floorDiv128((__int128)r.num * (t - profile.startTime()), (__int128)r.den * kUsPerSec) + 1;
    return std::min(profile.total(), k);
  }
  const auto& pts = profile.points();
  if (t < pts.front().timeUs) return 0;
  if (t >= pts.back().timeUs) return profile.total();
  size_t hi = 1;
  while (pts[hi].timeUs <= t) ++hi;
  const auto& a = pts[hi - 1];
  const auto& b = pts[hi];
  __int128 rise = (__int128)(b.cumulative - a.cumulative) * (t - a.timeUs);
  return a.cumulative + floorDiv128(rise, b.timeUs - a.timeUs);
}

TimePoint inputTime(const ArrivalProfile& profile, TupleCount n) {
  if (n > profile.total())
    throw TooManyTuplesError("inputTime for " + std::to_string(n) +
                             " tuples, profile total is " +
                             std::to_string(profile.total()));
  if (n <= 0) return profile.startTime();
  if (profile.kind() == ArrivalProfile::Kind::FixedRate) {
    const Rational r = profile.ratePerSec();
    return profile.startTime() +
           ceilDiv128((__int128)(n - 1) * r.den * kUsPerSec, r.num);
  }
  const auto& pts = profile.points();
  if (n <= pts.front().cumulative) return pts.front().timeUs;
  size_t hi = 1;
  while (pts[hi].cumulative < n) ++hi;
  const auto& a = pts[hi - 1];
  const auto& b = pts[hi];
  // smallest integer t with interpolated count >= n
  __int128 need = (__int128)(n - a.cumulative) * (b.timeUs - a.timeUs);
  return a.timeUs + ceilDiv128(need, b.cumulative - a.cumulative);
}

TimePoint windStartTime(const ArrivalProfile& profile) {
  return inputTime(profile, std::min<TupleCount>(1, profile.total()));
}

TimePoint windEndTime(const ArrivalProfile& profile) {
  return inputTime(profile, profile.total());
}

TupleCount estimateTotalTuples(const ArrivalProfile& expected, TupleCount observed,
                               TimePoint now) {
  if (observed < 0) throw InvalidModelError("negative observed tuple count");
  TupleCount predicted = tuplesAvailableAt(expected, now);
  if (predicted <= 0) return expected.total();
  __int128 scaled = (__int128)expected.total() * observed * 2 + predicted;
  return (TupleCount)(scaled / ((__int128)predicted * 2));
}

ArrivalProfile shiftProfile(const ArrivalProfile& profile, Duration offsetUs) {
  if (profile.kind() == ArrivalProfile::Kind::FixedRate)
    return ArrivalProfile::fixedRate(profile.startTime() + offsetUs,
                                     profile.ratePerSec(), profile.total());
  std::vector<TracePoint> pts = profile.points();
  for (auto& p : pts) p.timeUs += offsetUs;
  return ArrivalProfile::trace(std::move(pts));
}

}  // namespace iqsched
