#include "iqsched/dynamic_sched.hpp"

#include <algorithm>
#include <map>

#include "iqsched/errors.hpp"

namespace iqsched {

const char* schedPolicyName(SchedPolicy p) {
  switch (p) {
    case SchedPolicy::Edf: return "edf";
    case SchedPolicy::Llf: return "llf";
    case SchedPolicy::Sjf: return "sjf";
    case SchedPolicy::Rr: return "rr";
  }
  return "?";
}

std::optional<SchedPolicy> schedPolicyFromName(const std::string& name) {
  if (name == "edf") return SchedPolicy::Edf;
  if (name == "llf") return SchedPolicy::Llf;
  if (name == "sjf") return SchedPolicy::Sjf;
  if (name == "rr") return SchedPolicy::Rr;
  return std::nullopt;
}

const char* rateModeName(RateMode m) {
  switch (m) {
    case RateMode::FixedKnownTotal: return "fixed_known_total";
    case RateMode::VariableKnownTotal: return "variable_known_total";
    case RateMode::VariableEstimatedTotal: return "variable_estimated_total";
  }
  return "?";
}

std::optional<RateMode> rateModeFromName(const std::string& name) {
  if (name == "fixed_known_total") return RateMode::FixedKnownTotal;
  if (name == "variable_known_total") return RateMode::VariableKnownTotal;
  if (name == "variable_estimated_total") return RateMode::VariableEstimatedTotal;
  return std::nullopt;
}

Duration totalBatchedCost(const CostModel& cost, const AggCostModel& agg,
                          TupleCount totalTuples, TupleCount batchSize) {
  if (totalTuples <= 0) return 0;
  batchSize = std::clamp<TupleCount>(batchSize, 1, totalTuples);
  TupleCount k = (totalTuples + batchSize - 1) / batchSize;
  TupleCount rem = totalTuples - (k - 1) * batchSize;
  Duration d = (k - 1) * evalCost(cost, batchSize) + evalCost(cost, rem);
  return satAddUs(d, evalAggCost(agg, k));
}

MinBatchSizeResult findMinBatchSize(const CostModel& cost, const AggCostModel& agg,
                                    TupleCount totalTuples, Rational rsf,
                                    Duration cMaxUs) {
  if (rsf.num < 0) throw InvalidModelError("rsf must be non-negative");
  if (totalTuples <= 0) return {1, false};
  TupleCount capFit =
      std::min(totalTuples, estimateTuplesProcessed(cost, cMaxUs));
  if (capFit < 1)
    throw CmaxTooSmallError("no batch of even one tuple fits in " +
                            std::to_string(cMaxUs) + "us");
  const TupleCount lo =
      std::min(std::max<TupleCount>(1, 2 * agg.numGroups()), totalTuples);
  const Duration minCost = evalCost(cost, totalTuples);
  // budget: batched cost <= (1 + rsf) * one-batch minimum, compared exactly
  const __int128 budgetRhs = (__int128)minCost * (rsf.den + rsf.num);
  for (TupleCount x = lo; x <= capFit; ++x) {
    __int128 lhs = (__int128)totalBatchedCost(cost, agg, totalTuples, x) * rsf.den;
    if (lhs <= budgetRhs) return {x, false};
  }
  return {capFit, true};
}

MinBatchSizeResult findMinBatchSize(const Query& q, Rational rsf, Duration cMaxUs) {
  return findMinBatchSize(q.cost, q.agg, q.profile.total(), rsf, cMaxUs);
}

Duration computeLaxity(const DynamicQueryState& s, TimePoint now) {
  TupleCount pending = std::max<TupleCount>(0, s.totalEstimate - s.processedTuples);
  TupleCount mbs = std::max<TupleCount>(1, s.minBatchSize);
  TupleCount k = pending > 0 ? (pending + mbs - 1) / mbs : 0;
  Duration remaining = 0;
  if (k > 0) {
    TupleCount rem = pending - (k - 1) * mbs;
    remaining = (k - 1) * evalCost(s.query.cost, mbs) + evalCost(s.query.cost, rem);
  }
  remaining = satAddUs(remaining, evalAggCost(s.query.agg, s.batchesDone + k));
  return s.query.deadlineUs - now - remaining;
}

namespace {

TupleCount plannedBatchSize(const DynamicQueryState& s, TimePoint now,
                            const SchedulerConfig& config) {
  TupleCount unclaimed = tuplesAvailableAt(s.actual, now) - s.processedTuples;
  TupleCount size;
  if (config.greedyBatch) {
    TupleCount cap = estimateTuplesProcessed(s.query.cost, config.cMaxUs);
    size = std::min(unclaimed, cap);
  } else {
    size = std::min<TupleCount>(s.minBatchSize, unclaimed);
  }
  return std::max<TupleCount>(1, size);
}

}  // namespace

void refreshReadiness(std::vector<DynamicQueryState>& states, TimePoint now,
                      const SchedulerConfig& config) {
  for (DynamicQueryState& s : states) {
    if (s.status != QueryStatus::Waiting && s.status != QueryStatus::Ready)
      continue;
    TupleCount avail = tuplesAvailableAt(s.actual, now);
    if (config.rateMode == RateMode::VariableEstimatedTotal) {
      TupleCount est = estimateTotalTuples(s.query.profile, avail, now);
      est = std::max(est, s.processedTuples);
      if (est != s.totalEstimate) {
        s.totalEstimate = est;
        auto r = findMinBatchSize(s.query.cost, s.query.agg,
                                  std::max<TupleCount>(est, 1), config.rsf,
                                  config.cMaxUs);
        s.minBatchSize = r.size;
        s.budgetExceeded = r.budgetExceeded;
      }
    }
    TupleCount target = std::min(s.processedTuples + s.minBatchSize,
                                 s.query.profile.total());
    s.estMaturityUs = inputTime(s.query.profile, target);

    TupleCount unclaimed = avail - s.processedTuples;
    bool ready = unclaimed >= s.minBatchSize;
    if (!ready && avail >= s.actual.total() && unclaimed >= 1) ready = true;
    if (!ready && config.rateMode != RateMode::FixedKnownTotal &&
        now >= s.estMaturityUs && unclaimed >= 1)
      ready = true;
    s.status = ready ? QueryStatus::Ready : QueryStatus::Waiting;
    if (ready) s.slackTimeUs = computeLaxity(s, now);
  }
}

int selectNext(const std::vector<DynamicQueryState>& states, TimePoint now,
               const SchedulerConfig& config, const std::string& rrCursor) {
  std::vector<int> ready;
  for (size_t i = 0; i < states.size(); ++i)
    if (states[i].status == QueryStatus::Ready) ready.push_back((int)i);
  if (ready.empty()) return -1;

  if (config.policy == SchedPolicy::Rr) {
    // cycle through ready queries in id order, continuing past the last one
    // served
    int first = -1, afterCursor = -1;
    for (int i : ready) {
      const std::string& id = states[i].query.id;
      if (first < 0 || id < states[first].query.id) first = i;
      if (id > rrCursor && (afterCursor < 0 || id < states[afterCursor].query.id))
        afterCursor = i;
    }
    return afterCursor >= 0 ? afterCursor : first;
  }

  auto keyOf = [&](int i) -> Duration {
    const DynamicQueryState& s = states[i];
    switch (config.policy) {
      case SchedPolicy::Edf: return s.query.deadlineUs;
      case SchedPolicy::Llf: return s.slackTimeUs;
      case SchedPolicy::Sjf:
        return evalCost(s.query.cost, plannedBatchSize(s, now, config));
      default: return 0;
    }
  };
  int best = ready[0];
  Duration bestKey = keyOf(best);
  for (size_t j = 1; j < ready.size(); ++j) {
    int i = ready[j];
    Duration k = keyOf(i);
    const DynamicQueryState& a = states[i];
    const DynamicQueryState& b = states[best];
    if (k < bestKey ||
        (k == bestKey && (a.query.deadlineUs < b.query.deadlineUs ||
                          (a.query.deadlineUs == b.query.deadlineUs &&
                           a.query.id < b.query.id)))) {
      best = i;
      bestKey = k;
    }
  }
  return best;
}

SimRun runDynamic(const EventList& events, const SchedulerConfig& config) {
  if (config.processors != 1)
    throw ConfigError("only a single processor is supported");
  if (config.cMaxUs <= 0) throw ConfigError("cMax must be positive");
  if (config.rsf.num < 0) throw ConfigError("rsf must be non-negative");

  struct Ev {
    TimePoint t;
    int kind;  // 0 arrival, 1 removal; arrivals first at equal times
    size_t idx;
  };
  std::vector<Ev> evs;
  for (size_t i = 0; i < events.arrivals.size(); ++i)
    evs.push_back({events.arrivals[i].timeUs, 0, i});
  for (size_t i = 0; i < events.removals.size(); ++i)
    evs.push_back({events.removals[i].timeUs, 1, i});
  std::stable_sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) {
    return a.t < b.t || (a.t == b.t && a.kind < b.kind);
  });

  SimRun run;
  std::vector<DynamicQueryState>& states = run.finalStates;
  SimTrace& trace = run.trace;
  std::map<std::string, size_t> byId;
  std::map<std::string, TimePoint> missMarks;      // deadline rows still owed
  std::map<std::string, TimePoint> arrivalMarks;   // window-end annotations
  std::vector<TupleCount> maxMbs;                  // for the trace validator
  std::vector<std::optional<TimePoint>> removedAt;

  size_t evCursor = 0;
  int runningIdx = -1;
  TimePoint busyUntil = 0;
  std::string rrCursor;
  TimePoint now = INT64_MIN;

  auto finishQuery = [&](size_t i) {
    states[i].status = QueryStatus::Done;
    missMarks.erase(states[i].query.id);
  };
  auto removeQuery = [&](size_t i, TimePoint t) {
    states[i].status = QueryStatus::Removed;
    removedAt[i] = t;
    missMarks.erase(states[i].query.id);
    trace.push_back({t, SimEvent::QueryRemove, states[i].query.id, 0, 0});
  };

  const Duration poll = config.cMaxUs;
  auto floorDivT = [](TimePoint a, Duration b) {
    TimePoint q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
  };

  for (;;) {
    TimePoint wake = INT64_MAX;
    bool anyActive = runningIdx >= 0 || evCursor < evs.size();
    if (runningIdx >= 0) wake = std::min(wake, busyUntil);
    if (evCursor < evs.size()) wake = std::min(wake, evs[evCursor].t);
    for (const auto& [id, t] : missMarks) wake = std::min(wake, t);
    for (const auto& [id, t] : arrivalMarks) wake = std::min(wake, t);
    for (const DynamicQueryState& s : states) {
      if (s.status == QueryStatus::Ready) anyActive = true;
      if (s.status != QueryStatus::Waiting) continue;
      anyActive = true;
      // next arrival-driven trigger; maturity triggers are tied to arrivals
      // too, so the earliest unclaimed-tuple instant covers them
      TupleCount claimed = s.processedTuples;
      TimePoint trigger;
      if (claimed + s.minBatchSize <= s.actual.total())
        trigger = inputTime(s.actual, claimed + s.minBatchSize);
      else
        trigger = windEndTime(s.actual);
      if (config.rateMode != RateMode::FixedKnownTotal &&
          claimed + 1 <= s.actual.total()) {
        TimePoint maturity =
            std::max(s.estMaturityUs, inputTime(s.actual, claimed + 1));
        trigger = std::min(trigger, maturity);
      }
      wake = std::min(wake, std::max(trigger, now + 1));
    }
    if (config.strictPolling && anyActive && now != INT64_MIN)
      wake = std::min(wake, (floorDivT(now, poll) + 1) * poll);
    if (wake == INT64_MAX) break;
    now = wake;

    // 1) batch completion
    if (runningIdx >= 0 && busyUntil <= now) {
      DynamicQueryState& s = states[(size_t)runningIdx];
      s.batchesDone += 1;
      if (s.processedTuples >= s.actual.total())
        finishQuery((size_t)runningIdx);
      else if (s.removeRequested)
        removeQuery((size_t)runningIdx, now);
      else
        s.status = QueryStatus::Waiting;
      runningIdx = -1;
    }

    // 2) queries arriving / being withdrawn
    while (evCursor < evs.size() && evs[evCursor].t <= now) {
      const Ev& ev = evs[evCursor++];
      if (ev.kind == 0) {
        const QueryArrival& a = events.arrivals[ev.idx];
        validateQuery(a.query);
        if (byId.count(a.query.id))
          throw ConfigError("duplicate query id " + a.query.id);
        DynamicQueryState s;
        s.query = a.query;
        s.actual = a.actualProfile.value_or(a.query.profile);
        s.admitTimeUs = ev.t;
        s.totalEstimate = s.query.profile.total();
        trace.push_back({ev.t, SimEvent::QueryAdd, s.query.id,
                         s.query.profile.total(), 0});
        if (s.actual.total() == 0) {
          // nothing will arrive: the (empty) aggregation completes on the spot
          trace.push_back({ev.t, SimEvent::AggStart, s.query.id, 0, 0});
          trace.push_back({ev.t, SimEvent::AggEnd, s.query.id, 0, 0});
          s.status = QueryStatus::Done;
        } else {
          auto r = findMinBatchSize(s.query.cost, s.query.agg,
                                    std::max<TupleCount>(s.totalEstimate, 1),
                                    config.rsf, config.cMaxUs);
          s.minBatchSize = r.size;
          s.budgetExceeded = r.budgetExceeded;
          missMarks[s.query.id] = s.query.deadlineUs;
          arrivalMarks[s.query.id] = windEndTime(s.actual);
        }
        byId[s.query.id] = states.size();
        states.push_back(std::move(s));
        maxMbs.push_back(states.back().minBatchSize);
        removedAt.push_back(std::nullopt);
      } else {
        const QueryRemoval& r = events.removals[ev.idx];
        auto it = byId.find(r.queryId);
        if (it == byId.end())
          throw ConfigError("removal of unknown query " + r.queryId);
        DynamicQueryState& s = states[it->second];
        if (s.status == QueryStatus::Running)
          s.removeRequested = true;  // takes effect after the running batch
        else if (s.status == QueryStatus::Waiting ||
                 s.status == QueryStatus::Ready)
          removeQuery(it->second, ev.t);
      }
    }

    // 3) deadline passed with the query still incomplete
    for (auto it = missMarks.begin(); it != missMarks.end();) {
      if (it->second <= now) {
        trace.push_back({it->second, SimEvent::DeadlineMiss, it->first, 0, 0});
        it = missMarks.erase(it);
      } else {
        ++it;
      }
    }
    for (auto it = arrivalMarks.begin(); it != arrivalMarks.end();) {
      if (it->second <= now) {
        size_t i = byId[it->first];
        trace.push_back({it->second, SimEvent::ArrivalMark, it->first,
                         states[i].actual.total(), 0});
        it = arrivalMarks.erase(it);
      } else {
        ++it;
      }
    }

    // 4) estimates and readiness
    refreshReadiness(states, now, config);
    for (size_t i = 0; i < states.size(); ++i)
      maxMbs[i] = std::max(maxMbs[i], states[i].minBatchSize);

    // 5) hand the processor to someone
    bool canDecide = true;
    if (config.strictPolling) {
      TimePoint tick = floorDivT(now, poll) * poll;
      canDecide = tick == now;
    }
    if (runningIdx < 0 && canDecide) {
      int pick = selectNext(states, now, config, rrCursor);
      if (pick >= 0) {
        DynamicQueryState& s = states[(size_t)pick];
        TupleCount size = plannedBatchSize(s, now, config);
        Duration dur = evalCost(s.query.cost, size);
        s.processedTuples += size;
        bool folded = s.processedTuples >= s.actual.total();
        Duration aggDur =
            folded ? evalAggCost(s.query.agg, s.batchesDone + 1) : 0;
        trace.push_back({now, SimEvent::BatchStart, s.query.id, size, dur});
        trace.push_back({now + dur, SimEvent::BatchEnd, s.query.id, size, dur});
        if (folded) {
          trace.push_back({now + dur, SimEvent::AggStart, s.query.id, 0, aggDur});
          trace.push_back(
              {now + dur + aggDur, SimEvent::AggEnd, s.query.id, 0, aggDur});
        }
        busyUntil = now + dur + aggDur;
        s.status = QueryStatus::Running;
        rrCursor = s.query.id;
        runningIdx = pick;
      }
    }
  }

  std::stable_sort(trace.begin(), trace.end(),
                   [](const TraceRow& a, const TraceRow& b) {
                     return a.timeUs < b.timeUs;
                   });
  for (size_t i = 0; i < states.size(); ++i) {
    run.queries.push_back(states[i].query);
    TraceCheckQuery tc;
    tc.id = states[i].query.id;
    tc.actual = states[i].actual;
    tc.minBatchSize = maxMbs[i];
    tc.deadlineUs = states[i].query.deadlineUs;
    tc.admitTimeUs = states[i].admitTimeUs;
    tc.removeTimeUs = removedAt[i];
    run.checkInfo.push_back(std::move(tc));
  }
  return run;
}

}  // namespace iqsched
