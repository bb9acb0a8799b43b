#include "iqsched/simulator.hpp"

#include <algorithm>

#include "iqsched/errors.hpp"

namespace iqsched {

const char* simEventName(SimEvent e) {
  switch (e) {
    case SimEvent::BatchStart: return "batch_start";
    case SimEvent::BatchEnd: return "batch_end";
    case SimEvent::AggStart: return "agg_start";
    case SimEvent::AggEnd: return "agg_end";
    case SimEvent::QueryAdd: return "query_add";
    case SimEvent::QueryRemove: return "query_remove";
    case SimEvent::DeadlineMiss: return "deadline_miss";
    case SimEvent::ArrivalMark: return "arrival_mark";
  }
  return "?";
}

std::optional<SimEvent> simEventFromName(const std::string& name) {
  static const std::pair<const char*, SimEvent> table[] = {
      {"batch_start", SimEvent::BatchStart}, {"batch_end", SimEvent::BatchEnd},
      {"agg_start", SimEvent::AggStart},     {"agg_end", SimEvent::AggEnd},
      {"query_add", SimEvent::QueryAdd},     {"query_remove", SimEvent::QueryRemove},
      {"deadline_miss", SimEvent::DeadlineMiss}, {"arrival_mark", SimEvent::ArrivalMark},
  };
  for (const auto& [n, e] : table)
    if (name == n) return e;
  return std::nullopt;
}

std::vector<Violation> validatePlan(const BatchPlan& plan, const Query& q) {
  std::vector<Violation> out;
  auto flag = [&out](ViolationKind k, std::string msg) {
    out.push_back({k, std::move(msg)});
  };

  TupleCount covered = 0;
  for (size_t i = 0; i < plan.batches.size(); ++i) {
    const Batch& b = plan.batches[i];
    if (b.tuples < 1)
      flag(ViolationKind::WindowCoverage,
           "constraint-1: batch " + std::to_string(i) + " is empty");
    covered += b.tuples;
    if (b.durationUs != evalCost(q.cost, b.tuples))
      flag(ViolationKind::CostMismatch,
           "batch " + std::to_string(i) + " duration " +
               std::to_string(b.durationUs) + "us, cost model says " +
               std::to_string(evalCost(q.cost, b.tuples)) + "us");
  }
  if (covered != q.profile.total())
    flag(ViolationKind::WindowCoverage,
         "constraint-1: batches cover " + std::to_string(covered) + " of " +
             std::to_string(q.profile.total()) + " tuples");

  for (size_t i = 0; i + 1 < plan.batches.size(); ++i) {
    const Batch& a = plan.batches[i];
    if (a.startUs + a.durationUs > plan.batches[i + 1].startUs)
      flag(ViolationKind::BatchOverlap,
           "constraint-2: batch " + std::to_string(i) + " runs past batch " +
               std::to_string(i + 1) + "'s start");
  }
  if (!plan.batches.empty()) {
    const Batch& last = plan.batches.back();
    if (last.startUs + last.durationUs > plan.finalAggStartUs)
      flag(ViolationKind::BatchOverlap,
           "constraint-2: last batch runs past the aggregation start");
  }
  if (planCompletion(plan) > q.deadlineUs)
    flag(ViolationKind::AggDeadline,
         "agg-deadline: aggregation ends at " +
             std::to_string(planCompletion(plan)) + "us, deadline " +
             std::to_string(q.deadlineUs) + "us");

  TupleCount prefix = 0;
  for (size_t i = 0; i < plan.batches.size(); ++i) {
    prefix += plan.batches[i].tuples;
    TupleCount have = tuplesAvailableAt(q.profile, plan.batches[i].startUs);
    if (have < prefix)
      flag(ViolationKind::TupleAvailability,
           "constraint-3: batch " + std::to_string(i) + " needs " +
               std::to_string(prefix) + " tuples, only " + std::to_string(have) +
               " arrived by its start");
  }

  Duration aggWant = evalAggCost(q.agg, (TupleCount)plan.batches.size());
  if (plan.finalAggDurationUs != aggWant)
    flag(ViolationKind::CostMismatch,
         "aggregation duration " + std::to_string(plan.finalAggDurationUs) +
             "us, cost model says " + std::to_string(aggWant) + "us");
  Duration sum = plan.finalAggDurationUs;
  for (const Batch& b : plan.batches) sum += b.durationUs;
  if (plan.totalCostUs != sum)
    flag(ViolationKind::CostMismatch, "totalCost field does not match durations");
  return out;
}

SimTrace executePlan(const BatchPlan& plan, const Query& q) {
  auto violations = validatePlan(plan, q);
  if (!violations.empty()) {
    std::string msg = "plan for " + q.id + " invalid:";
    for (const auto& v : violations) msg += " [" + v.message + "]";
    throw InvalidPlanError(msg);
  }
  SimTrace trace;
  for (const Batch& b : plan.batches) {
    trace.push_back({b.startUs, SimEvent::BatchStart, q.id, b.tuples, b.durationUs});
    trace.push_back({b.startUs + b.durationUs, SimEvent::BatchEnd, q.id, b.tuples,
                     b.durationUs});
  }
  trace.push_back({plan.finalAggStartUs, SimEvent::AggStart, q.id, 0,
                   plan.finalAggDurationUs});
  trace.push_back({planCompletion(plan), SimEvent::AggEnd, q.id, 0,
                   plan.finalAggDurationUs});
  return trace;
}

namespace {

struct BusySpan {
  TimePoint start = 0;
  TimePoint end = 0;
};

constexpr TimePoint kFarFuture = INT64_MAX / 4;

}  // namespace

std::vector<Violation> validateTrace(const SimTrace& trace,
                                     const std::vector<TraceCheckQuery>& queries,
                                     const TraceCheckOptions& options) {
  std::vector<Violation> out;
  auto flag = [&out](ViolationKind k, std::string msg) {
    out.push_back({k, std::move(msg)});
  };

  struct OpenSpan {
    bool open = false;
    TimePoint start = 0;
    Duration dur = 0;
    TupleCount tuples = 0;
  };
  struct QueryView {
    std::vector<std::pair<TimePoint, TupleCount>> claims;  // batch starts
    OpenSpan batch, agg;
    bool completed = false;
    TimePoint completionUs = 0;
    int missRows = 0;
  };
  std::map<std::string, QueryView> views;
  std::vector<BusySpan> busy;

  TimePoint prevTime = INT64_MIN;
  for (const TraceRow& row : trace) {
    if (row.timeUs < prevTime) {
      flag(ViolationKind::TraceShape, "time goes backwards at " +
                                          std::to_string(row.timeUs) + "us");
    }
    prevTime = row.timeUs;
    QueryView& qv = views[row.queryId];
    switch (row.event) {
      case SimEvent::BatchStart:
        if (qv.batch.open)
          flag(ViolationKind::TraceShape, row.queryId + ": nested batch start");
        qv.batch = {true, row.timeUs, row.durationUs, row.tuples};
        qv.claims.emplace_back(row.timeUs, row.tuples);
        if (row.durationUs > options.cMaxUs)
          flag(ViolationKind::CmaxExceeded,
               row.queryId + ": batch of " + std::to_string(row.durationUs) +
                   "us exceeds cap " + std::to_string(options.cMaxUs) + "us");
        break;
      case SimEvent::BatchEnd:
        if (!qv.batch.open || qv.batch.start + qv.batch.dur != row.timeUs ||
            qv.batch.tuples != row.tuples)
          flag(ViolationKind::TraceShape, row.queryId + ": unmatched batch end");
        else
          busy.push_back({qv.batch.start, row.timeUs});
        qv.batch.open = false;
        break;
      case SimEvent::AggStart:
        if (qv.agg.open)
          flag(ViolationKind::TraceShape, row.queryId + ": nested agg start");
        qv.agg = {true, row.timeUs, row.durationUs, 0};
        break;
      case SimEvent::AggEnd:
        if (!qv.agg.open || qv.agg.start + qv.agg.dur != row.timeUs)
          flag(ViolationKind::TraceShape, row.queryId + ": unmatched agg end");
        else
          busy.push_back({qv.agg.start, row.timeUs});
        qv.agg.open = false;
        qv.completed = true;
        qv.completionUs = row.timeUs;
        break;
      case SimEvent::DeadlineMiss:
        qv.missRows += 1;
        break;
      case SimEvent::QueryAdd:
      case SimEvent::QueryRemove:
      case SimEvent::ArrivalMark:
        break;
    }
  }
  for (const auto& [id, qv] : views) {
    if (qv.batch.open) flag(ViolationKind::TraceShape, id + ": batch never ends");
    if (qv.agg.open) flag(ViolationKind::TraceShape, id + ": agg never ends");
  }

  std::sort(busy.begin(), busy.end(),
            [](const BusySpan& a, const BusySpan& b) {
              return a.start < b.start || (a.start == b.start && a.end < b.end);
            });
  for (size_t i = 0; i + 1 < busy.size(); ++i) {
    if (busy[i].end > busy[i + 1].start)
      flag(ViolationKind::BatchOverlap,
           "processor overlap around " + std::to_string(busy[i + 1].start) + "us");
  }

  for (const TraceCheckQuery& tq : queries) {
    auto it = views.find(tq.id);
    if (it == views.end()) continue;
    const QueryView& qv = it->second;
    if (qv.completed) {
      bool late = qv.completionUs > tq.deadlineUs;
      if (late && qv.missRows == 0)
        flag(ViolationKind::TraceShape, tq.id + ": late but no deadline-miss row");
      if (!late && qv.missRows > 0)
        flag(ViolationKind::TraceShape, tq.id + ": deadline-miss row despite on-time finish");
    }
  }

  if (!options.checkNonIdling || queries.empty()) return out;

  // Merge busy spans, then make sure no query sat runnable inside a gap.  A
  // query is runnable once its unclaimed arrivals reach its min batch size,
  // or once its stream has fully arrived with work left.
  std::vector<BusySpan> merged;
  for (const BusySpan& s : busy) {
    if (!merged.empty() && s.start <= merged.back().end)
      merged.back().end = std::max(merged.back().end, s.end);
    else
      merged.push_back(s);
  }
  auto readyInGap = [&](TimePoint gapStart, TimePoint gapEnd) {
    for (const TraceCheckQuery& tq : queries) {
      const auto vit = views.find(tq.id);
      TupleCount claimed = 0;
      if (vit != views.end())
        for (const auto& [t, n] : vit->second.claims)
          if (t <= gapStart) claimed += n;
      TupleCount totalActual = tq.actual.total();
      if (claimed >= totalActual) continue;  // all work claimed by batches
      TimePoint readyArrival;
      if (claimed + tq.minBatchSize <= totalActual)
        readyArrival = std::min(inputTime(tq.actual, claimed + tq.minBatchSize),
                                windEndTime(tq.actual));
      else
        readyArrival = windEndTime(tq.actual);
      TimePoint ready = std::max({gapStart, tq.admitTimeUs, readyArrival});
      TimePoint horizon = gapEnd;
      if (tq.removeTimeUs) horizon = std::min(horizon, *tq.removeTimeUs);
      if (ready + options.pollPeriodUs < horizon)
        flag(ViolationKind::IdleWhileReady,
             tq.id + ": runnable at " + std::to_string(ready) +
                 "us but processor idle until " + std::to_string(gapEnd) + "us");
    }
  };
  TimePoint cursor = INT64_MIN / 2;  // idle since "forever" before the first span
  for (const BusySpan& s : merged) {
    if (s.start > cursor) readyInGap(cursor, s.start);
    cursor = std::max(cursor, s.end);
  }
  readyInGap(cursor, kFarFuture);  // nothing may be left runnable at the end
  return out;
}

Metrics computeMetrics(const SimTrace& trace, const std::vector<Query>& queries,
                       BaselineMode baseline) {
  Metrics m;
  for (const Query& q : queries) m.perQuery[q.id] = QueryMetrics{};
  for (const TraceRow& row : trace) {
    auto it = m.perQuery.find(row.queryId);
    if (it == m.perQuery.end()) continue;
    QueryMetrics& qm = it->second;
    switch (row.event) {
      case SimEvent::BatchEnd:
        qm.totalCostUs += row.durationUs;
        qm.numBatches += 1;
        break;
      case SimEvent::AggEnd:
        qm.totalCostUs += row.durationUs;
        qm.completed = true;
        qm.completionUs = row.timeUs;
        break;
      case SimEvent::DeadlineMiss:
        m.deadlineMissCount += 1;
        break;
      default:
        break;
    }
  }
  double ratioSum = 0.0;
  int ratioCount = 0;
  double costSum = 0.0, baseSum = 0.0;
  for (const Query& q : queries) {
    QueryMetrics& qm = m.perQuery[q.id];
    qm.deadlineMet = qm.completed && qm.completionUs <= q.deadlineUs;
    qm.tardinessUs =
        qm.completed ? std::max<Duration>(0, qm.completionUs - q.deadlineUs) : 0;
    Duration base = minCompCost(q);
    costSum += (double)qm.totalCostUs;
    baseSum += (double)base;
    if (base > 0) {
      ratioSum += (double)qm.totalCostUs / (double)base;
      ratioCount += 1;
    }
  }
  if (baseline == BaselineMode::SingleBatchMin)
    m.normalizedCost = ratioCount > 0 ? ratioSum / ratioCount : 0.0;
  else
    m.normalizedCost = baseSum > 0.0 ? costSum / baseSum : 0.0;
  return m;
}

}  // namespace iqsched
