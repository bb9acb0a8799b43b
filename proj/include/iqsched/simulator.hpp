#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iqsched/query.hpp"

namespace iqsched {

enum class SimEvent {
  BatchStart,
  BatchEnd,
  AggStart,
  AggEnd,
  QueryAdd,
  QueryRemove,
  DeadlineMiss,
  ArrivalMark,
};

const char* simEventName(SimEvent e);
std::optional<SimEvent> simEventFromName(const std::string& name);

struct TraceRow {
  TimePoint timeUs = 0;
  SimEvent event = SimEvent::BatchStart;
  std::string queryId;
  TupleCount tuples = 0;    // batch size / arrival count, 0 for other rows
  Duration durationUs = 0;  // batch or aggregation duration, 0 otherwise
};

inline bool operator==(const TraceRow& a, const TraceRow& b) {
  return a.timeUs == b.timeUs && a.event == b.event && a.queryId == b.queryId &&
         a.tuples == b.tuples && a.durationUs == b.durationUs;
}

using SimTrace = std::vector<TraceRow>;

enum class ViolationKind {
  WindowCoverage,     // batch sizes don't add up to the window total
  BatchOverlap,       // batches out of order or overlapping
  TupleAvailability,  // a batch starts before its tuples have arrived
  AggDeadline,        // aggregation not finished by the deadline
  CostMismatch,       // recorded duration disagrees with the cost model
  TraceShape,         // malformed trace (unpaired rows, time going backwards)
  CmaxExceeded,       // a batch ran longer than the configured cap
  IdleWhileReady,     // processor idled while some query had a runnable batch
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

// Checks a single-query plan against the window it claims to cover:
// (1) coverage, (2) ordering/non-overlap through the aggregation pass,
// (3) tuple availability, aggregation deadline, and model-consistent
// durations.
std::vector<Violation> validatePlan(const BatchPlan& plan, const Query& q);

// Replays a valid plan into a trace (throws InvalidPlanError otherwise).
SimTrace executePlan(const BatchPlan& plan, const Query& q);

// What the trace validator needs to know about each query in a run.
struct TraceCheckQuery {
  std::string id;
  ArrivalProfile actual;
  TupleCount minBatchSize = 1;
  TimePoint deadlineUs = 0;
  TimePoint admitTimeUs = 0;
  std::optional<TimePoint> removeTimeUs;
};

struct TraceCheckOptions {
  Duration cMaxUs = kDurationCap;
  bool checkNonIdling = true;
  // When decisions only happen on a polling tick, a ready query may sit for
  // up to one period before the processor notices it.
  Duration pollPeriodUs = 0;
};

// Structural checks over a dynamic-run trace: paired rows, single-processor
// non-overlap, per-batch duration within cMax, and no idling while a query
// had enough arrived-but-unclaimed tuples to run.
std::vector<Violation> validateTrace(const SimTrace& trace,
                                     const std::vector<TraceCheckQuery>& queries,
                                     const TraceCheckOptions& options);

struct QueryMetrics {
  Duration totalCostUs = 0;
  TupleCount numBatches = 0;
  bool completed = false;
  TimePoint completionUs = 0;
  bool deadlineMet = false;
  Duration tardinessUs = 0;
};

enum class BaselineMode {
  SingleBatchMin,     // mean of per-query cost ratios
  SumSingleBatchMin,  // ratio of summed costs (multi-query benchmarks)
};

struct Metrics {
  std::map<std::string, QueryMetrics> perQuery;
  double normalizedCost = 0.0;
  int deadlineMissCount = 0;
};

// Baseline is the single-batch minimum cost of each query's whole window.
Metrics computeMetrics(const SimTrace& trace, const std::vector<Query>& queries,
                       BaselineMode baseline);

}  // namespace iqsched
