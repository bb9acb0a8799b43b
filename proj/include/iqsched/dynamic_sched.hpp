#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iqsched/query.hpp"
#include "iqsched/simulator.hpp"

namespace iqsched {

enum class SchedPolicy { Edf, Llf, Sjf, Rr };

const char* schedPolicyName(SchedPolicy p);
std::optional<SchedPolicy> schedPolicyFromName(const std::string& name);

// How much the scheduler trusts the declared arrival profile:
//  FixedKnownTotal      - arrivals follow the declared profile exactly
//  VariableKnownTotal   - rate may drift but the total is right
//  VariableEstimatedTotal - total is re-estimated from observed arrivals
enum class RateMode { FixedKnownTotal, VariableKnownTotal, VariableEstimatedTotal };

const char* rateModeName(RateMode m);
std::optional<RateMode> rateModeFromName(const std::string& name);

struct SchedulerConfig {
  SchedPolicy policy = SchedPolicy::Llf;
  Rational rsf{1, 2};       // tolerated cost inflation over the one-batch minimum
  Duration cMaxUs = 0;      // cap on a single batch's computation time
  RateMode rateMode = RateMode::FixedKnownTotal;
  bool greedyBatch = true;  // take all arrived tuples (capped by cMax) per batch
  bool strictPolling = false;  // decide only on cMax-period ticks
  int processors = 1;       // only 1 is supported
};

struct MinBatchSizeResult {
  TupleCount size = 1;
  // Budget was unreachable under the cMax cap; `size` is the largest batch
  // that still fits the cap (the closest the scheduler can get).
  bool budgetExceeded = false;
};

// Smallest batch size whose repeated use keeps the query's total cost within
// (1 + rsf) of the one-batch minimum, subject to each batch fitting in cMax.
// The search floor is twice the group count: smaller batches than that churn
// the aggregation state.
MinBatchSizeResult findMinBatchSize(const CostModel& cost, const AggCostModel& agg,
                                    TupleCount totalTuples, Rational rsf,
                                    Duration cMaxUs);
MinBatchSizeResult findMinBatchSize(const Query& q, Rational rsf, Duration cMaxUs);

// Cost of processing `totalTuples` in ceil(total/x) batches of x (remainder
// last) plus the final aggregation: what findMinBatchSize budgets against.
Duration totalBatchedCost(const CostModel& cost, const AggCostModel& agg,
                          TupleCount totalTuples, TupleCount batchSize);

enum class QueryStatus { Waiting, Ready, Running, Done, Removed };

struct DynamicQueryState {
  Query query;            // declared profile, deadline, models
  ArrivalProfile actual;  // what actually arrives (== declared when faithful)
  TimePoint admitTimeUs = 0;
  TupleCount minBatchSize = 1;
  bool budgetExceeded = false;
  // Tuples handed to batches; a dispatched batch always runs to completion,
  // so this leads the completed count only while a batch is in flight.
  TupleCount processedTuples = 0;
  TupleCount batchesDone = 0;
  TupleCount totalEstimate = 0;  // declared total, or re-estimated
  Duration slackTimeUs = 0;      // laxity at the last scheduling point
  TimePoint estMaturityUs = 0;   // when the next min-size batch should exist
  QueryStatus status = QueryStatus::Waiting;
  bool removeRequested = false;
};

// Deadline minus now minus the cost of the remaining work if it were done in
// min-size batches plus the projected final aggregation.
Duration computeLaxity(const DynamicQueryState& s, TimePoint now);

// Recomputes Waiting/Ready for every query: ready once enough unclaimed
// tuples have arrived for a min-size batch, once the stream has fully
// arrived with work left, or (variable-rate modes) once the estimated
// maturity time has passed with at least one tuple waiting.
void refreshReadiness(std::vector<DynamicQueryState>& states, TimePoint now,
                      const SchedulerConfig& config);

// Index of the query to run next among Ready ones, -1 if none.  rrCursor is
// the id last served, used only by round-robin.
int selectNext(const std::vector<DynamicQueryState>& states, TimePoint now,
               const SchedulerConfig& config, const std::string& rrCursor);

struct QueryArrival {
  TimePoint timeUs = 0;
  Query query;
  std::optional<ArrivalProfile> actualProfile;  // defaults to the declared one
};

struct QueryRemoval {
  TimePoint timeUs = 0;
  std::string queryId;
};

struct EventList {
  std::vector<QueryArrival> arrivals;
  std::vector<QueryRemoval> removals;
};

struct SimRun {
  SimTrace trace;
  std::vector<Query> queries;              // admitted, in admission order
  std::vector<TraceCheckQuery> checkInfo;  // for validateTrace
  std::vector<DynamicQueryState> finalStates;
};

// Non-preemptive single-processor run over virtual time.  The processor takes
// the selected query's next batch whenever it is free and someone is ready;
// a query's final batch absorbs its aggregation pass.  Wakeups are event
// driven (arrival thresholds, batch completions, deadlines) unless
// strictPolling pins decisions to cMax-period ticks.
SimRun runDynamic(const EventList& events, const SchedulerConfig& config);

}  // namespace iqsched
