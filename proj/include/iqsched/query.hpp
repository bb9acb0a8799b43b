#pragma once

#include <string>
#include <vector>

#include "iqsched/arrival.hpp"
#include "iqsched/cost_model.hpp"

namespace iqsched {

struct Query {
  std::string id;
  ArrivalProfile profile;  // declared/expected arrivals
  TimePoint deadlineUs = 0;
  CostModel cost;
  AggCostModel agg;
};

inline TimePoint queryWindEnd(const Query& q) { return windEndTime(q.profile); }

// Cost of the whole window in one batch: the cheapest way to process it.
inline Duration minCompCost(const Query& q) {
  return evalCost(q.cost, q.profile.total());
}

// Throws on structurally bad queries (used by config loading).
void validateQuery(const Query& q);

struct Batch {
  TimePoint startUs = 0;
  Duration durationUs = 0;
  TupleCount tuples = 0;
};

// Executable schedule for one query: batches in execution order, then one
// final aggregation pass.  A valid plan covers the window exactly, never
// overlaps itself, never reads tuples that have not arrived, and finishes
// aggregation by the deadline.
struct BatchPlan {
  std::vector<Batch> batches;
  TimePoint finalAggStartUs = 0;
  Duration finalAggDurationUs = 0;
  Duration totalCostUs = 0;  // batch durations + final aggregation
};

inline TimePoint planCompletion(const BatchPlan& plan) {
  return plan.finalAggStartUs + plan.finalAggDurationUs;
}

}  // namespace iqsched
