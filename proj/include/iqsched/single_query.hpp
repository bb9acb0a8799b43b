#pragma once

#include <optional>

#include "iqsched/query.hpp"

namespace iqsched {

// Time to spare if the whole window were processed as one batch started as
// late as possible.  Negative slack means a single batch cannot meet the
// deadline and the window has to be split.
Duration computeSlack(const Query& q);

struct BackwardSlot {
  TupleCount tuples = 0;
  TimePoint mustEndBy = 0;  // completion bound this slot was sized against
};

// Sizes batches from the deadline backwards: the batch after the window end
// takes whatever fits before lastBatchDeadline, earlier batches each fill the
// gap between when their tuples are complete and when the next batch starts.
// Slots come back last-batch-first.  Empty optional: no split works (some
// batch would get zero time).
std::optional<std::vector<BackwardSlot>> scheduleWithoutAggCost(
    const Query& q, TimePoint lastBatchDeadlineUs);

// Full single-query plan including the final aggregation pass.  The
// aggregation cost depends on the number of batches, which depends on the
// time reserved for aggregation, so the batch count is grown until the
// reservation covers the cost it induces.
std::optional<BatchPlan> scheduleSingleQuery(const Query& q);

// Exhaustive reference search over ordered batch-size splits with
// grid-aligned start times; minimizes total cost, breaking ties by fewer
// batches then earlier completion.  Only for tiny instances (total <= 15,
// <= 64 grid points to the deadline).
std::optional<BatchPlan> bruteForceOptimalPlan(const Query& q, Duration timeGridUs);

// Smallest batch count any feasible grid-aligned plan achieves, from the
// same exhaustive search.
std::optional<TupleCount> bruteForceMinFeasibleBatches(const Query& q,
                                                       Duration timeGridUs);

}  // namespace iqsched
