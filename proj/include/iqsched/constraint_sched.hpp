#pragma once

#include <optional>
#include <vector>

#include "iqsched/query.hpp"

namespace iqsched {

// Explicit constraint view of "process the window in exactly n batches by
// lastBatchDeadline": integer size variables x_1..x_n and start-time
// variables s_1..s_n with
//   sum x_i = total                         (coverage, the one equality)
//   s_i + dur(x_i) <= s_{i+1}  /  s_n + dur(x_n) <= lastBatchDeadline
//   s_i >= arrival time of the first (x_1+..+x_i) tuples
//   x_i >= 1
// Only linear cost models over fixed-rate streams keep dur() and the
// arrival bound linear, so only those are accepted.
struct ConstraintSystem {
  int numBatches = 0;
  TupleCount totalTuples = 0;
  TimePoint lastBatchDeadlineUs = 0;
  std::int64_t perTupleNs = 0;
  Duration overheadUs = 0;
  TimePoint profileStartUs = 0;
  Rational ratePerSec{0, 1};

  enum class Bound { BatchEnd, Availability, MinSize };
  struct Inequality {
    Bound bound;
    int batchIndex;  // 0-based
  };
  std::vector<Inequality> inequalities;  // 3 per batch
  int numEqualities = 1;
};

ConstraintSystem buildConstraints(const Query& q, int numBatches,
                                  TimePoint lastBatchDeadlineUs);

// Smallest batch count (up to nMax) with a feasible assignment, wrapped in
// the same grow-the-aggregation-reservation loop as the backward scheduler.
// Feasibility per count is decided by exact branch-and-bound over integer
// batch sizes with start-time bound propagation; meant for desk-scale
// instances.
std::optional<BatchPlan> solveMinBatches(const Query& q, int nMax);

}  // namespace iqsched
