#pragma once

#include <vector>

#include "iqsched/errors.hpp"
#include "iqsched/units.hpp"

namespace iqsched {

struct CostKnot {
  TupleCount tuples = 0;
  Duration costUs = 0;
};

// Batch computation cost as a function of batch size.  Linear models follow
// per-tuple-cost * n + per-batch-overhead; piecewise models interpolate
// between measured knots and extrapolate past the last knot with the last
// segment's slope.  evalCost(m, 0) == 0 for every model: an empty batch is
// never scheduled and never charged.
class CostModel {
 public:
  enum class Kind { Linear, Piecewise };

  CostModel() = default;  // zero-cost linear model

  // perTupleNs is in nanoseconds so sub-microsecond per-tuple costs stay
  // exact; all evaluated costs are still integer microseconds (rounded up).
  static CostModel linear(std::int64_t perTupleNs, Duration overheadUs);
  static CostModel piecewise(std::vector<CostKnot> knots);

  Kind kind() const { return kind_; }
  std::int64_t perTupleNs() const { return perTupleNs_; }
  Duration overheadUs() const { return overheadUs_; }
  const std::vector<CostKnot>& knots() const { return knots_; }

 private:
  Kind kind_ = Kind::Linear;
  std::int64_t perTupleNs_ = 0;
  Duration overheadUs_ = 0;
  std::vector<CostKnot> knots_;
};

struct AggKnot {
  TupleCount numBatches = 1;
  Duration costUs = 0;
};

// Final-aggregation cost as a function of how many batches fed it.  One batch
// needs no final combining pass, so cost(1) == 0 always.  numGroups is the
// grouping cardinality of the query result (0 for a scalar aggregate) and
// feeds the minimum-batch-size floor downstream.
class AggCostModel {
 public:
  AggCostModel() = default;  // no aggregation cost
  static AggCostModel none();
  static AggCostModel fromKnots(std::vector<AggKnot> knots, TupleCount numGroups);

  Duration eval(TupleCount numBatches) const;
  const std::vector<AggKnot>& knots() const { return knots_; }
  TupleCount numGroups() const { return numGroups_; }
  bool isZero() const;

 private:
  std::vector<AggKnot> knots_{AggKnot{1, 0}};
  TupleCount numGroups_ = 0;
};

struct CostSample {
  TupleCount tuples = 0;
  Duration costUs = 0;
};

Duration evalCost(const CostModel& model, TupleCount numTuples);

// Largest n with evalCost(model, n) <= budgetUs.  For models that stop
// growing (zero slope tail) the answer is capped at kTupleSearchCap.
TupleCount estimateTuplesProcessed(const CostModel& model, Duration budgetUs);

inline Duration evalAggCost(const AggCostModel& model, TupleCount numBatches) {
  return model.eval(numBatches);
}

// Least-squares continuous piecewise-linear fit with numSegments segments.
// Knot x-positions are chosen exhaustively from the sample x-values (first
// and last sample always anchor the ends); for each placement the knot
// heights are the exact least-squares solution, then clamped to be
// non-decreasing so the result is a valid cost model.
CostModel fitPiecewiseLinear(std::vector<CostSample> samples, int numSegments);

}  // namespace iqsched
