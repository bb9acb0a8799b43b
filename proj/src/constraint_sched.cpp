#include "iqsched/constraint_sched.hpp"

#include <algorithm>
#include <map>

#include "iqsched/errors.hpp"

namespace iqsched {

namespace {

void requireSupported(const Query& q) {
  if (q.cost.kind() != CostModel::Kind::Linear)
    throw UnsupportedModelError("constraint route needs a linear cost model");
  if (q.profile.kind() != ArrivalProfile::Kind::FixedRate)
    throw UnsupportedModelError("constraint route needs a fixed-rate stream");
}

}  // namespace

ConstraintSystem buildConstraints(const Query& q, int numBatches,
                                  TimePoint lastBatchDeadlineUs) {
  requireSupported(q);
  if (numBatches < 1) throw InvalidModelError("batch count must be >= 1");
  ConstraintSystem sys;
  sys.numBatches = numBatches;
  sys.totalTuples = q.profile.total();
  sys.lastBatchDeadlineUs = lastBatchDeadlineUs;
  sys.perTupleNs = q.cost.perTupleNs();
  sys.overheadUs = q.cost.overheadUs();
  sys.profileStartUs = q.profile.startTime();
  sys.ratePerSec = q.profile.ratePerSec();
  for (int i = 0; i < numBatches; ++i) {
    sys.inequalities.push_back({ConstraintSystem::Bound::BatchEnd, i});
    sys.inequalities.push_back({ConstraintSystem::Bound::Availability, i});
    sys.inequalities.push_back({ConstraintSystem::Bound::MinSize, i});
  }
  return sys;
}

namespace {

// Branch-and-bound over batch sizes, working backwards from the batch that
// must end by T.  Normalizing every batch to end as late as allowed is
// lossless: pushing a batch later only relaxes its predecessors.  Failures
// are memoized per (batches left, prefix tuples) with the largest T known to
// fail, which is sound because feasibility is monotone in T.
struct SplitSearch {
  const Query& q;
  std::map<std::pair<int, TupleCount>, TimePoint> failAt;

  explicit SplitSearch(const Query& query) : q(query) {}

  bool search(int k, TupleCount prefix, TimePoint endBy,
              std::vector<TupleCount>& sizes) {
    if (k == 0) return prefix == 0;
    if (prefix < k) return false;  // each batch takes at least one tuple
    auto key = std::make_pair(k, prefix);
    auto it = failAt.find(key);
    if (it != failAt.end() && endBy <= it->second) return false;

    TimePoint avail = inputTime(q.profile, prefix);
    Duration room = endBy - avail;
    if (room >= 0) {
      TupleCount xCap = std::min<TupleCount>(
          prefix - (k - 1), estimateTuplesProcessed(q.cost, room));
      for (TupleCount x = xCap; x >= 1; --x) {
        Duration dur = evalCost(q.cost, x);
        TimePoint start = endBy - dur;  // latest finish normalization
        if (start < avail) continue;    // only possible with odd cost curves
        if (search(k - 1, prefix - x, start, sizes)) {
          sizes.push_back(x);
          return true;
        }
      }
    }
    TimePoint& worst = failAt[key];
    worst = it == failAt.end() ? endBy : std::max(worst, endBy);
    return false;
  }
};

BatchPlan planFromSizes(const Query& q, const std::vector<TupleCount>& sizes,
                        TimePoint lastBatchDeadlineUs) {
  BatchPlan plan;
  plan.batches.resize(sizes.size());
  TimePoint endBy = lastBatchDeadlineUs;
  for (size_t i = sizes.size(); i-- > 0;) {
    Batch& b = plan.batches[i];
    b.tuples = sizes[i];
    b.durationUs = evalCost(q.cost, sizes[i]);
    b.startUs = endBy - b.durationUs;
    endBy = b.startUs;
  }
  const Batch& last = plan.batches.back();
  plan.finalAggStartUs = last.startUs + last.durationUs;
  plan.finalAggDurationUs = evalAggCost(q.agg, (TupleCount)sizes.size());
  plan.totalCostUs = plan.finalAggDurationUs;
  for (const Batch& b : plan.batches) plan.totalCostUs += b.durationUs;
  return plan;
}

BatchPlan emptyWindowPlan(const Query& q) {
  BatchPlan plan;
  plan.finalAggStartUs = q.deadlineUs;
  return plan;
}

}  // namespace

std::optional<BatchPlan> solveMinBatches(const Query& q, int nMax) {
  requireSupported(q);
  const TupleCount total = q.profile.total();
  if (total == 0) return emptyWindowPlan(q);
  if (nMax < 1) throw InvalidModelError("nMax must be >= 1");
  const TimePoint windEnd = queryWindEnd(q);
  const int nCap = (int)std::min<TupleCount>(nMax, total);

  for (TupleCount assumed = 1; assumed <= std::max<TupleCount>(1, total); ++assumed) {
    TimePoint dl = q.deadlineUs - evalAggCost(q.agg, assumed);
    if (dl < windEnd) return std::nullopt;  // larger assumed only shrinks dl
    std::optional<std::vector<TupleCount>> found;
    for (int n = 1; n <= nCap; ++n) {
      SplitSearch search(q);
      std::vector<TupleCount> sizes;
      if (search.search(n, total, dl, sizes)) {
        found = std::move(sizes);
        break;
      }
    }
    if (!found) return std::nullopt;
    TupleCount got = (TupleCount)found->size();
    if (evalAggCost(q.agg, got) <= evalAggCost(q.agg, assumed))
      return planFromSizes(q, *found, dl);
  }
  return std::nullopt;
}

}  // namespace iqsched
