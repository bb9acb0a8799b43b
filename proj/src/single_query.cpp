#include "iqsched/single_query.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "iqsched/errors.hpp"

namespace iqsched {

Duration computeSlack(const Query& q) {
  return q.deadlineUs - queryWindEnd(q) - minCompCost(q);
}

std::optional<std::vector<BackwardSlot>> scheduleWithoutAggCost(
    const Query& q, TimePoint lastBatchDeadlineUs) {
  const TupleCount total = q.profile.total();
  if (total == 0) return std::vector<BackwardSlot>{};
  const TimePoint windEnd = queryWindEnd(q);
  if (lastBatchDeadlineUs < windEnd) return std::nullopt;

  // Walk backwards from the deadline, always filling the latest possible
  // slot: each batch is sized to the gap between its tuples' arrival and the
  // current boundary, and the boundary then moves up by that batch's cost
  // (its latest possible start).
  std::vector<BackwardSlot> slots;
  TupleCount pending = total;
  TimePoint timePt = lastBatchDeadlineUs;
  while (pending > 0) {
    TimePoint ipAvail = inputTime(q.profile, pending);
    Duration gap = timePt - ipAvail;
    TupleCount n =
        gap >= 0
            ? std::min(pending, estimateTuplesProcessed(q.cost, gap))
            : 0;
    if (n <= 0) return std::nullopt;  // no batch fits before the boundary
    slots.push_back({n, timePt});
    pending -= n;
    timePt -= evalCost(q.cost, n);
  }
  return slots;
}

namespace {

BatchPlan timedPlan(const Query& q, const std::vector<BackwardSlot>& slots) {
  const TimePoint windEnd = queryWindEnd(q);
  const size_t b = slots.size();
  BatchPlan plan;
  plan.batches.resize(b);
  // slots are last-batch-first; batches[] is execution order
  std::vector<TupleCount> prefix(b, 0);
  TupleCount run = 0;
  for (size_t i = 0; i < b; ++i) {
    const auto& slot = slots[b - 1 - i];
    run += slot.tuples;
    prefix[i] = run;
    plan.batches[i].tuples = slot.tuples;
    plan.batches[i].durationUs = evalCost(q.cost, slot.tuples);
  }
  plan.batches[b - 1].startUs =
      std::max(windEnd, slots[0].mustEndBy - plan.batches[b - 1].durationUs);
  for (size_t i = b - 1; i-- > 0;) {
    TimePoint bound =
        std::min(plan.batches[i + 1].startUs, slots[b - 1 - i].mustEndBy);
    TimePoint start = bound - plan.batches[i].durationUs;
    TimePoint avail = inputTime(q.profile, prefix[i]);
    plan.batches[i].startUs = std::max(start, avail);
  }
  plan.finalAggStartUs =
      plan.batches[b - 1].startUs + plan.batches[b - 1].durationUs;
  plan.finalAggDurationUs = evalAggCost(q.agg, (TupleCount)b);
  plan.totalCostUs = plan.finalAggDurationUs;
  for (const auto& batch : plan.batches) plan.totalCostUs += batch.durationUs;
  return plan;
}

BatchPlan emptyWindowPlan(const Query& q) {
  BatchPlan plan;
  plan.finalAggStartUs = q.deadlineUs;
  plan.finalAggDurationUs = 0;
  plan.totalCostUs = 0;
  return plan;
}

}  // namespace

std::optional<BatchPlan> scheduleSingleQuery(const Query& q) {
  const TupleCount total = q.profile.total();
  if (total == 0) return emptyWindowPlan(q);
  const TimePoint windEnd = queryWindEnd(q);
  const Duration minCost = minCompCost(q);

  if (computeSlack(q) >= 0) {
    // One batch, started as late as the deadline allows.
    BatchPlan plan;
    Batch batch;
    batch.startUs = std::max(windEnd, q.deadlineUs - minCost);
    batch.durationUs = minCost;
    batch.tuples = total;
    plan.batches.push_back(batch);
    plan.finalAggStartUs = batch.startUs + batch.durationUs;
    plan.finalAggDurationUs = evalAggCost(q.agg, 1);  // == 0
    plan.totalCostUs = minCost + plan.finalAggDurationUs;
    return plan;
  }

  // The time reserved for final aggregation shrinks the last batch's
  // deadline, which can raise the batch count, which raises the aggregation
  // cost; grow the assumed batch count until the reservation is sufficient.
  for (TupleCount assumed = 2; assumed <= std::max<TupleCount>(2, total); ++assumed) {
    TimePoint dl = q.deadlineUs - evalAggCost(q.agg, assumed);
    if (dl < windEnd) return std::nullopt;  // growing assumed only tightens dl
    auto slots = scheduleWithoutAggCost(q, dl);
    if (!slots) return std::nullopt;
    TupleCount got = (TupleCount)slots->size();
    if (evalAggCost(q.agg, got) <= evalAggCost(q.agg, assumed))
      return timedPlan(q, *slots);
  }
  return std::nullopt;
}

namespace {

struct OracleBest {
  bool found = false;
  Duration cost = 0;
  size_t numBatches = 0;
  TimePoint completion = 0;
  BatchPlan plan;
};

// Walks every ordered split of the window into 1..total batches, placing each
// batch greedily at the earliest grid point satisfying arrival order and
// non-overlap (earliest placement dominates for feasibility).
void enumerateSplits(const Query& q, Duration gridUs,
                     const std::function<void(const BatchPlan&)>& accept) {
  const TupleCount total = q.profile.total();
  auto gridCeil = [gridUs](TimePoint t) {
    return ceilDiv128(t, gridUs) * gridUs;
  };
  std::vector<TupleCount> sizes;
  std::function<void(TupleCount)> recurse = [&](TupleCount remaining) {
    if (remaining == 0) {
      BatchPlan plan;
      TimePoint prevEnd = INT64_MIN / 4;
      TupleCount prefix = 0;
      for (TupleCount sz : sizes) {
        prefix += sz;
        Batch batch;
        batch.tuples = sz;
        batch.durationUs = evalCost(q.cost, sz);
        TimePoint earliest = std::max(inputTime(q.profile, prefix), prevEnd);
        batch.startUs = gridCeil(earliest);
        prevEnd = batch.startUs + batch.durationUs;
        plan.batches.push_back(batch);
      }
      plan.finalAggStartUs = prevEnd;
      plan.finalAggDurationUs = evalAggCost(q.agg, (TupleCount)sizes.size());
      if (planCompletion(plan) > q.deadlineUs) return;
      plan.totalCostUs = plan.finalAggDurationUs;
      for (const auto& batch : plan.batches) plan.totalCostUs += batch.durationUs;
      accept(plan);
      return;
    }
    for (TupleCount sz = 1; sz <= remaining; ++sz) {
      sizes.push_back(sz);
      recurse(remaining - sz);
      sizes.pop_back();
    }
  };
  recurse(total);
}

void checkOracleScale(const Query& q, Duration gridUs) {
  if (gridUs <= 0) throw TooLargeError("time grid must be positive");
  if (q.profile.total() > 15)
    throw TooLargeError("exhaustive search limited to 15 tuples, got " +
                        std::to_string(q.profile.total()));
  std::int64_t points = (q.deadlineUs - q.profile.startTime()) / gridUs + 1;
  if (points > 64)
    throw TooLargeError("exhaustive search limited to 64 grid points, got " +
                        std::to_string(points));
}

}  // namespace

std::optional<BatchPlan> bruteForceOptimalPlan(const Query& q, Duration timeGridUs) {
  checkOracleScale(q, timeGridUs);
  if (q.profile.total() == 0) return emptyWindowPlan(q);
  OracleBest best;
  enumerateSplits(q, timeGridUs, [&](const BatchPlan& plan) {
    Duration cost = plan.totalCostUs;
    size_t nb = plan.batches.size();
    TimePoint done = planCompletion(plan);
    bool better = !best.found || cost < best.cost ||
                  (cost == best.cost && nb < best.numBatches) ||
                  (cost == best.cost && nb == best.numBatches && done < best.completion);
    if (better) {
      best.found = true;
      best.cost = cost;
      best.numBatches = nb;
      best.completion = done;
      best.plan = plan;
    }
  });
  if (!best.found) return std::nullopt;
  return best.plan;
}

std::optional<TupleCount> bruteForceMinFeasibleBatches(const Query& q,
                                                       Duration timeGridUs) {
  checkOracleScale(q, timeGridUs);
  if (q.profile.total() == 0) return 0;
  std::optional<TupleCount> minB;
  enumerateSplits(q, timeGridUs, [&](const BatchPlan& plan) {
    TupleCount nb = (TupleCount)plan.batches.size();
    if (!minB || nb < *minB) minB = nb;
  });
  return minB;
}

}  // namespace iqsched
