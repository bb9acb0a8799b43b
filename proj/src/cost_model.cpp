#include "iqsched/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace iqsched {

namespace {

// Interpolated value k0.cost + slope * (n - k0.tuples) with the slope taken
// from (k0, k1), rounded up to whole microseconds.
Duration segmentValue(TupleCount n, TupleCount x0, Duration c0, TupleCount x1,
                      Duration c1) {
  if (x1 == x0) return c1;
  __int128 rise = (__int128)(c1 - c0) * (n - x0);
  Duration d = (Duration)ceilDiv128(rise, x1 - x0);
  return satAddUs(c0, d);
}

}  // namespace

CostModel CostModel::linear(std::int64_t perTupleNs, Duration overheadUs) {
  if (perTupleNs < 0 || overheadUs < 0)
    throw InvalidModelError("linear cost model with negative coefficient");
  CostModel m;
  m.kind_ = Kind::Linear;
  m.perTupleNs_ = perTupleNs;
  m.overheadUs_ = overheadUs;
  return m;
}

CostModel CostModel::piecewise(std::vector<CostKnot> knots) {
  if (knots.empty()) throw InvalidModelError("piecewise cost model needs knots");
  if (knots.front().tuples != 0)
    throw InvalidModelError("piecewise cost model must start at tuple count 0");
  for (size_t i = 0; i < knots.size(); ++i) {
    if (knots[i].costUs < 0)
      throw InvalidModelError("piecewise cost model with negative cost");
    if (i > 0) {
      if (knots[i].tuples <= knots[i - 1].tuples)
        throw InvalidModelError("piecewise knots must increase in tuple count");
      if (knots[i].costUs < knots[i - 1].costUs)
        throw InvalidModelError("piecewise knot costs must be non-decreasing");
    }
  }
  CostModel m;
  m.kind_ = Kind::Piecewise;
  m.knots_ = std::move(knots);
  return m;
}

Duration evalCost(const CostModel& model, TupleCount numTuples) {
  if (numTuples <= 0) return 0;  // empty batches are never charged
  if (model.kind() == CostModel::Kind::Linear) {
    Duration var = (Duration)ceilDiv128((__int128)model.perTupleNs() * numTuples, 1000);
    return satAddUs(var, model.overheadUs());
  }
  const auto& ks = model.knots();
  if (ks.size() == 1) return ks.front().costUs;
  if (numTuples >= ks.back().tuples) {
    const auto& a = ks[ks.size() - 2];
    const auto& b = ks.back();
    return segmentValue(numTuples, a.tuples, a.costUs, b.tuples, b.costUs);
  }
  size_t hi = 1;
  while (ks[hi].tuples < numTuples) ++hi;
  return segmentValue(numTuples, ks[hi - 1].tuples, ks[hi - 1].costUs,
                      ks[hi].tuples, ks[hi].costUs);
}

TupleCount estimateTuplesProcessed(const CostModel& model, Duration budgetUs) {
  if (budgetUs < 0) return 0;
  if (evalCost(model, 1) > budgetUs) return 0;
  if (evalCost(model, kTupleSearchCap) <= budgetUs) return kTupleSearchCap;
  // invariant: evalCost(lo) <= budget < evalCost(hi)
  TupleCount lo = 1, hi = kTupleSearchCap;
  while (hi - lo > 1) {
    TupleCount mid = lo + (hi - lo) / 2;
    if (evalCost(model, mid) <= budgetUs)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

AggCostModel AggCostModel::none() {
  AggCostModel m;
  m.knots_ = {AggKnot{1, 0}};
  m.numGroups_ = 0;
  return m;
}

AggCostModel AggCostModel::fromKnots(std::vector<AggKnot> knots, TupleCount numGroups) {
  if (knots.empty()) throw InvalidModelError("aggregation cost model needs knots");
  if (knots.front().numBatches != 1 || knots.front().costUs != 0)
    throw InvalidModelError("aggregation cost must start at (1 batch, 0 cost)");
  for (size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].numBatches <= knots[i - 1].numBatches)
      throw InvalidModelError("aggregation knots must increase in batch count");
    if (knots[i].costUs < knots[i - 1].costUs)
      throw InvalidModelError("aggregation knot costs must be non-decreasing");
  }
  if (numGroups < 0) throw InvalidModelError("negative group count");
  AggCostModel m;
  m.knots_ = std::move(knots);
  m.numGroups_ = numGroups;
  return m;
}

Duration AggCostModel::eval(TupleCount numBatches) const {
  if (numBatches <= 1) return 0;
  if (knots_.size() == 1) return knots_.front().costUs;  // == 0 by invariant
  if (numBatches >= knots_.back().numBatches) {
    const auto& a = knots_[knots_.size() - 2];
    const auto& b = knots_.back();
    return segmentValue(numBatches, a.numBatches, a.costUs, b.numBatches, b.costUs);
  }
  size_t hi = 1;
  while (knots_[hi].numBatches < numBatches) ++hi;
  return segmentValue(numBatches, knots_[hi - 1].numBatches, knots_[hi - 1].costUs,
                      knots_[hi].numBatches, knots_[hi].costUs);
}

bool AggCostModel::isZero() const {
  for (const auto& k : knots_)
    if (k.costUs != 0) return false;
  return true;
}

namespace {

// Solves the dense system M x = rhs in place; M is tiny (segments + 1 square).
std::vector<double> solveDense(std::vector<std::vector<double>> M,
                               std::vector<double> rhs) {
  const size_t n = rhs.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
    std::swap(M[col], M[piv]);
    std::swap(rhs[col], rhs[piv]);
    double d = M[col][col];
    if (std::fabs(d) < 1e-12) continue;  // degenerate; leave row, x stays 0
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = M[r][col] / d;
      if (f == 0.0) continue;
      for (size_t c = col; c < n; ++c) M[r][c] -= f * M[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    if (std::fabs(M[i][i]) > 1e-12) x[i] = rhs[i] / M[i][i];
  return x;
}

// Monotone (non-decreasing) L2 projection via pool-adjacent-violators.
void isotonize(std::vector<double>& v) {
  struct Block { double sum; int count; };
  std::vector<Block> blocks;
  for (double x : v) {
    blocks.push_back({x, 1});
    while (blocks.size() > 1) {
      auto& b = blocks[blocks.size() - 1];
      auto& a = blocks[blocks.size() - 2];
      if (a.sum / a.count <= b.sum / b.count) break;
      a.sum += b.sum;
      a.count += b.count;
      blocks.pop_back();
    }
  }
  size_t i = 0;
  for (const auto& b : blocks) {
    double mean = b.sum / b.count;
    for (int k = 0; k < b.count; ++k) v[i++] = mean;
  }
}

struct PlacementFit {
  std::vector<double> heights;
  double ssr = 0.0;
};

// Least-squares heights for fixed knot x-positions (continuous hat basis),
// then monotone clamp.  Every knot sits on a sample x, so the normal matrix
// is nonsingular in practice.
PlacementFit fitPlacement(const std::vector<CostSample>& samples,
                          const std::vector<TupleCount>& knotXs) {
  const size_t k = knotXs.size();
  std::vector<std::vector<double>> ata(k, std::vector<double>(k, 0.0));
  std::vector<double> aty(k, 0.0);
  auto weights = [&](TupleCount x, size_t& i0, double& w0, double& w1) {
    size_t seg = 0;
    while (seg + 2 < k && knotXs[seg + 1] < x) ++seg;
    i0 = seg;
    double span = (double)(knotXs[seg + 1] - knotXs[seg]);
    w1 = (double)(x - knotXs[seg]) / span;
    w0 = 1.0 - w1;
  };
  for (const auto& s : samples) {
    size_t i0;
    double w0, w1;
    weights(s.tuples, i0, w0, w1);
    double y = (double)s.costUs;
    ata[i0][i0] += w0 * w0;
    ata[i0][i0 + 1] += w0 * w1;
    ata[i0 + 1][i0] += w0 * w1;
    ata[i0 + 1][i0 + 1] += w1 * w1;
    aty[i0] += w0 * y;
    aty[i0 + 1] += w1 * y;
  }
  PlacementFit fit;
  fit.heights = solveDense(std::move(ata), std::move(aty));
  isotonize(fit.heights);
  for (double& h : fit.heights)
    if (h < 0.0) h = 0.0;
  for (const auto& s : samples) {
    size_t i0;
    double w0, w1;
    weights(s.tuples, i0, w0, w1);
    double pred = w0 * fit.heights[i0] + w1 * fit.heights[i0 + 1];
    double r = (double)s.costUs - pred;
    fit.ssr += r * r;
  }
  return fit;
}

}  // namespace

CostModel fitPiecewiseLinear(std::vector<CostSample> samples, int numSegments) {
  if (numSegments < 1) throw InvalidModelError("segment count must be >= 1");
  std::sort(samples.begin(), samples.end(),
            [](const CostSample& a, const CostSample& b) {
              return a.tuples < b.tuples || (a.tuples == b.tuples && a.costUs < b.costUs);
            });
  std::vector<TupleCount> xs;
  for (const auto& s : samples) {
    if (s.tuples < 0) throw InvalidModelError("negative sample tuple count");
    if (xs.empty() || xs.back() != s.tuples) xs.push_back(s.tuples);
  }
  if ((int)xs.size() < numSegments + 1)
    throw InsufficientSamplesError("need at least numSegments+1 distinct sample sizes, have " +
                                   std::to_string(xs.size()));

  // Interior knot candidates between the fixed endpoints.  For very dense
  // sample sets thin the candidates so the exhaustive placement search stays
  // tractable; anchors are still actual sample x-values.
  std::vector<TupleCount> interior(xs.begin() + 1, xs.end() - 1);
  const int pick = numSegments - 1;
  if (pick > 0 && interior.size() > 64) {
    std::vector<TupleCount> thinned;
    for (size_t i = 0; i < 64; ++i)
      thinned.push_back(interior[i * (interior.size() - 1) / 63]);
    thinned.erase(std::unique(thinned.begin(), thinned.end()), thinned.end());
    interior = std::move(thinned);
  }

  std::vector<TupleCount> bestKnots;
  PlacementFit bestFit;
  bool haveBest = false;
  std::vector<int> comb(pick);
  for (int i = 0; i < pick; ++i) comb[i] = i;
  while (true) {
    std::vector<TupleCount> knotXs;
    knotXs.push_back(xs.front());
    for (int i = 0; i < pick; ++i) knotXs.push_back(interior[comb[i]]);
    knotXs.push_back(xs.back());
    PlacementFit fit = fitPlacement(samples, knotXs);
    if (!haveBest || fit.ssr < bestFit.ssr - 1e-9) {
      bestFit = fit;
      bestKnots = knotXs;
      haveBest = true;
    }
    if (pick == 0) break;
    int j = pick - 1;
    while (j >= 0 && comb[j] == (int)interior.size() - pick + j) --j;
    if (j < 0) break;
    ++comb[j];
    for (int i = j + 1; i < pick; ++i) comb[i] = comb[i - 1] + 1;
  }

  std::vector<CostKnot> knots;
  if (bestKnots.front() > 0) {
    // Extend the first fitted segment back to n = 0 so the model covers the
    // whole domain; clamp so the extension stays a valid cost curve.
    double slope = 0.0;
    if (bestKnots.size() >= 2 && bestKnots[1] != bestKnots[0])
      slope = (bestFit.heights[1] - bestFit.heights[0]) /
              (double)(bestKnots[1] - bestKnots[0]);
    double h = bestFit.heights[0] - slope * (double)bestKnots[0];
    h = std::clamp(h, 0.0, bestFit.heights[0]);
    knots.push_back({0, (Duration)std::llround(h)});
  }
  for (size_t i = 0; i < bestKnots.size(); ++i) {
    Duration h = (Duration)std::llround(std::max(0.0, bestFit.heights[i]));
    if (!knots.empty() && h < knots.back().costUs) h = knots.back().costUs;
    knots.push_back({bestKnots[i], h});
  }
  return CostModel::piecewise(std::move(knots));
}

}  // namespace iqsched
