#pragma once

// Shared helpers for the test binaries: deterministic instance generators and
// an independent piecewise-fit reference used to cross-check the production
// fitter.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "iqsched/cost_model.hpp"
#include "iqsched/dynamic_sched.hpp"
#include "iqsched/query.hpp"

namespace testsupport {

using namespace iqsched;

inline Duration secs(std::int64_t s) { return s * kUsPerSec; }
inline Duration ms(std::int64_t m) { return m * kUsPerMs; }

// Random single-stream instance whose budget target is reachable: cMax always
// admits a whole-window batch, so the min-batch-size search never has to fall
// back to the cap.
struct BudgetInstance {
  Query query;
  Duration cMaxUs = 0;
};

inline BudgetInstance randomBudgetInstance(std::mt19937_64& rng) {
  BudgetInstance inst;
  Query& q = inst.query;
  q.id = "s";
  TupleCount total = 3 + (TupleCount)(rng() % 38);
  TimePoint start = (TimePoint)(rng() % 6) * kUsPerSec;
  Rational rate{1 + (std::int64_t)(rng() % 4), 1 + (std::int64_t)(rng() % 3)};
  q.profile = ArrivalProfile::fixedRate(start, rate, total);
  if (rng() % 2 == 0) {
    std::int64_t perTupleNs = (std::int64_t)(100000 + rng() % 9900001);
    q.cost = CostModel::linear(perTupleNs, (Duration)(rng() % 4) * kUsPerSec);
  } else {
    // concave two-segment curve: early tuples cost more per tuple
    Duration s1 = (Duration)(1 + rng() % 8) * kUsPerMs;
    Duration s2 = (Duration)(rng() % ((std::uint64_t)(s1 / kUsPerMs) + 1)) * kUsPerMs;
    TupleCount x1 = 1 + (TupleCount)(rng() % 20);
    TupleCount x2 = x1 + 1 + (TupleCount)(rng() % 30);
    q.cost = CostModel::piecewise(
        {{0, 0}, {x1, x1 * s1}, {x2, x1 * s1 + (x2 - x1) * s2}});
  }
  if (rng() % 2 == 0)
    q.agg = AggCostModel::none();
  else
    q.agg = AggCostModel::fromKnots(
        {{1, 0}, {2, (Duration)(rng() % 501) * kUsPerMs}}, (TupleCount)(rng() % 4));
  Duration minCost = evalCost(q.cost, total);
  inst.cMaxUs = minCost * (1 + (Duration)(rng() % 2)) + (Duration)(rng() % 1000001);
  q.deadlineUs = windEndTime(q.profile) + 3 * minCost + inst.cMaxUs + 10 * kUsPerSec;
  return inst;
}

namespace fitref {

inline std::vector<long double> solveNormal(std::vector<std::vector<long double>> m,
                                            std::vector<long double> rhs) {
  const size_t n = rhs.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    std::swap(rhs[col], rhs[piv]);
    if (std::fabs(m[col][col]) < 1e-15L) continue;
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      long double f = m[r][col] / m[col][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<long double> x(n, 0.0L);
  for (size_t i = 0; i < n; ++i)
    if (std::fabs(m[i][i]) > 1e-15L) x[i] = rhs[i] / m[i][i];
  return x;
}

// repeated-scan monotone pooling (unit weights), deliberately naive
inline void poolMonotone(std::vector<long double>& h) {
  std::vector<long double> val(h);
  std::vector<int> cnt(h.size(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < val.size(); ++i) {
      if (val[i] > val[i + 1] + 0.0L) {
        long double merged = (val[i] * cnt[i] + val[i + 1] * cnt[i + 1]) /
                             (cnt[i] + cnt[i + 1]);
        val[i] = merged;
        cnt[i] += cnt[i + 1];
        val.erase(val.begin() + (long)i + 1);
        cnt.erase(cnt.begin() + (long)i + 1);
        changed = true;
        break;
      }
    }
  }
  size_t o = 0;
  for (size_t b = 0; b < val.size(); ++b)
    for (int k = 0; k < cnt[b]; ++k) h[o++] = val[b];
}

inline long double placementSsr(const std::vector<CostSample>& samples,
                                const std::vector<TupleCount>& knotXs) {
  const size_t k = knotXs.size();
  auto hat = [&](TupleCount x, size_t& i0, long double& w0, long double& w1) {
    size_t seg = 0;
    while (seg + 2 < k && knotXs[seg + 1] < x) ++seg;
    i0 = seg;
    long double span = (long double)(knotXs[seg + 1] - knotXs[seg]);
    w1 = (long double)(x - knotXs[seg]) / span;
    w0 = 1.0L - w1;
  };
  std::vector<std::vector<long double>> ata(k, std::vector<long double>(k, 0.0L));
  std::vector<long double> aty(k, 0.0L);
  for (const auto& s : samples) {
    size_t i0;
    long double w0, w1;
    hat(s.tuples, i0, w0, w1);
    ata[i0][i0] += w0 * w0;
    ata[i0][i0 + 1] += w0 * w1;
    ata[i0 + 1][i0] += w0 * w1;
    ata[i0 + 1][i0 + 1] += w1 * w1;
    aty[i0] += w0 * (long double)s.costUs;
    aty[i0 + 1] += w1 * (long double)s.costUs;
  }
  std::vector<long double> h = solveNormal(std::move(ata), std::move(aty));
  poolMonotone(h);
  for (auto& v : h) v = std::max(v, 0.0L);
  long double ssr = 0.0L;
  for (const auto& s : samples) {
    size_t i0;
    long double w0, w1;
    hat(s.tuples, i0, w0, w1);
    // score against model semantics: zero tuples always cost zero, whatever
    // intercept the unconstrained fit preferred
    long double pred = s.tuples == 0 ? 0.0L : w0 * h[i0] + w1 * h[i0 + 1];
    long double r = (long double)s.costUs - pred;
    ssr += r * r;
  }
  return ssr;
}

}  // namespace fitref

// Best residual over every knot placement anchored on sample x-values: the
// same search contract as the production fitter, re-derived independently.
inline double referenceFitSsr(std::vector<CostSample> samples, int numSegments) {
  std::sort(samples.begin(), samples.end(), [](const CostSample& a, const CostSample& b) {
    return a.tuples < b.tuples || (a.tuples == b.tuples && a.costUs < b.costUs);
  });
  std::vector<TupleCount> xs;
  for (const auto& s : samples)
    if (xs.empty() || xs.back() != s.tuples) xs.push_back(s.tuples);
  const int pick = numSegments - 1;
  std::vector<TupleCount> interior(xs.begin() + 1, xs.end() - 1);
  long double best = -1.0L;
  std::vector<int> comb(pick);
  for (int i = 0; i < pick; ++i) comb[i] = i;
  while (true) {
    std::vector<TupleCount> knots;
    knots.push_back(xs.front());
    for (int i = 0; i < pick; ++i) knots.push_back(interior[(size_t)comb[i]]);
    knots.push_back(xs.back());
    long double ssr = fitref::placementSsr(samples, knots);
    if (best < 0.0L || ssr < best) best = ssr;
    if (pick == 0) break;
    int j = pick - 1;
    while (j >= 0 && comb[j] == (int)interior.size() - pick + j) --j;
    if (j < 0) break;
    ++comb[j];
    for (int i = j + 1; i < pick; ++i) comb[i] = comb[i - 1] + 1;
  }
  return (double)best;
}

// Residual of a fitted model against the samples it was fitted from.
inline double modelSsr(const CostModel& model, const std::vector<CostSample>& samples) {
  double ssr = 0.0;
  for (const auto& s : samples) {
    double r = (double)s.costUs - (double)evalCost(model, s.tuples);
    ssr += r * r;
  }
  return ssr;
}

}  // namespace testsupport
