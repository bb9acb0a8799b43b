#include "iqsched/workload.hpp"

#include <algorithm>
#include <random>

#include "iqsched/errors.hpp"

namespace iqsched {

namespace {

Duration scaledCost(Duration costUs, Rational factor) {
  return (Duration)ceilDiv128((__int128)costUs * factor.num, factor.den);
}

}  // namespace

Query scaleDeadline(Query q, Rational factor) {
  if (factor.num <= 0 || factor.den <= 0)
    throw InvalidModelError("deadline scale factor must be positive");
  Duration c = evalCost(q.cost, q.profile.total());
  q.deadlineUs = satAddUs(windEndTime(q.profile), scaledCost(c, factor));
  return q;
}

std::vector<Query> staggerDeadlines(std::vector<Query> ordered, Rational delta,
                                    Duration cMaxUs) {
  if (ordered.empty())
    throw InvalidModelError("cannot stagger an empty query list");
  if (delta.num < 0 || delta.den <= 0)
    throw InvalidModelError("deadline stagger factor must be non-negative");
  TimePoint prev = 0;
  for (size_t i = 0; i < ordered.size(); ++i) {
    Query& q = ordered[i];
    TimePoint windEnd = windEndTime(q.profile);
    Duration slice = scaledCost(evalCost(q.cost, q.profile.total()), delta);
    if (i == 0 || windEnd > prev)
      q.deadlineUs = satAddUs(satAddUs(windEnd, slice), cMaxUs);
    else
      q.deadlineUs = satAddUs(prev, slice);
    prev = q.deadlineUs;
  }
  return ordered;
}

const char* rateKindName(RateKind k) {
  switch (k) {
    case RateKind::Fr: return "fr";
    case RateKind::Vr1: return "vr1";
    case RateKind::Vr2: return "vr2";
    case RateKind::Vr3: return "vr3";
    case RateKind::Vr4: return "vr4";
  }
  return "?";
}

std::optional<RateKind> rateKindFromName(const std::string& name) {
  if (name == "fr") return RateKind::Fr;
  if (name == "vr1") return RateKind::Vr1;
  if (name == "vr2") return RateKind::Vr2;
  if (name == "vr3") return RateKind::Vr3;
  if (name == "vr4") return RateKind::Vr4;
  return std::nullopt;
}

namespace {

// Uniform arrivals with the last tuple landing exactly at start + spanUs.
ArrivalProfile uniformSpan(TimePoint startUs, Duration spanUs, TupleCount total) {
  if (total <= 1 || spanUs <= 0)
    return ArrivalProfile::fixedRate(startUs, Rational{1, 1}, total);
  return ArrivalProfile::fixedRate(
      startUs, Rational{(total - 1) * kUsPerSec, spanUs}, total);
}

}  // namespace

ArrivalProfile makeRateProfile(RateKind kind, TupleCount total,
                               Duration horizonUs, TimePoint startUs) {
  if (total <= 0 || horizonUs <= 0)
    throw InvalidModelError("rate profile needs positive total and horizon");
  switch (kind) {
    case RateKind::Fr:
      return ArrivalProfile::fixedRate(
          startUs, Rational{total * kUsPerSec, horizonUs}, total);
    case RateKind::Vr1:
      return uniformSpan(startUs, (Duration)floorDiv128((__int128)horizonUs * 9, 10),
                         total);
    case RateKind::Vr2: {
      // three bursts with lulls between them, all input in by 0.9 * horizon
      auto frac = [&](int numer, int denom) {
        return startUs + (Duration)floorDiv128((__int128)horizonUs * numer, denom);
      };
      auto cnt = [&](int numer, int denom) {
        return (TupleCount)floorDiv128((__int128)total * numer, denom);
      };
      std::vector<TracePoint> pts;
      pts.push_back({startUs, 0});
      pts.push_back({frac(1, 10), cnt(4, 10)});
      pts.push_back({frac(3, 10), cnt(4, 10)});
      pts.push_back({frac(4, 10), cnt(7, 10)});
      pts.push_back({frac(7, 10), cnt(7, 10)});
      pts.push_back({frac(9, 10), total});
      return ArrivalProfile::trace(std::move(pts));
    }
    case RateKind::Vr3:
      return uniformSpan(
          startUs, satAddUs(horizonUs, (Duration)floorDiv128((__int128)horizonUs * 20, 4500)),
          total);
    case RateKind::Vr4:
      return uniformSpan(
          startUs, satAddUs(horizonUs, (Duration)floorDiv128((__int128)horizonUs * 7, 4500)),
          total);
  }
  throw InvalidModelError("unknown rate kind");
}

namespace {

AggCostModel mergeAgg(TupleCount groups, Duration perBatchUs) {
  return AggCostModel::fromKnots({{1, 0}, {2, perBatchUs}}, groups);
}

std::vector<QueryTemplate> makeCatalog() {
  std::vector<QueryTemplate> t;
  auto lin = [](std::int64_t perTupleMs, Duration overheadMs) {
    return CostModel::linear(perTupleMs * 1000000, overheadMs * kUsPerMs);
  };
  auto pwl = [](std::vector<CostKnot> ks) {
    return CostModel::piecewise(std::move(ks));
  };
  t.push_back({"scan-light", lin(8, 200), mergeAgg(1, 1 * kUsPerMs)});
  t.push_back({"join-mid", lin(12, 500), mergeAgg(5, 2 * kUsPerMs)});
  t.push_back({"probe-heavy", pwl({{0, 0}, {100, 3000000}, {4500, 40000000}}),
               mergeAgg(360, 30 * kUsPerMs)});
  t.push_back({"scan-cheap", lin(5, 100), mergeAgg(1500, 120 * kUsPerMs)});
  t.push_back({"sort-heavy", lin(15, 300), mergeAgg(1, 1 * kUsPerMs)});
  t.push_back({"join-concave", pwl({{0, 0}, {500, 10000000}, {4500, 50000000}}),
               mergeAgg(5, 2 * kUsPerMs)});
  t.push_back({"probe-spiky", pwl({{0, 0}, {50, 2000000}, {4500, 35000000}}),
               mergeAgg(360, 30 * kUsPerMs)});
  t.push_back({"wide-agg", lin(10, 1000), mergeAgg(1500, 120 * kUsPerMs)});
  t.push_back({"filter-cheap", lin(6, 150), mergeAgg(1, 1 * kUsPerMs)});
  t.push_back({"join-late", pwl({{0, 0}, {1000, 15000000}, {4500, 45000000}}),
               mergeAgg(5, 2 * kUsPerMs)});
  t.push_back({"probe-mid", pwl({{0, 0}, {200, 5000000}, {4500, 42000000}}),
               mergeAgg(360, 30 * kUsPerMs)});
  t.push_back({"group-heavy", lin(9, 250), mergeAgg(1500, 120 * kUsPerMs)});
  return t;
}

}  // namespace

const std::vector<QueryTemplate>& catalogTemplates() {
  static const std::vector<QueryTemplate> catalog = makeCatalog();
  return catalog;
}

EventList scenarioEvents(const Scenario& s) {
  EventList ev;
  for (const ScenarioQuery& sq : s.queries)
    ev.arrivals.push_back({sq.arrivalTimeUs, sq.query, sq.actualProfile});
  return ev;
}

Query referenceQuery(Duration deadlineUs) {
  Query q;
  q.id = "q1";
  q.profile = ArrivalProfile::fixedRate(kUsPerSec, Rational{1, 1}, 10);
  q.cost = CostModel::linear(500 * 1000 * 1000, 0);
  q.agg = AggCostModel::none();
  q.deadlineUs = deadlineUs;
  return q;
}

Scenario buildCatalogScenario(Rational delta, Duration cMaxUs, RateKind rate,
                              std::uint64_t seed) {
  constexpr TupleCount kTotal = 4500;
  constexpr Duration kHorizon = 450 * kUsPerSec;
  const auto& templates = catalogTemplates();

  std::mt19937_64 rng(seed);
  std::vector<size_t> order(templates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng() % i]);

  Scenario s;
  s.label = std::string("catalog-") + rateKindName(rate);
  s.seed = seed;
  s.config.policy = SchedPolicy::Llf;
  s.config.rsf = Rational{1, 1};
  s.config.cMaxUs = cMaxUs;
  s.config.rateMode =
      rate == RateKind::Fr ? RateMode::FixedKnownTotal : RateMode::VariableKnownTotal;

  std::vector<Query> queries;
  std::vector<std::optional<ArrivalProfile>> actuals;
  std::vector<TimePoint> admits;
  for (size_t i = 0; i < order.size(); ++i) {
    // admissions 50 s apart with up to 10 s of jitter, on a 1 ms grid; the
    // spacing keeps the overlapped arrival-work rate just under one
    // processor, so the loosest deadlines are meetable by any
    // work-conserving policy while tighter ones separate the policies
    TimePoint admit =
        (TimePoint)i * 50 * kUsPerSec + (TimePoint)(rng() % 10001) * kUsPerMs;
    const QueryTemplate& t = templates[order[i]];
    Query q;
    q.id = "q" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1) +
           "-" + t.name;
    q.profile = makeRateProfile(RateKind::Fr, kTotal, kHorizon, admit);
    q.cost = t.cost;
    q.agg = t.agg;
    q.deadlineUs = 0;  // staggered below
    queries.push_back(std::move(q));
    if (rate == RateKind::Fr)
      actuals.emplace_back();
    else
      actuals.emplace_back(makeRateProfile(rate, kTotal, kHorizon, admit));
    admits.push_back(admit);
  }
  queries = staggerDeadlines(std::move(queries), delta, cMaxUs);
  for (size_t i = 0; i < queries.size(); ++i)
    s.queries.push_back({admits[i], std::move(queries[i]), std::move(actuals[i])});
  return s;
}

Query randomGridQuery(std::mt19937_64& rng, TupleCount maxTuples,
                      Duration gridUs) {
  if (maxTuples < 1 || gridUs <= 0)
    throw InvalidModelError("randomGridQuery needs positive maxTuples and grid");
  Query q;
  q.id = "r";
  TupleCount total = 1 + (TupleCount)(rng() % (std::uint64_t)maxTuples);
  TimePoint start = (TimePoint)(rng() % 4) * gridUs;
  Duration spacing = (1 + (Duration)(rng() % 2)) * gridUs;
  q.profile =
      ArrivalProfile::fixedRate(start, Rational{kUsPerSec, spacing}, total);
  std::int64_t perTupleNs = (1 + (std::int64_t)(rng() % 2)) * gridUs * 1000;
  Duration overhead = (Duration)(rng() % 3) * gridUs;
  q.cost = CostModel::linear(perTupleNs, overhead);
  if (rng() % 2 == 0)
    q.agg = AggCostModel::fromKnots(
        {{1, 0}, {2, (1 + (Duration)(rng() % 2)) * gridUs}},
        (TupleCount)(rng() % 3));
  // slack from -(total+1) to +(2*total+2) grid steps around the window end
  std::int64_t steps =
      (std::int64_t)(rng() % (std::uint64_t)(3 * total + 4)) - (total + 1);
  TimePoint deadline = windEndTime(q.profile) + steps * gridUs;
  q.deadlineUs = std::max(deadline, start + gridUs);
  return q;
}

std::vector<std::string> builtinScenarioNames() {
  return {"case1", "case2", "case3", "case4", "catalog"};
}

std::optional<Scenario> builtinScenario(const std::string& name,
                                        std::uint64_t seed) {
  auto singleCase = [&](const char* label, Duration deadlineUs) {
    Scenario s;
    s.label = label;
    s.seed = seed;
    s.config.policy = SchedPolicy::Llf;
    s.config.rsf = Rational{1, 1};
    s.config.cMaxUs = 10 * kUsPerSec;
    s.queries.push_back({0, referenceQuery(deadlineUs), std::nullopt});
    return s;
  };
  if (name == "case1") return singleCase("case1", 16 * kUsPerSec);
  if (name == "case2") return singleCase("case2", 15 * kUsPerSec);
  if (name == "case3") return singleCase("case3", 12 * kUsPerSec);
  if (name == "case4") return singleCase("case4", 11 * kUsPerSec);
  if (name == "catalog")
    return buildCatalogScenario(Rational{1, 1}, 60 * kUsPerSec, RateKind::Fr,
                                seed);
  return std::nullopt;
}

}  // namespace iqsched
