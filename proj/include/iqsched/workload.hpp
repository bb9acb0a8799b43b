#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iqsched/dynamic_sched.hpp"
#include "iqsched/query.hpp"

namespace iqsched {

// Rescale a query's deadline to windEnd + factor * (single-batch cost).
// factor 1 leaves exactly zero slack.
Query scaleDeadline(Query q, Rational factor);

// Assign deadlines to queries already ordered by window end: the first gets
// windEnd + delta*cost + cMax; each later one extends the previous deadline by
// delta*cost, or restarts from its own window end when that is later.
std::vector<Query> staggerDeadlines(std::vector<Query> ordered, Rational delta,
                                    Duration cMaxUs);

enum class RateKind { Fr, Vr1, Vr2, Vr3, Vr4 };

const char* rateKindName(RateKind k);
std::optional<RateKind> rateKindFromName(const std::string& name);

// Cumulative arrival shapes sharing a total and a nominal horizon:
//   fr   uniform, last tuple at start + horizon*(total-1)/total
//   vr1  uniform but faster, finishing at 0.9*horizon
//   vr2  bursty and front-loaded, finishing at 0.9*horizon
//   vr3  uniform but slow, finishing horizon/225 late
//   vr4  uniform but slow, finishing 7*horizon/4500 late
ArrivalProfile makeRateProfile(RateKind kind, TupleCount total,
                               Duration horizonUs, TimePoint startUs = 0);

struct QueryTemplate {
  std::string name;
  CostModel cost;
  AggCostModel agg;
};

// Twelve synthetic query shapes: linear and concave piecewise costs, group
// counts {1, 5, 360, 1500}, three of them disproportionately expensive on
// small batches.
const std::vector<QueryTemplate>& catalogTemplates();

struct ScenarioQuery {
  TimePoint arrivalTimeUs = 0;
  Query query;
  // when set, tuples really arrive on this profile while the scheduler plans
  // with query.profile
  std::optional<ArrivalProfile> actualProfile;
};

struct Scenario {
  std::string label;
  std::vector<ScenarioQuery> queries;
  SchedulerConfig config;
  std::uint64_t seed = 0;
};

EventList scenarioEvents(const Scenario& s);

// Ten tuples arriving once per second from t = 1s, half a second of work per
// tuple, no overhead and no aggregation cost.
Query referenceQuery(Duration deadlineUs);

// The 12 catalog templates at 4500 tuples / 450 s horizon, admitted at
// seed-shuffled staggered times, deadlines from staggerDeadlines(delta, cMax).
Scenario buildCatalogScenario(Rational delta, Duration cMaxUs, RateKind rate,
                              std::uint64_t seed);

std::vector<std::string> builtinScenarioNames();
std::optional<Scenario> builtinScenario(const std::string& name,
                                        std::uint64_t seed);

// Small random linear-cost fixed-rate query whose arrival spacing, costs and
// deadline all sit on multiples of gridUs, so brute-force enumeration over
// that grid is exhaustive.  Deadlines range from clearly infeasible to loose.
Query randomGridQuery(std::mt19937_64& rng, TupleCount maxTuples,
                      Duration gridUs);

}  // namespace iqsched
