// Acceptance gate over the built library and CLI: nine numbered checks, one
// PASS/FAIL line each, nonzero exit if any fails.  Tolerances are pinned
// inline; everything random is seeded so reruns are byte-for-byte comparable.

#include <sys/wait.h>

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "iqsched/config.hpp"
#include "iqsched/constraint_sched.hpp"
#include "iqsched/cost_model.hpp"
#include "iqsched/dynamic_sched.hpp"
#include "iqsched/query.hpp"
#include "iqsched/simulator.hpp"
#include "iqsched/single_query.hpp"
#include "iqsched/workload.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace iqsched;
using testsupport::ms;
using testsupport::modelSsr;
using testsupport::randomBudgetInstance;
using testsupport::referenceFitSsr;
using testsupport::secs;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Every plan and trace any check produces funnels through here; check 7
// reports the tally.
struct InvariantAudit {
  long plansChecked = 0;
  long tracesChecked = 0;
  long violations = 0;
  std::string firstMessage;

  void add(const std::vector<Violation>& vs) {
    violations += (long)vs.size();
    if (!vs.empty() && firstMessage.empty()) firstMessage = vs.front().message;
  }
  void plan(const BatchPlan& p, const Query& q) {
    ++plansChecked;
    add(validatePlan(p, q));
  }
  void trace(const SimTrace& t, const std::vector<TraceCheckQuery>& qs,
             Duration cMaxUs) {
    ++tracesChecked;
    TraceCheckOptions o;
    o.cMaxUs = cMaxUs;
    add(validateTrace(t, qs, o));
  }
};
InvariantAudit g_audit;

struct Check {
  int id = 0;
  std::string label;
  bool pass = true;
  std::string detail;
};

bool expect(Check& c, bool cond, const std::string& msg) {
  if (!cond && c.pass) {
    c.pass = false;
    c.detail = msg;
  }
  return cond;
}

template <typename F>
Check runCheck(int id, const char* label, double budgetSec, F&& fn) {
  Check c;
  c.id = id;
  c.label = label;
  auto t0 = std::chrono::steady_clock::now();
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
  if (budgetSec > 0 && el > budgetSec)
    expect(c, false, fmt("runtime %.2fs exceeds %.0fs budget", el, budgetSec));
  c.detail += fmt(" (%.2fs)", el);
  return c;
}

// --- check 1: pinned single-query plans ------------------------------------

void checkGoldenPlans(Check& c) {
  struct Golden {
    const char* scenario;
    std::vector<Batch> batches;
  };
  const std::vector<Golden> goldens = {
      {"case1", {{secs(11), secs(5), 10}}},
      {"case2", {{secs(10), secs(5), 10}}},
      {"case3", {{secs(7), secs(3), 6}, {secs(10), secs(2), 4}}},
      {"case4", {{secs(6), secs(2), 4}, {secs(8), secs(2), 4}, {secs(10), secs(1), 2}}},
  };
  for (const Golden& g : goldens) {
    auto sc = builtinScenario(g.scenario, 0);
    if (!expect(c, sc && sc->queries.size() == 1,
                fmt("%s: missing builtin scenario", g.scenario)))
      return;
    const Query& q = sc->queries[0].query;
    auto plan = scheduleSingleQuery(q);
    if (!expect(c, plan.has_value(), fmt("%s: no plan found", g.scenario))) return;
    g_audit.plan(*plan, q);
    expect(c, planCompletion(*plan) <= q.deadlineUs,
           fmt("%s: plan misses its deadline", g.scenario));
    if (!expect(c, plan->batches.size() == g.batches.size(),
                fmt("%s: %zu batches, want %zu", g.scenario, plan->batches.size(),
                    g.batches.size())))
      return;
    for (size_t i = 0; i < g.batches.size(); ++i) {
      const Batch& got = plan->batches[i];
      const Batch& want = g.batches[i];
      expect(c,
             got.startUs == want.startUs && got.durationUs == want.durationUs &&
                 got.tuples == want.tuples,
             fmt("%s batch %zu: (%.0fs, %lld tuples, %.0fs) want (%.0fs, %lld, %.0fs)",
                 g.scenario, i, (double)got.startUs / kUsPerSec,
                 (long long)got.tuples, (double)got.durationUs / kUsPerSec,
                 (double)want.startUs / kUsPerSec, (long long)want.tuples,
                 (double)want.durationUs / kUsPerSec));
    }
  }
  if (c.pass) c.detail = "4/4 pinned plans reproduced exactly";
}

// --- checks 2+3: randomized corpus vs the two independent solvers ----------

constexpr std::uint64_t kGridCorpusSeed = 1234;
constexpr int kGridCorpusSize = 500;
constexpr TupleCount kGridCorpusMaxTuples = 12;

void checkConstraintAgreement(Check& c) {
  std::mt19937_64 rng(kGridCorpusSeed);
  int feasible = 0;
  for (int i = 0; i < kGridCorpusSize; ++i) {
    Query q = randomGridQuery(rng, kGridCorpusMaxTuples, secs(1));
    auto algo = scheduleSingleQuery(q);
    auto via = solveMinBatches(q, 64);
    if (!expect(c, algo.has_value() == via.has_value(),
                fmt("instance %d: feasibility disagreement", i)))
      return;
    if (!algo) continue;
    ++feasible;
    if (!expect(c, algo->totalCostUs == via->totalCostUs,
                fmt("instance %d: costs %lld vs %lld us", i,
                    (long long)algo->totalCostUs, (long long)via->totalCostUs)))
      return;
    g_audit.plan(*algo, q);
    g_audit.plan(*via, q);
  }
  if (c.pass)
    c.detail = fmt("%d instances (%d feasible): costs identical on both routes",
                   kGridCorpusSize, feasible);
}

void checkBruteForceOptimality(Check& c) {
  std::mt19937_64 rng(kGridCorpusSeed);
  int feasible = 0;
  for (int i = 0; i < kGridCorpusSize; ++i) {
    Query q = randomGridQuery(rng, kGridCorpusMaxTuples, secs(1));
    auto algo = scheduleSingleQuery(q);
    auto best = bruteForceOptimalPlan(q, secs(1));
    if (!expect(c, algo.has_value() == best.has_value(),
                fmt("instance %d: feasibility disagreement with enumeration", i)))
      return;
    if (!algo) continue;
    ++feasible;
    if (!expect(c, algo->totalCostUs == best->totalCostUs,
                fmt("instance %d: cost %lld vs enumerated optimum %lld us", i,
                    (long long)algo->totalCostUs, (long long)best->totalCostUs)))
      return;
    auto minBatches = bruteForceMinFeasibleBatches(q, secs(1));
    if (!expect(c, minBatches.has_value(), fmt("instance %d: no feasible count", i)))
      return;
    if (!expect(c, (TupleCount)algo->batches.size() <= *minBatches,
                fmt("instance %d: %zu batches, enumeration needs only %lld", i,
                    algo->batches.size(), (long long)*minBatches)))
      return;
    g_audit.plan(*algo, q);
    g_audit.plan(*best, q);
  }
  if (c.pass)
    c.detail = fmt("%d instances (%d feasible): optimal cost and batch count",
                   kGridCorpusSize, feasible);
}

// --- check 4: simulated cost stays inside the slack budget -----------------

void checkSlackBudget(Check& c) {
  std::mt19937_64 rng(777);
  std::vector<testsupport::BudgetInstance> corpus;
  corpus.reserve(200);
  for (int i = 0; i < 200; ++i) corpus.push_back(randomBudgetInstance(rng));

  const Rational slacks[2] = {{1, 2}, {1, 1}};
  const double caps[2] = {1.5, 2.0};
  double maxNorm[2] = {0.0, 0.0};
  for (int s = 0; s < 2; ++s) {
    for (size_t i = 0; i < corpus.size(); ++i) {
      const auto& inst = corpus[i];
      EventList ev;
      ev.arrivals.push_back({0, inst.query, std::nullopt});
      SchedulerConfig cfg;
      cfg.policy = SchedPolicy::Llf;
      cfg.rsf = slacks[s];
      cfg.cMaxUs = inst.cMaxUs;
      cfg.rateMode = RateMode::FixedKnownTotal;
      cfg.greedyBatch = false;
      SimRun run = runDynamic(ev, cfg);
      g_audit.trace(run.trace, run.checkInfo, cfg.cMaxUs);
      Metrics m = computeMetrics(run.trace, run.queries, BaselineMode::SingleBatchMin);
      auto it = m.perQuery.find(inst.query.id);
      if (!expect(c, it != m.perQuery.end() && it->second.completed,
                  fmt("scenario %zu: query never completed", i)))
        return;
      Duration base = minCompCost(inst.query);
      Duration cost = it->second.totalCostUs;
      bool within = (__int128)cost * slacks[s].den <=
                    (__int128)base * (slacks[s].den + slacks[s].num);
      if (!expect(c, within,
                  fmt("scenario %zu: cost %lld exceeds budget at slack %lld/%lld", i,
                      (long long)cost, (long long)slacks[s].num,
                      (long long)slacks[s].den)))
        return;
      maxNorm[s] = std::max(maxNorm[s], (double)cost / (double)base);
    }
    expect(c, maxNorm[s] <= caps[s] + 1e-9,
           fmt("max normalized %.6f breaches cap %.1f", maxNorm[s], caps[s]));
  }
  if (c.pass)
    c.detail = fmt("200 scenarios: max normalized %.4f at slack 1/2 (cap 1.5), "
                   "%.4f at slack 1 (cap 2.0)",
                   maxNorm[0], maxNorm[1]);
}

// --- check 5: deadline-success dominance across policies -------------------

void checkPolicyDominance(Check& c) {
  const char* deltas[6] = {"1", "0.8", "0.6", "0.4", "0.2", "0.1"};
  const SchedPolicy pols[4] = {SchedPolicy::Edf, SchedPolicy::Llf,
                               SchedPolicy::Sjf, SchedPolicy::Rr};
  bool allMet[4][6];
  for (int p = 0; p < 4; ++p) {
    for (int d = 0; d < 6; ++d) {
      Scenario s =
          buildCatalogScenario(parseRational(deltas[d]), secs(60), RateKind::Fr, 42);
      s.config.policy = pols[p];
      SimRun run = runDynamic(scenarioEvents(s), s.config);
      g_audit.trace(run.trace, run.checkInfo, s.config.cMaxUs);
      Metrics m = computeMetrics(run.trace, run.queries, BaselineMode::SumSingleBatchMin);
      bool met = true;
      for (const auto& [id, qm] : m.perQuery) met = met && qm.deadlineMet;
      allMet[p][d] = met;
    }
  }
  for (int d = 0; d < 6; ++d) {
    expect(c, !allMet[3][d] || allMet[2][d],
           fmt("round-robin succeeds at delta %s but shortest-job-first fails",
               deltas[d]));
    expect(c, !allMet[2][d] || (allMet[0][d] && allMet[1][d]),
           fmt("shortest-job-first succeeds at delta %s but a deadline policy fails",
               deltas[d]));
  }
  int edfWins = 0, rrWins = 0;
  for (int d = 0; d < 6; ++d) {
    edfWins += allMet[0][d];
    rrWins += allMet[3][d];
  }
  expect(c, rrWins > 0, "round-robin never meets all deadlines, ordering is vacuous");
  expect(c, edfWins > rrWins, "no delta separates the policies");
  if (c.pass) {
    auto set = [&](int p) {
      std::string out = "{";
      for (int d = 0; d < 6; ++d)
        if (allMet[p][d]) out += std::string(out.size() > 1 ? "," : "") + deltas[d];
      return out + "}";
    };
    c.detail = "all-met deltas: edf" + set(0) + " llf" + set(1) + " sjf" + set(2) +
               " rr" + set(3);
  }
}

// --- check 6: slow streams vs an omniscient schedule search ----------------

struct SlowStreamQuery {
  Query query;            // declared (optimistic) arrival profile
  ArrivalProfile actual;  // what really arrives, one second per tuple slower
};

struct SlowStreamScenario {
  std::vector<SlowStreamQuery> queries;
};

SlowStreamScenario makeSlowStreamScenario(std::mt19937_64& rng) {
  SlowStreamScenario sc;
  int nq = 2 + (int)(rng() % 2);
  TupleCount work = 0;
  for (int i = 0; i < nq; ++i) {
    SlowStreamQuery sq;
    Query& q = sq.query;
    q.id = "v" + std::to_string(i);
    TupleCount total = 2 + (TupleCount)(rng() % 3);
    TimePoint start = (TimePoint)(rng() % 3) * kUsPerSec;
    std::int64_t inter = 1 + (std::int64_t)(rng() % 3);
    q.profile = ArrivalProfile::fixedRate(start, Rational{1, inter}, total);
    sq.actual = ArrivalProfile::fixedRate(start, Rational{1, inter + 1}, total);
    q.cost = CostModel::linear(1000000000, 0);  // one second per tuple
    q.agg = AggCostModel::none();
    work += total;
    sc.queries.push_back(std::move(sq));
  }
  // slack from none (contended, often infeasible) up to the whole backlog
  for (auto& sq : sc.queries) {
    std::int64_t slack = (std::int64_t)(rng() % (std::uint64_t)(work + 4));
    sq.query.deadlineUs = windEndTime(sq.actual) + slack * kUsPerSec;
  }
  return sc;
}

// Exhaustive feasibility over second-aligned unit batches of the actual
// arrivals.  Unit batches lose nothing here: costs are linear with zero
// overhead, so any batch can be split without changing total work, and
// splitting only relaxes availability.
bool omniscientFeasible(const SlowStreamScenario& sc) {
  const size_t n = sc.queries.size();
  std::vector<TupleCount> totals(n);
  for (size_t i = 0; i < n; ++i) totals[i] = sc.queries[i].actual.total();
  std::unordered_map<std::uint32_t, bool> memo;
  std::vector<TupleCount> claimed(n, 0);
  struct Search {
    const SlowStreamScenario& sc;
    const std::vector<TupleCount>& totals;
    std::unordered_map<std::uint32_t, bool>& memo;
    bool go(TimePoint tFree, std::vector<TupleCount>& cl) {
      std::uint32_t key = (std::uint32_t)(tFree / kUsPerSec);
      for (TupleCount v : cl) key = key * 8 + (std::uint32_t)v;
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      bool done = true, doomed = false;
      for (size_t i = 0; i < cl.size(); ++i) {
        if (cl[i] >= totals[i]) continue;
        done = false;
        TimePoint est = std::max(tFree, inputTime(sc.queries[i].actual, cl[i] + 1));
        if (est + kUsPerSec > sc.queries[i].query.deadlineUs) doomed = true;
      }
      bool ok = done;
      if (!done && !doomed) {
        for (size_t i = 0; i < cl.size() && !ok; ++i) {
          if (cl[i] >= totals[i]) continue;
          TimePoint est = std::max(tFree, inputTime(sc.queries[i].actual, cl[i] + 1));
          ++cl[i];
          ok = go(est + kUsPerSec, cl);
          --cl[i];
        }
      }
      memo[key] = ok;
      return ok;
    }
  } search{sc, totals, memo};
  return search.go(0, claimed);
}

bool runSlowStream(const SlowStreamScenario& sc, SchedPolicy policy) {
  EventList ev;
  for (const auto& sq : sc.queries) ev.arrivals.push_back({0, sq.query, sq.actual});
  SchedulerConfig cfg;
  cfg.policy = policy;
  cfg.rsf = Rational{1, 2};
  cfg.cMaxUs = secs(10);
  cfg.rateMode = RateMode::VariableKnownTotal;
  cfg.greedyBatch = false;
  SimRun run = runDynamic(ev, cfg);
  g_audit.trace(run.trace, run.checkInfo, cfg.cMaxUs);
  Metrics m = computeMetrics(run.trace, run.queries, BaselineMode::SumSingleBatchMin);
  for (const auto& [id, qm] : m.perQuery)
    if (!qm.deadlineMet) return false;
  return true;
}

void checkSlowArrivalRobustness(Check& c) {
  std::mt19937_64 rng(510);
  int feasible = 0, infeasible = 0;
  for (int i = 0; i < 80; ++i) {
    SlowStreamScenario sc = makeSlowStreamScenario(rng);
    bool possible = omniscientFeasible(sc);
    bool edfMet = runSlowStream(sc, SchedPolicy::Edf);
    bool llfMet = runSlowStream(sc, SchedPolicy::Llf);
    if (possible) {
      ++feasible;
      if (!expect(c, edfMet, fmt("scenario %d: edf misses a meetable deadline", i)))
        return;
      if (!expect(c, llfMet, fmt("scenario %d: llf misses a meetable deadline", i)))
        return;
    } else {
      ++infeasible;
      // a met scenario the search calls impossible would mean the search is wrong
      if (!expect(c, !edfMet && !llfMet,
                  fmt("scenario %d: met deadlines the search ruled out", i)))
        return;
    }
  }
  // finding: the large slow-stream catalog runs, reported not gated
  int catalogMisses = 0;
  for (RateKind rate : {RateKind::Vr3, RateKind::Vr4}) {
    for (SchedPolicy pol : {SchedPolicy::Edf, SchedPolicy::Llf}) {
      Scenario s = buildCatalogScenario(Rational{1, 1}, secs(60), rate, 42);
      s.config.policy = pol;
      SimRun run = runDynamic(scenarioEvents(s), s.config);
      g_audit.trace(run.trace, run.checkInfo, s.config.cMaxUs);
      Metrics m = computeMetrics(run.trace, run.queries, BaselineMode::SumSingleBatchMin);
      catalogMisses += m.deadlineMissCount;
    }
  }
  if (c.pass)
    c.detail = fmt("80 scenarios: %d feasible all met by edf+llf, %d infeasible; "
                   "finding: catalog slow-rate misses %d",
                   feasible, infeasible, catalogMisses);
}

// --- check 7: invariant tally over everything above ------------------------

void checkInvariantTally(Check& c) {
  expect(c, g_audit.plansChecked > 0 && g_audit.tracesChecked > 0,
         "no plans or traces were audited");
  expect(c, g_audit.violations == 0,
         fmt("%ld violations, first: %s", g_audit.violations,
             g_audit.firstMessage.c_str()));
  if (c.pass)
    c.detail = fmt("%ld plans + %ld traces validated, zero violations",
                   g_audit.plansChecked, g_audit.tracesChecked);
}

// --- check 8: cost-model fitting vs exhaustive placement search ------------

void checkFitRecovery(Check& c) {
  // in-class corpora must come back with zero residual
  std::vector<CostSample> linear;
  for (TupleCount n = 10; n <= 150; n += 10) linear.push_back({n, n * 2000});
  double linSsr = modelSsr(fitPiecewiseLinear(linear, 2), linear);
  expect(c, linSsr == 0.0, fmt("linear corpus residual %.1f, want 0", linSsr));

  CostModel truth = CostModel::piecewise({{0, 0}, {40, secs(4)}, {120, secs(10)}});
  std::vector<CostSample> concave;
  for (TupleCount x = 0; x <= 120; x += 8) concave.push_back({x, evalCost(truth, x)});
  double concSsr = modelSsr(fitPiecewiseLinear(concave, 2), concave);
  expect(c, concSsr == 0.0, fmt("concave corpus residual %.1f, want 0", concSsr));

  // noisy corpora: never worse than the exhaustive knot search; the slack
  // covers the fitted heights being quantized to whole microseconds
  double worstRatio = 0.0;
  for (std::uint64_t seed : {14ull, 2024ull, 777ull}) {
    std::mt19937_64 rng(seed);
    std::vector<CostSample> noisy;
    for (TupleCount x = 0; x <= 120; x += 8) {
      Duration y = evalCost(truth, x) + (Duration)(rng() % 40001) - 20000;
      noisy.push_back({x, std::max<Duration>(y, 0)});
    }
    double got = modelSsr(fitPiecewiseLinear(noisy, 2), noisy);
    double ref = referenceFitSsr(noisy, 2);
    if (!expect(c, got <= ref * 1.001 + 1000.0,
                fmt("seed %llu: residual %.0f vs reference %.0f",
                    (unsigned long long)seed, got, ref)))
      return;
    if (ref > 0) worstRatio = std::max(worstRatio, got / ref);
  }
  CostModel truth3 =
      CostModel::piecewise({{0, 0}, {30, secs(6)}, {70, secs(8)}, {120, secs(9)}});
  std::mt19937_64 rng(4242);
  std::vector<CostSample> noisy3;
  for (TupleCount x = 0; x <= 120; x += 8) {
    Duration y = evalCost(truth3, x) + (Duration)(rng() % 20001) - 10000;
    noisy3.push_back({x, std::max<Duration>(y, 0)});
  }
  double got3 = modelSsr(fitPiecewiseLinear(noisy3, 3), noisy3);
  double ref3 = referenceFitSsr(noisy3, 3);
  expect(c, got3 <= ref3 * 1.001 + 1000.0,
         fmt("three-segment residual %.0f vs reference %.0f", got3, ref3));
  if (ref3 > 0) worstRatio = std::max(worstRatio, got3 / ref3);
  if (c.pass)
    c.detail = fmt("in-class residual 0; noisy worst fit/reference ratio %.6f",
                   worstRatio);
}

// --- check 9: CLI sweep determinism ----------------------------------------

void checkSweepDeterminism(Check& c) {
  const char* env = std::getenv("IQSCHED_CLI");
  fs::path cli = env ? fs::path(env) : fs::path();
  if (!expect(c, !cli.empty() && fs::exists(cli),
              "IQSCHED_CLI not set or not a built binary"))
    return;
  auto runOnce = [&](const fs::path& dir) -> int {
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir, ec);
    std::string cmd = "\"" + cli.string() +
                      "\" sweep --scenario catalog --seed 42 --rate fr --out \"" +
                      dir.string() + "\" > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
  };
  fs::path a = fs::temp_directory_path() / "iqsched-acc-det-a";
  fs::path b = fs::temp_directory_path() / "iqsched-acc-det-b";
  int codeA = runOnce(a), codeB = runOnce(b);
  if (!expect(c, codeA >= 0 && codeA == codeB,
              fmt("sweep exit codes differ: %d vs %d", codeA, codeB)))
    return;
  // exit 1 would mean the sweep's own trace validation flagged something
  if (!expect(c, codeA != 1, "sweep reported trace violations")) return;

  std::vector<std::string> files = {"metrics.csv", "plotdata_cost_vs_delta.csv",
                                    "plotdata_cost_vs_batches.csv"};
  for (const char* pol : {"edf", "llf", "sjf", "rr"})
    for (const char* d : {"1", "0.8", "0.6", "0.4", "0.2", "0.1"})
      files.push_back(std::string("trace_") + pol + "_" + d + ".csv");
  size_t metricsBytes = 0;
  for (const std::string& f : files) {
    std::string ta, tb;
    try {
      ta = readTextFile((a / f).string());
      tb = readTextFile((b / f).string());
    } catch (const std::exception&) {
      expect(c, false, f + " missing from a sweep run");
      return;
    }
    if (!expect(c, ta == tb, f + " differs between identical runs")) return;
    if (f == "metrics.csv") {
      metricsBytes = ta.size();
      expect(c, ta.find('\n') != std::string::npos &&
                    ta.find('\n') + 1 < ta.size(),
             "metrics.csv has no data rows");
    }
  }
  if (c.pass)
    c.detail = fmt("%zu output files byte-identical across reruns "
                   "(metrics.csv %zu bytes)",
                   files.size(), metricsBytes);
}

}  // namespace

int main() {
  std::vector<Check> checks;
  checks.push_back(runCheck(1, "pinned single-query plans", 1.0, checkGoldenPlans));
  checks.push_back(runCheck(2, "constraint route agrees with the scheduler", 60.0,
                            checkConstraintAgreement));
  checks.push_back(runCheck(3, "scheduler matches brute-force enumeration", 300.0,
                            checkBruteForceOptimality));
  checks.push_back(runCheck(4, "dynamic cost within the slack budget", 0.0,
                            checkSlackBudget));
  checks.push_back(runCheck(5, "policy dominance across deadline tightness", 120.0,
                            checkPolicyDominance));
  checks.push_back(runCheck(6, "slow streams handled whenever feasible", 0.0,
                            checkSlowArrivalRobustness));
  checks.push_back(runCheck(7, "plan and trace invariants", 0.0, checkInvariantTally));
  checks.push_back(runCheck(8, "piecewise fit recovery", 30.0, checkFitRecovery));
  checks.push_back(runCheck(9, "sweep determinism", 0.0, checkSweepDeterminism));

  bool allPass = true;
  for (const Check& c : checks) {
    std::printf("%s criterion %d: %s — %s\n", c.pass ? "PASS" : "FAIL", c.id,
                c.label.c_str(), c.detail.c_str());
    allPass = allPass && c.pass;
  }
  return allPass ? 0 : 1;
}
