#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iqsched/config.hpp"
#include "iqsched/constraint_sched.hpp"
#include "iqsched/errors.hpp"
#include "iqsched/single_query.hpp"

namespace fs = std::filesystem;
using namespace iqsched;

namespace {

int logLevel() {
  const char* v = std::getenv("IQPS_LOG");
  if (!v) return 0;
  std::string s = v;
  if (s == "debug" || s == "2") return 2;
  if (s.empty() || s == "0" || s == "off") return 0;
  return 1;
}

void logInfo(const std::string& msg) {
  if (logLevel() >= 1) std::cerr << "[iqsched] " << msg << "\n";
}

void logDebug(const std::string& msg) {
  if (logLevel() >= 2) std::cerr << "[iqsched] " << msg << "\n";
}

std::string fmtSec(TimePoint us) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", (double)us / kUsPerSec);
  return buf;
}

struct CommonOpts {
  std::string scenario;
  std::string out;
  std::string policy;
  std::string rsf;
  std::string rate;
  std::int64_t cmaxMs = -1;
  std::int64_t seed = -1;
  std::string greedyBatch;
  bool strictPolling = false;
};

void addCommon(CLI::App* cmd, CommonOpts& o, bool needsScenario) {
  auto* s = cmd->add_option("--scenario", o.scenario,
                            "builtin name (case1..case4, catalog) or config file");
  if (needsScenario) s->required();
  cmd->add_option("--out", o.out, "output directory for csv files");
  cmd->add_option("--policy", o.policy, "edf|llf|sjf|rr (overrides scenario)");
  cmd->add_option("--rsf", o.rsf, "resource slack factor, decimal or n/d");
  cmd->add_option("--cmax-ms", o.cmaxMs, "max per-batch time in ms");
  cmd->add_option("--rate", o.rate, "arrival shape for catalog: fr|vr1..vr4");
  cmd->add_option("--seed", o.seed, "scenario seed (catalog shuffling)");
  cmd->add_option("--greedy-batch", o.greedyBatch,
                  "on|off: batch as much as fits in cmax");
  cmd->add_flag("--strict-polling", o.strictPolling,
                "only take decisions on cmax-multiple ticks");
}

RateKind parseRateOpt(const std::string& s) {
  auto k = rateKindFromName(s);
  if (!k) throw ConfigError("unknown rate kind '" + s + "'");
  return *k;
}

// Builtins are regenerated from the requested knobs; files are parsed and then
// overridden.  delta only reshapes the catalog's staggered deadlines here;
// sweeps rescale other scenarios per query themselves.
Scenario loadScenario(const CommonOpts& o, const Rational& delta) {
  std::uint64_t seed = o.seed >= 0 ? (std::uint64_t)o.seed : 42;
  Scenario s;
  if (o.scenario == "catalog") {
    Duration cMax = o.cmaxMs >= 0 ? msToUs(o.cmaxMs) : secToUs(60);
    RateKind rate = o.rate.empty() ? RateKind::Fr : parseRateOpt(o.rate);
    s = buildCatalogScenario(delta, cMax, rate, seed);
  } else if (auto builtin = builtinScenario(o.scenario, seed)) {
    s = *builtin;
  } else {
    s = parseScenarioFile(o.scenario);
  }
  if (!o.policy.empty()) {
    auto p = schedPolicyFromName(o.policy);
    if (!p) throw ConfigError("unknown policy '" + o.policy + "'");
    s.config.policy = *p;
  }
  if (!o.rsf.empty()) s.config.rsf = parseRational(o.rsf);
  if (o.cmaxMs >= 0) s.config.cMaxUs = msToUs(o.cmaxMs);
  if (!o.greedyBatch.empty())
    s.config.greedyBatch = o.greedyBatch == "on" || o.greedyBatch == "true";
  if (o.strictPolling) s.config.strictPolling = true;
  return s;
}

void ensureOutDir(const std::string& out) {
  if (out.empty()) return;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + out);
}

double perQueryNormalized(Duration costUs, const Query& q) {
  Duration base = minCompCost(q);
  if (base <= 0) return costUs > 0 ? 1e9 : 1.0;
  return (double)costUs / (double)base;
}

void printPlan(const Query& q, const BatchPlan& plan) {
  std::printf("query %s: %zu batch(es), total cost %s s\n", q.id.c_str(),
              plan.batches.size(), fmtSec(plan.totalCostUs).c_str());
  for (const Batch& b : plan.batches)
    std::printf("  batch at %s s: %lld tuples, %s s\n",
                fmtSec(b.startUs).c_str(), (long long)b.tuples,
                fmtSec(b.durationUs).c_str());
  std::printf("  aggregation at %s s: %s s\n",
              fmtSec(plan.finalAggStartUs).c_str(),
              fmtSec(plan.finalAggDurationUs).c_str());
}

MetricsRow planRow(const Scenario& s, const std::string& policy,
                   const std::string& delta, const Query& q,
                   const BatchPlan& plan) {
  MetricsRow r;
  r.scenario = s.label;
  r.policy = policy;
  r.delta = delta;
  r.rsf = formatRational(s.config.rsf);
  r.queryId = q.id;
  r.totalCostUs = plan.totalCostUs;
  r.numBatches = (std::int64_t)plan.batches.size();
  r.deadlineMet = planCompletion(plan) <= q.deadlineUs;
  r.tardinessUs = std::max<Duration>(0, planCompletion(plan) - q.deadlineUs);
  r.normalizedCost = perQueryNormalized(plan.totalCostUs, q);
  return r;
}

int runPlanCommand(const CommonOpts& o, const std::string& deltaStr,
                   bool viaConstraints) {
  Rational delta = deltaStr.empty() ? Rational{1, 1} : parseRational(deltaStr);
  Scenario s = loadScenario(o, delta);
  ensureOutDir(o.out);
  const char* mode = viaConstraints ? "constraint" : "single";
  std::vector<MetricsRow> rows;
  SimTrace merged;
  bool missed = false;
  for (ScenarioQuery& sq : s.queries) {
    Query q = sq.query;
    if (!deltaStr.empty() && o.scenario != "catalog")
      q = scaleDeadline(q, delta);
    std::optional<BatchPlan> plan;
    if (viaConstraints) {
      try {
        plan = solveMinBatches(q, 64);
      } catch (const UnsupportedModelError& e) {
        std::printf("query %s: %s\n", q.id.c_str(), e.what());
        continue;
      }
      if (plan && !plan->batches.empty()) {
        ConstraintSystem cs =
            buildConstraints(q, (int)plan->batches.size(),
                             q.deadlineUs - plan->finalAggDurationUs);
        std::printf("query %s: %d batches need %d inequality + %d equality constraints\n",
                    q.id.c_str(), cs.numBatches, (int)cs.inequalities.size(),
                    cs.numEqualities);
      }
    } else {
      plan = scheduleSingleQuery(q);
    }
    if (!plan) {
      std::printf("query %s: infeasible (slack %s s)\n", q.id.c_str(),
                  fmtSec(computeSlack(q)).c_str());
      missed = true;
      continue;
    }
    printPlan(q, *plan);
    rows.push_back(planRow(s, mode, deltaStr.empty() ? "-" : deltaStr, q, *plan));
    SimTrace t = executePlan(*plan, q);
    merged.insert(merged.end(), t.begin(), t.end());
  }
  if (!o.out.empty()) {
    writeTextFile(o.out + "/metrics.csv", writeMetricsCsv(rows));
    writeTextFile(o.out + "/trace.csv", writeTraceCsv(merged));
    logInfo("wrote " + o.out + "/metrics.csv");
  }
  return missed ? 2 : 0;
}

struct DynamicOutcome {
  std::vector<MetricsRow> rows;
  Metrics metrics;
  SimTrace trace;
  int violations = 0;
};

DynamicOutcome runDynamicOnce(const Scenario& s, const std::string& deltaStr) {
  DynamicOutcome out;
  SimRun run = runDynamic(scenarioEvents(s), s.config);
  out.trace = run.trace;
  TraceCheckOptions opts;
  opts.cMaxUs = s.config.cMaxUs;
  opts.pollPeriodUs = s.config.strictPolling ? s.config.cMaxUs : 0;
  auto violations = validateTrace(run.trace, run.checkInfo, opts);
  out.violations = (int)violations.size();
  for (const auto& v : violations)
    std::cerr << "trace violation: " << v.message << "\n";
  out.metrics = computeMetrics(run.trace, run.queries,
                               run.queries.size() > 1
                                   ? BaselineMode::SumSingleBatchMin
                                   : BaselineMode::SingleBatchMin);
  for (const Query& q : run.queries) {
    const QueryMetrics& qm = out.metrics.perQuery[q.id];
    MetricsRow r;
    r.scenario = s.label;
    r.policy = schedPolicyName(s.config.policy);
    r.delta = deltaStr;
    r.rsf = formatRational(s.config.rsf);
    r.queryId = q.id;
    r.totalCostUs = qm.totalCostUs;
    r.numBatches = qm.numBatches;
    r.deadlineMet = qm.deadlineMet;
    r.tardinessUs = qm.tardinessUs;
    r.normalizedCost = perQueryNormalized(qm.totalCostUs, q);
    out.rows.push_back(std::move(r));
  }
  return out;
}

int runDynamicCommand(const CommonOpts& o, const std::string& deltaStr) {
  Rational delta = deltaStr.empty() ? Rational{1, 1} : parseRational(deltaStr);
  Scenario s = loadScenario(o, delta);
  if (!deltaStr.empty() && o.scenario != "catalog")
    for (ScenarioQuery& sq : s.queries)
      sq.query = scaleDeadline(sq.query, delta);
  ensureOutDir(o.out);
  DynamicOutcome out = runDynamicOnce(s, deltaStr.empty() ? "-" : deltaStr);
  for (const MetricsRow& r : out.rows)
    std::printf("query %s: cost %s s, %lld batch(es), deadline %s\n",
                r.queryId.c_str(), fmtSec(r.totalCostUs).c_str(),
                (long long)r.numBatches, r.deadlineMet ? "met" : "MISSED");
  std::printf("normalized cost %.3f, %d deadline miss(es)\n",
              out.metrics.normalizedCost, out.metrics.deadlineMissCount);
  if (!o.out.empty()) {
    writeTextFile(o.out + "/metrics.csv", writeMetricsCsv(out.rows));
    writeTextFile(o.out + "/trace.csv", writeTraceCsv(out.trace));
  }
  if (out.violations > 0) return 1;
  return out.metrics.deadlineMissCount > 0 ? 2 : 0;
}

std::vector<std::string> splitList(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

int runSweepCommand(const CommonOpts& o, const std::string& deltaList) {
  std::vector<std::string> deltas = splitList(
      deltaList.empty() ? "1,0.8,0.6,0.4,0.2,0.1" : deltaList);
  std::vector<std::string> policies;
  if (o.policy.empty() || o.policy == "all")
    policies = {"edf", "llf", "sjf", "rr"};
  else
    policies = splitList(o.policy);
  ensureOutDir(o.out.empty() ? "." : o.out);
  std::string outDir = o.out.empty() ? "." : o.out;

  std::vector<MetricsRow> rows;
  std::string plotDelta =
      "scenario,policy,delta,rate,queries,deadlines_met,normalized_cost\n";
  bool missed = false;
  int violations = 0;
  for (const std::string& pol : policies) {
    for (const std::string& d : deltas) {
      CommonOpts cell = o;
      cell.policy = pol;
      Rational delta = parseRational(d);
      Scenario s = loadScenario(cell, delta);
      if (o.scenario != "catalog")
        for (ScenarioQuery& sq : s.queries)
          sq.query = scaleDeadline(sq.query, delta);
      logDebug("sweep cell policy=" + pol + " delta=" + d);
      DynamicOutcome out = runDynamicOnce(s, d);
      violations += out.violations;
      int met = 0;
      for (const MetricsRow& r : out.rows)
        if (r.deadlineMet) ++met;
      if (met != (int)out.rows.size()) missed = true;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", out.metrics.normalizedCost);
      plotDelta += s.label + "," + pol + "," + d + "," +
                   (o.rate.empty() ? "fr" : o.rate) + "," +
                   std::to_string(out.rows.size()) + "," + std::to_string(met) +
                   "," + buf + "\n";
      rows.insert(rows.end(), out.rows.begin(), out.rows.end());
      writeTextFile(outDir + "/trace_" + pol + "_" + d + ".csv",
                    writeTraceCsv(out.trace));
      std::printf("policy %-3s delta %-4s: %d/%zu deadlines met, normalized %.3f\n",
                  pol.c_str(), d.c_str(), met, out.rows.size(),
                  out.metrics.normalizedCost);
    }
  }
  writeTextFile(outDir + "/metrics.csv", writeMetricsCsv(rows));
  writeTextFile(outDir + "/plotdata_cost_vs_delta.csv", plotDelta);

  // analytic cost-vs-batch-count curves for the scenario's queries
  {
    Rational delta = parseRational(deltas.front());
    Scenario s = loadScenario(o, delta);
    std::string plotBatches = "query_id,num_batches,total_cost_us,normalized_cost\n";
    for (const ScenarioQuery& sq : s.queries) {
      TupleCount total = sq.query.profile.total();
      Duration base = minCompCost(sq.query);
      for (TupleCount k = 1; k <= 24 && k <= total; ++k) {
        TupleCount batch = (total + k - 1) / k;
        Duration c = totalBatchedCost(sq.query.cost, sq.query.agg, total, batch);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f",
                      base > 0 ? (double)c / (double)base : 0.0);
        plotBatches += sq.query.id + "," + std::to_string(k) + "," +
                       std::to_string(c) + "," + buf + "\n";
      }
    }
    writeTextFile(outDir + "/plotdata_cost_vs_batches.csv", plotBatches);
  }
  if (violations > 0) return 1;
  return missed ? 2 : 0;
}

int runFitCommand(const std::string& samplesPath, int segments,
                  const std::string& out) {
  std::string text = readTextFile(samplesPath);
  std::vector<CostSample> samples;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    if (lineNo == 1 && line.find("tuples") != std::string::npos) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError(samplesPath + " line " + std::to_string(lineNo) +
                        ": expected tuples,cost_us");
    samples.push_back({std::strtoll(line.c_str(), nullptr, 10),
                       std::strtoll(line.c_str() + comma + 1, nullptr, 10)});
  }
  CostModel m = fitPiecewiseLinear(samples, segments);
  std::string modelText = "cost = ";
  {
    std::string tmp;
    tmp += "pwl{";
    const auto& ks = m.knots();
    for (size_t i = 0; i < ks.size(); ++i) {
      if (i) tmp += ",";
      tmp += "(" + std::to_string(ks[i].tuples) + "," +
             std::to_string(ks[i].costUs) + ")";
    }
    tmp += "}";
    modelText += tmp;
  }
  std::printf("%s\n", modelText.c_str());
  double ssr = 0;
  for (const CostSample& s : samples) {
    double r = (double)evalCost(m, s.tuples) - (double)s.costUs;
    ssr += r * r;
  }
  std::printf("sum of squared residuals: %.1f\n", ssr);
  if (!out.empty()) {
    ensureOutDir(out);
    std::string curve = "tuples,cost_us,fitted_us\n";
    for (const CostSample& s : samples)
      curve += std::to_string(s.tuples) + "," + std::to_string(s.costUs) + "," +
               std::to_string(evalCost(m, s.tuples)) + "\n";
    writeTextFile(out + "/fit.csv", curve);
  }
  return 0;
}

int runOracleCheck(TupleCount maxTuples, int instances, std::uint64_t seed,
                   Duration gridUs) {
  std::mt19937_64 rng(seed);
  int feasible = 0, infeasible = 0, costMismatch = 0, constraintMismatch = 0;
  for (int i = 0; i < instances; ++i) {
    Query q = randomGridQuery(rng, maxTuples, gridUs);
    auto algo = scheduleSingleQuery(q);
    auto oracle = bruteForceOptimalPlan(q, gridUs);
    auto viaConstraints = solveMinBatches(q, 64);
    if (algo.has_value() != oracle.has_value() ||
        (algo && algo->totalCostUs != oracle->totalCostUs)) {
      ++costMismatch;
      std::printf("instance %d: algorithm %s oracle %s\n", i,
                  algo ? fmtSec(algo->totalCostUs).c_str() : "infeasible",
                  oracle ? fmtSec(oracle->totalCostUs).c_str() : "infeasible");
    }
    if (algo.has_value() != viaConstraints.has_value() ||
        (algo && algo->totalCostUs != viaConstraints->totalCostUs))
      ++constraintMismatch;
    if (algo)
      ++feasible;
    else
      ++infeasible;
  }
  std::printf(
      "%d instances: %d feasible, %d infeasible, %d oracle mismatches, "
      "%d constraint-route mismatches\n",
      instances, feasible, infeasible, costMismatch, constraintMismatch);
  return (costMismatch == 0 && constraintMismatch == 0) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deadline-aware batch scheduling for intermittent queries"};
  app.require_subcommand(1);

  CommonOpts single, constraint, dynamic, sweep;
  std::string singleDelta, constraintDelta, dynamicDelta, sweepDelta;

  auto* cmdSingle =
      app.add_subcommand("single", "plan one query at a time, backward from its deadline");
  addCommon(cmdSingle, single, true);
  cmdSingle->add_option("--delta", singleDelta, "deadline scale factor");

  auto* cmdConstraint = app.add_subcommand(
      "constraint", "plan via the explicit constraint-system search");
  addCommon(cmdConstraint, constraint, true);
  cmdConstraint->add_option("--delta", constraintDelta, "deadline scale factor");

  auto* cmdDynamic = app.add_subcommand(
      "dynamic", "simulate the online scheduler over the scenario");
  addCommon(cmdDynamic, dynamic, true);
  cmdDynamic->add_option("--delta", dynamicDelta, "deadline scale factor");

  auto* cmdSweep = app.add_subcommand(
      "sweep", "run a policy x delta grid and emit plot data");
  addCommon(cmdSweep, sweep, true);
  cmdSweep->add_option("--delta", sweepDelta,
                       "comma-separated deadline factors (default 1..0.1)");

  std::string fitSamples, fitOut;
  int fitSegments = 2;
  auto* cmdFit = app.add_subcommand("fit", "fit a piecewise-linear cost model");
  cmdFit->add_option("--samples", fitSamples, "csv of tuples,cost_us")->required();
  cmdFit->add_option("--segments", fitSegments, "number of linear segments");
  cmdFit->add_option("--out", fitOut, "output directory");

  TupleCount ocMaxTuples = 10;
  int ocInstances = 200;
  std::int64_t ocSeed = 7;
  std::int64_t ocGridMs = 1000;
  auto* cmdOracle = app.add_subcommand(
      "oracle-check", "compare the planner against brute-force enumeration");
  cmdOracle->add_option("--max-tuples", ocMaxTuples, "max tuples per instance (<= 15)");
  cmdOracle->add_option("--instances", ocInstances, "number of random instances");
  cmdOracle->add_option("--seed", ocSeed, "random seed");
  cmdOracle->add_option("--grid-ms", ocGridMs, "time grid in ms");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmdSingle->parsed()) return runPlanCommand(single, singleDelta, false);
    if (cmdConstraint->parsed())
      return runPlanCommand(constraint, constraintDelta, true);
    if (cmdDynamic->parsed()) return runDynamicCommand(dynamic, dynamicDelta);
    if (cmdSweep->parsed()) return runSweepCommand(sweep, sweepDelta);
    if (cmdFit->parsed()) return runFitCommand(fitSamples, fitSegments, fitOut);
    if (cmdOracle->parsed())
      return runOracleCheck(ocMaxTuples, ocInstances, (std::uint64_t)ocSeed,
                            msToUs(ocGridMs));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
