#pragma once

#include <string>
#include <vector>

#include "iqsched/simulator.hpp"
#include "iqsched/workload.hpp"

namespace iqsched {

// Scenario files are line-oriented key = value settings grouped in sections:
//
//   label = demo
//   seed = 7
//   [scheduler]
//   policy = llf              # edf | llf | sjf | rr
//   rsf = 0.5                 # decimal or n/d
//   cmax_us = 10000000
//   rate_mode = fixed_known_total
//   greedy_batch = on
//   strict_polling = off
//   [query q1]
//   arrival_us = 0
//   deadline_us = 16000000
//   cost = linear{per_tuple_us=500000, overhead_us=0}
//           # or pwl{(0,0),(100,3000000),(4500,40000000)}
//   agg = none                # or pwl{(1,0),(2,30000)} over batch counts
//   agg_groups = 0
//   [profile q1]              # what the scheduler is told to expect
//   kind = fixed              # fixed | trace
//   start_us = 1000000
//   rate_per_sec = 1          # decimal or n/d
//   total = 10
//   [actual q1]               # optional: what really arrives
//   kind = trace
//   points = (0,0),(45000000,1800),(405000000,4500)
//
// '#' starts a comment; blank lines are ignored.
Scenario parseScenarioText(const std::string& text);
Scenario parseScenarioFile(const std::string& path);
std::string writeScenarioText(const Scenario& s);

std::string formatRational(const Rational& r);
Rational parseRational(const std::string& text);  // decimal or "n/d"

// trace.csv: time_us,event,query_id,tuples,duration_us
std::string writeTraceCsv(const SimTrace& trace);
SimTrace parseTraceCsv(const std::string& text);

struct MetricsRow {
  std::string scenario;
  std::string policy;
  std::string delta;  // kept verbatim so reruns are byte-comparable
  std::string rsf;
  std::string queryId;
  Duration totalCostUs = 0;
  std::int64_t numBatches = 0;
  bool deadlineMet = false;
  Duration tardinessUs = 0;
  double normalizedCost = 0.0;
};

// metrics.csv: scenario,policy,delta,rsf,query_id,total_cost_us,num_batches,
//              deadline_met,tardiness_us,normalized_cost
std::string writeMetricsCsv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parseMetricsCsv(const std::string& text);

std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& text);

}  // namespace iqsched
