#include "iqsched/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "iqsched/errors.hpp"

namespace iqsched {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

std::int64_t parseInt(const std::string& text, int line, const char* what) {
  const std::string t = trim(text);
  if (t.empty()) fail(line, std::string(what) + ": empty number");
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(t.c_str(), &end, 10);
  if (errno == ERANGE || end != t.c_str() + t.size())
    fail(line, std::string(what) + ": bad integer '" + t + "'");
  return v;
}

bool parseOnOff(const std::string& text, int line, const char* what) {
  std::string t = trim(text);
  if (t == "on" || t == "true" || t == "1") return true;
  if (t == "off" || t == "false" || t == "0") return false;
  fail(line, std::string(what) + ": expected on/off, got '" + t + "'");
}

// "(a,b),(c,d),..." -> list of int pairs
std::vector<std::pair<std::int64_t, std::int64_t>> parsePairs(
    const std::string& text, int line, const char* what) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  size_t i = 0;
  const std::string t = trim(text);
  auto expect = [&](char c) {
    if (i >= t.size() || t[i] != c)
      fail(line, std::string(what) + ": expected '" + c + "' at position " +
                     std::to_string(i) + " in '" + t + "'");
    ++i;
  };
  while (i < t.size()) {
    expect('(');
    size_t comma = t.find(',', i);
    size_t close = t.find(')', i);
    if (comma == std::string::npos || close == std::string::npos || comma > close)
      fail(line, std::string(what) + ": malformed pair in '" + t + "'");
    std::int64_t a = parseInt(t.substr(i, comma - i), line, what);
    std::int64_t b = parseInt(t.substr(comma + 1, close - comma - 1), line, what);
    out.push_back({a, b});
    i = close + 1;
    if (i < t.size()) expect(',');
  }
  if (out.empty()) fail(line, std::string(what) + ": no points given");
  return out;
}

// body of "name{...}" -> key=value map, order-insensitive
std::map<std::string, std::string> parseBraceArgs(const std::string& body,
                                                 int line, const char* what) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t eq = item.find('=');
    if (eq == std::string::npos)
      fail(line, std::string(what) + ": expected key=value, got '" + item + "'");
    kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return kv;
}

std::int64_t parsePerTupleUsToNs(const std::string& text, int line) {
  Rational r;
  try {
    r = parseDecimal(trim(text));
  } catch (const std::exception& e) {
    fail(line, std::string("per_tuple_us: ") + e.what());
  }
  __int128 ns = (__int128)r.num * 1000;
  if (ns % r.den != 0)
    fail(line, "per_tuple_us has more than 3 decimal places: " + trim(text));
  ns /= r.den;
  if (ns < 0 || ns > INT64_MAX) fail(line, "per_tuple_us out of range");
  return (std::int64_t)ns;
}

CostModel parseCost(const std::string& value, int line) {
  std::string v = trim(value);
  size_t open = v.find('{');
  if (open == std::string::npos || v.back() != '}')
    fail(line, "cost: expected linear{...} or pwl{...}, got '" + v + "'");
  std::string name = trim(v.substr(0, open));
  std::string body = v.substr(open + 1, v.size() - open - 2);
  try {
    if (name == "linear") {
      auto kv = parseBraceArgs(body, line, "cost");
      if (!kv.count("per_tuple_us") || !kv.count("overhead_us"))
        fail(line, "cost: linear needs per_tuple_us and overhead_us");
      return CostModel::linear(parsePerTupleUsToNs(kv["per_tuple_us"], line),
                               parseInt(kv["overhead_us"], line, "overhead_us"));
    }
    if (name == "pwl") {
      std::vector<CostKnot> ks;
      for (auto [n, c] : parsePairs(body, line, "cost")) ks.push_back({n, c});
      return CostModel::piecewise(std::move(ks));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(line, std::string("cost: ") + e.what());
  }
  fail(line, "cost: unknown model '" + name + "'");
}

struct RawSection {
  std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
  int line = 0;
};

const std::pair<std::string, int>* getIf(const RawSection& s, const char* key) {
  auto it = s.kv.find(key);
  return it == s.kv.end() ? nullptr : &it->second;
}

std::string need(const RawSection& s, const char* key, const std::string& where) {
  auto* v = getIf(s, key);
  if (!v)
    throw ConfigError(where + " (line " + std::to_string(s.line) +
                      "): missing key '" + key + "'");
  return v->first;
}

ArrivalProfile buildProfile(const RawSection& s, const std::string& where) {
  std::string kind = trim(need(s, "kind", where));
  if (kind == "fixed") {
    TimePoint start = parseInt(need(s, "start_us", where), s.line, "start_us");
    Rational rate = parseRational(need(s, "rate_per_sec", where));
    TupleCount total = parseInt(need(s, "total", where), s.line, "total");
    return ArrivalProfile::fixedRate(start, rate, total);
  }
  if (kind == "trace") {
    std::vector<TracePoint> pts;
    for (auto [t, c] : parsePairs(need(s, "points", where), s.line, "points"))
      pts.push_back({t, c});
    return ArrivalProfile::trace(std::move(pts));
  }
  throw ConfigError(where + ": unknown profile kind '" + kind + "'");
}

void appendCost(std::string& out, const CostModel& m) {
  if (m.kind() == CostModel::Kind::Linear) {
    std::int64_t ns = m.perTupleNs();
    out += "linear{per_tuple_us=" + std::to_string(ns / 1000);
    if (ns % 1000 != 0) {
      char buf[8];
      std::snprintf(buf, sizeof buf, ".%03lld", (long long)(ns % 1000));
      std::string frac = buf;
      while (frac.back() == '0') frac.pop_back();
      out += frac;
    }
    out += ", overhead_us=" + std::to_string(m.overheadUs()) + "}";
  } else {
    out += "pwl{";
    const auto& ks = m.knots();
    for (size_t i = 0; i < ks.size(); ++i) {
      if (i) out += ",";
      out += "(" + std::to_string(ks[i].tuples) + "," +
             std::to_string(ks[i].costUs) + ")";
    }
    out += "}";
  }
}

void appendProfile(std::string& out, const ArrivalProfile& p) {
  if (p.kind() == ArrivalProfile::Kind::FixedRate) {
    out += "kind = fixed\n";
    out += "start_us = " + std::to_string(p.startTime()) + "\n";
    out += "rate_per_sec = " + formatRational(p.ratePerSec()) + "\n";
    out += "total = " + std::to_string(p.total()) + "\n";
  } else {
    out += "kind = trace\n";
    out += "points = ";
    const auto& pts = p.points();
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) out += ",";
      out += "(" + std::to_string(pts[i].timeUs) + "," +
             std::to_string(pts[i].cumulative) + ")";
    }
    out += "\n";
  }
}

}  // namespace

Rational parseRational(const std::string& text) {
  std::string t = trim(text);
  size_t slash = t.find('/');
  if (slash != std::string::npos) {
    std::string a = trim(t.substr(0, slash)), b = trim(t.substr(slash + 1));
    errno = 0;
    char *ea = nullptr, *eb = nullptr;
    long long num = std::strtoll(a.c_str(), &ea, 10);
    long long den = std::strtoll(b.c_str(), &eb, 10);
    if (errno == ERANGE || ea != a.c_str() + a.size() ||
        eb != b.c_str() + b.size())
      throw ConfigError("bad fraction '" + t + "'");
    return Rational(num, den);
  }
  return parseDecimal(t);
}

std::string formatRational(const Rational& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

Scenario parseScenarioText(const std::string& text) {
  RawSection top, sched;
  std::vector<std::string> queryOrder;
  std::map<std::string, RawSection> queries, profiles, actuals;

  RawSection* current = &top;
  std::istringstream in(text);
  std::string rawLine;
  int lineNo = 0;
  while (std::getline(in, rawLine)) {
    ++lineNo;
    std::string line = rawLine;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineNo, "unterminated section header");
      std::string inside = trim(line.substr(1, line.size() - 2));
      size_t sp = inside.find(' ');
      std::string kind = sp == std::string::npos ? inside : inside.substr(0, sp);
      std::string id = sp == std::string::npos ? "" : trim(inside.substr(sp + 1));
      if (kind == "scheduler" && id.empty()) {
        current = &sched;
      } else if (kind == "query" && !id.empty()) {
        if (!queries.count(id)) queryOrder.push_back(id);
        current = &queries[id];
      } else if (kind == "profile" && !id.empty()) {
        current = &profiles[id];
      } else if (kind == "actual" && !id.empty()) {
        current = &actuals[id];
      } else {
        fail(lineNo, "unknown section '" + inside + "'");
      }
      current->line = lineNo;
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineNo, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineNo, "empty key");
    current->kv[key] = {value, lineNo};
  }

  Scenario s;
  if (auto* v = getIf(top, "label")) s.label = v->first;
  if (auto* v = getIf(top, "seed"))
    s.seed = (std::uint64_t)parseInt(v->first, v->second, "seed");

  if (auto* v = getIf(sched, "policy")) {
    auto p = schedPolicyFromName(trim(v->first));
    if (!p) fail(v->second, "unknown policy '" + v->first + "'");
    s.config.policy = *p;
  }
  if (auto* v = getIf(sched, "rsf")) {
    try {
      s.config.rsf = parseRational(v->first);
    } catch (const std::exception& e) {
      fail(v->second, std::string("rsf: ") + e.what());
    }
  }
  if (auto* v = getIf(sched, "cmax_us"))
    s.config.cMaxUs = parseInt(v->first, v->second, "cmax_us");
  if (auto* v = getIf(sched, "rate_mode")) {
    auto m = rateModeFromName(trim(v->first));
    if (!m) fail(v->second, "unknown rate_mode '" + v->first + "'");
    s.config.rateMode = *m;
  }
  if (auto* v = getIf(sched, "greedy_batch"))
    s.config.greedyBatch = parseOnOff(v->first, v->second, "greedy_batch");
  if (auto* v = getIf(sched, "strict_polling"))
    s.config.strictPolling = parseOnOff(v->first, v->second, "strict_polling");

  for (const std::string& id : queryOrder) {
    const RawSection& qs = queries[id];
    const std::string where = "query " + id;
    auto pit = profiles.find(id);
    if (pit == profiles.end())
      throw ConfigError(where + ": no [profile " + id + "] section");

    ScenarioQuery sq;
    if (auto* v = getIf(qs, "arrival_us"))
      sq.arrivalTimeUs = parseInt(v->first, v->second, "arrival_us");
    Query q;
    q.id = id;
    q.profile = buildProfile(pit->second, "profile " + id);
    q.deadlineUs =
        parseInt(need(qs, "deadline_us", where), qs.line, "deadline_us");
    {
      auto* v = getIf(qs, "cost");
      if (!v) throw ConfigError(where + ": missing key 'cost'");
      q.cost = parseCost(v->first, v->second);
    }
    TupleCount groups = 0;
    if (auto* v = getIf(qs, "agg_groups"))
      groups = parseInt(v->first, v->second, "agg_groups");
    if (auto* v = getIf(qs, "agg"); v && trim(v->first) != "none") {
      std::string val = trim(v->first);
      if (val.rfind("pwl{", 0) != 0 || val.back() != '}')
        fail(v->second, "agg: expected none or pwl{...}");
      std::vector<AggKnot> ks;
      for (auto [b, c] :
           parsePairs(val.substr(4, val.size() - 5), v->second, "agg"))
        ks.push_back({b, c});
      try {
        q.agg = AggCostModel::fromKnots(std::move(ks), groups);
      } catch (const std::exception& e) {
        fail(v->second, std::string("agg: ") + e.what());
      }
    } else if (groups > 0) {
      q.agg = AggCostModel::fromKnots({{1, 0}}, groups);
    }
    auto ait = actuals.find(id);
    if (ait != actuals.end())
      sq.actualProfile = buildProfile(ait->second, "actual " + id);
    try {
      validateQuery(q);
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
    sq.query = std::move(q);
    s.queries.push_back(std::move(sq));
  }

  for (const auto& [id, sec] : profiles)
    if (!queries.count(id))
      throw ConfigError("profile " + id + " has no matching query section");
  for (const auto& [id, sec] : actuals)
    if (!queries.count(id))
      throw ConfigError("actual " + id + " has no matching query section");
  return s;
}

Scenario parseScenarioFile(const std::string& path) {
  try {
    return parseScenarioText(readTextFile(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string writeScenarioText(const Scenario& s) {
  std::string out;
  out += "label = " + s.label + "\n";
  out += "seed = " + std::to_string(s.seed) + "\n\n";
  out += "[scheduler]\n";
  out += "policy = " + std::string(schedPolicyName(s.config.policy)) + "\n";
  out += "rsf = " + formatRational(s.config.rsf) + "\n";
  out += "cmax_us = " + std::to_string(s.config.cMaxUs) + "\n";
  out += "rate_mode = " + std::string(rateModeName(s.config.rateMode)) + "\n";
  out += std::string("greedy_batch = ") + (s.config.greedyBatch ? "on" : "off") +
         "\n";
  out += std::string("strict_polling = ") +
         (s.config.strictPolling ? "on" : "off") + "\n";
  for (const ScenarioQuery& sq : s.queries) {
    out += "\n[query " + sq.query.id + "]\n";
    out += "arrival_us = " + std::to_string(sq.arrivalTimeUs) + "\n";
    out += "deadline_us = " + std::to_string(sq.query.deadlineUs) + "\n";
    out += "cost = ";
    appendCost(out, sq.query.cost);
    out += "\n";
    if (sq.query.agg.isZero() && sq.query.agg.numGroups() == 0) {
      out += "agg = none\n";
    } else {
      out += "agg = pwl{";
      const auto& ks = sq.query.agg.knots();
      for (size_t i = 0; i < ks.size(); ++i) {
        if (i) out += ",";
        out += "(" + std::to_string(ks[i].numBatches) + "," +
               std::to_string(ks[i].costUs) + ")";
      }
      out += "}\n";
      out += "agg_groups = " + std::to_string(sq.query.agg.numGroups()) + "\n";
    }
    out += "\n[profile " + sq.query.id + "]\n";
    appendProfile(out, sq.query.profile);
    if (sq.actualProfile) {
      out += "\n[actual " + sq.query.id + "]\n";
      appendProfile(out, *sq.actualProfile);
    }
  }
  return out;
}

std::string writeTraceCsv(const SimTrace& trace) {
  std::string out = "time_us,event,query_id,tuples,duration_us\n";
  for (const TraceRow& r : trace) {
    out += std::to_string(r.timeUs);
    out += ",";
    out += simEventName(r.event);
    out += ",";
    out += r.queryId;
    out += ",";
    out += std::to_string(r.tuples);
    out += ",";
    out += std::to_string(r.durationUs);
    out += "\n";
  }
  return out;
}

namespace {

std::vector<std::string> splitCsvLine(const std::string& line, size_t expect,
                                      int lineNo) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (cells.size() != expect)
    fail(lineNo, "expected " + std::to_string(expect) + " columns, got " +
                     std::to_string(cells.size()));
  return cells;
}

}  // namespace

SimTrace parseTraceCsv(const std::string& text) {
  SimTrace trace;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (lineNo == 1) {
      if (trim(line) != "time_us,event,query_id,tuples,duration_us")
        fail(lineNo, "unexpected trace.csv header");
      continue;
    }
    if (trim(line).empty()) continue;
    auto c = splitCsvLine(line, 5, lineNo);
    TraceRow r;
    r.timeUs = parseInt(c[0], lineNo, "time_us");
    auto e = simEventFromName(trim(c[1]));
    if (!e) fail(lineNo, "unknown event '" + c[1] + "'");
    r.event = *e;
    r.queryId = trim(c[2]);
    r.tuples = parseInt(c[3], lineNo, "tuples");
    r.durationUs = parseInt(c[4], lineNo, "duration_us");
    trace.push_back(std::move(r));
  }
  return trace;
}

std::string writeMetricsCsv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "scenario,policy,delta,rsf,query_id,total_cost_us,num_batches,"
      "deadline_met,tardiness_us,normalized_cost\n";
  char buf[64];
  for (const MetricsRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.normalizedCost);
    out += r.scenario + "," + r.policy + "," + r.delta + "," + r.rsf + "," +
           r.queryId + "," + std::to_string(r.totalCostUs) + "," +
           std::to_string(r.numBatches) + "," + (r.deadlineMet ? "1" : "0") +
           "," + std::to_string(r.tardinessUs) + "," + buf + "\n";
  }
  return out;
}

std::vector<MetricsRow> parseMetricsCsv(const std::string& text) {
  std::vector<MetricsRow> rows;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (lineNo == 1) continue;  // header
    if (trim(line).empty()) continue;
    auto c = splitCsvLine(line, 10, lineNo);
    MetricsRow r;
    r.scenario = c[0];
    r.policy = c[1];
    r.delta = c[2];
    r.rsf = c[3];
    r.queryId = c[4];
    r.totalCostUs = parseInt(c[5], lineNo, "total_cost_us");
    r.numBatches = parseInt(c[6], lineNo, "num_batches");
    r.deadlineMet = parseInt(c[7], lineNo, "deadline_met") != 0;
    r.tardinessUs = parseInt(c[8], lineNo, "tardiness_us");
    r.normalizedCost = std::strtod(c[9].c_str(), nullptr);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("failed writing " + path);
}

}  // namespace iqsched
