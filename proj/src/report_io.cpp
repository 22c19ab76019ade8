#include "ddroute/report_io.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "ddroute/error.hpp"

namespace ddroute {

namespace {

nlohmann::json stats_json(const SummaryStats& s) {
  return {{"p25", s.p25},   {"p50", s.p50},       {"p75", s.p75},
          {"mean", s.mean}, {"stddev", s.stddev}, {"count", s.count}};
}

// One table: a header row of method names, then one row per statistic.
std::string format_table(
    const std::string& title, const std::vector<std::string>& methods,
    const std::vector<std::pair<
        std::string, std::function<double(std::size_t)>>>& rows,
    const std::vector<std::pair<std::string, std::function<int(std::size_t)>>>&
        count_rows) {
  std::ostringstream out;
  out << title << '\n';
  out << std::left << std::setw(12) << "Stats" << std::right;
  for (const std::string& m : methods) out << std::setw(14) << m;
  out << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& [name, value_of] : rows) {
    out << std::left << std::setw(12) << name << std::right;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      out << std::setw(14) << value_of(mi);
    }
    out << '\n';
  }
  for (const auto& [name, value_of] : count_rows) {
    out << std::left << std::setw(12) << name << std::right;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      out << std::setw(14) << value_of(mi);
    }
    out << '\n';
  }
  return out.str();
}

std::string format_stats_block(const std::string& title,
                               const std::vector<std::string>& methods,
                               const std::vector<const SummaryStats*>& stats) {
  auto row = [&](double SummaryStats::*field) {
    return [&stats, field](std::size_t mi) { return stats[mi]->*field; };
  };
  return format_table(title, methods,
                      {{"25%", row(&SummaryStats::p25)},
                       {"50%", row(&SummaryStats::p50)},
                       {"75%", row(&SummaryStats::p75)},
                       {"Mean", row(&SummaryStats::mean)},
                       {"Std", row(&SummaryStats::stddev)}},
                      {{"Instances", [&stats](std::size_t mi) {
                          return stats[mi]->count;
                        }}});
}

void write_text_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write report file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

std::vector<RouteQuery> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open queries file: " + path);
  std::vector<RouteQuery> queries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      queries.push_back({j.at("s").get<int>(), j.at("t").get<int>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("bad query at " + path + ":" +
                       std::to_string(line_no) + ": " + e.what());
    }
  }
  return queries;
}

void save_queries(const std::vector<RouteQuery>& queries,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write queries file: " + path);
  for (const RouteQuery& q : queries) {
    nlohmann::json j{{"s", q.s}, {"t", q.t}};
    out << j.dump() << '\n';
  }
}

void save_route_results(const std::vector<RouteResult>& results,
                        const std::string& path, bool include_timing) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write results file: " + path);
  for (const RouteResult& r : results) {
    nlohmann::json j{{"trip", r.trip.vertices},
                     {"attempts", r.attempts},
                     {"method", r.method}};
    if (include_timing) j["elapsed_ms"] = r.elapsed_ms;
    out << j.dump() << '\n';
  }
}

void save_match_report(const MatchReport& report, const std::string& path,
                       bool include_timing) {
  nlohmann::json j{{"epsilon", report.epsilon},
                   {"samples_per_instance", report.samples_per_instance},
                   {"instances", report.instance_count},
                   {"intersection_completed", report.intersection_completed}};
  j["methods"] = nlohmann::json::array();
  for (const MethodReport& mr : report.methods) {
    nlohmann::json mj{
        {"method", mr.method},
        {"completed", mr.completed_count},
        {"epsilon_match", stats_json(mr.epsilon_match)},
        {"exact_match", stats_json(mr.exact_match)},
        {"epsilon_match_intersection",
         stats_json(mr.epsilon_match_intersection)},
        {"exact_match_intersection", stats_json(mr.exact_match_intersection)}};
    if (include_timing) mj["time_ms"] = stats_json(mr.time_ms);
    mj["instances"] = nlohmann::json::array();
    for (const InstanceResult& r : mr.instances) {
      nlohmann::json ij{{"s", r.query.s},
                        {"t", r.query.t},
                        {"completed", r.completed},
                        {"epsilon_match", r.epsilon_match},
                        {"exact_match", r.exact_match},
                        {"successes", r.successes},
                        {"draws", r.draws}};
      if (include_timing) ij["time_ms"] = r.total_ms;
      mj["instances"].push_back(std::move(ij));
    }
    j["methods"].push_back(std::move(mj));
  }
  write_text_file(j, path);
}

void save_bench_report(const BenchReport& report, const std::string& path) {
  nlohmann::json j{{"queries", report.query_count}};
  j["methods"] = nlohmann::json::array();
  for (const BenchMethodReport& mr : report.methods) {
    nlohmann::json mj{{"method", mr.method},
                      {"timeouts", mr.timeouts},
                      {"time_ms", stats_json(mr.time_ms)},
                      {"ratio_vs_shortest", stats_json(mr.ratio)}};
    mj["per_query"] = nlohmann::json::array();
    for (std::size_t i = 0; i < mr.per_query_ms.size(); ++i) {
      mj["per_query"].push_back(
          {{"ms", mr.per_query_ms[i]},
           {"completed", static_cast<bool>(mr.completed_flags[i])}});
    }
    j["methods"].push_back(std::move(mj));
  }
  write_text_file(j, path);
}

std::string format_match_report(const MatchReport& report) {
  std::vector<std::string> methods;
  for (const MethodReport& mr : report.methods) methods.push_back(mr.method);

  std::ostringstream head;
  head << "Match rates: " << report.instance_count << " instances, "
       << report.samples_per_instance << " samples/instance, epsilon = "
       << std::fixed << std::setprecision(4) << report.epsilon << "\n\n";

  auto collect = [&](SummaryStats MethodReport::*field) {
    std::vector<const SummaryStats*> out;
    for (const MethodReport& mr : report.methods) out.push_back(&(mr.*field));
    return out;
  };

  std::string body = head.str();
  body += format_stats_block("epsilon-match (per-method completed instances)",
                             methods, collect(&MethodReport::epsilon_match));
  body += '\n';
  body += format_stats_block("exact-match (per-method completed instances)",
                             methods, collect(&MethodReport::exact_match));
  body += '\n';
  body += format_stats_block(
      "epsilon-match (intersection: " +
          std::to_string(report.intersection_completed) + " instances)",
      methods, collect(&MethodReport::epsilon_match_intersection));
  return body;
}

std::string format_bench_report(const BenchReport& report) {
  std::vector<std::string> methods;
  std::vector<const SummaryStats*> ratios;
  std::vector<const SummaryStats*> times;
  for (const BenchMethodReport& mr : report.methods) {
    methods.push_back(mr.method);
    ratios.push_back(&mr.ratio);
    times.push_back(&mr.time_ms);
  }
  std::ostringstream head;
  head << "Runtime over " << report.query_count << " queries\n\n";
  std::string body = head.str();
  body += format_table(
      "relative runtime vs shortest (lower is better)", methods,
      {{"25%", [&](std::size_t mi) { return ratios[mi]->p25; }},
       {"50%", [&](std::size_t mi) { return ratios[mi]->p50; }},
       {"75%", [&](std::size_t mi) { return ratios[mi]->p75; }},
       {"Mean", [&](std::size_t mi) { return ratios[mi]->mean; }}},
      {{"Timeouts", [&](std::size_t mi) {
          return report.methods[mi].timeouts;
        }}});
  body += '\n';
  body += format_table(
      "wall-clock per query (ms, completed queries)", methods,
      {{"25%", [&](std::size_t mi) { return times[mi]->p25; }},
       {"50%", [&](std::size_t mi) { return times[mi]->p50; }},
       {"75%", [&](std::size_t mi) { return times[mi]->p75; }},
       {"Mean", [&](std::size_t mi) { return times[mi]->mean; }}},
      {});
  return body;
}

}  // namespace ddroute
