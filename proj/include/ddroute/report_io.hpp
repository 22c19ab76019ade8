#pragma once

#include <string>
#include <vector>

#include "ddroute/eval.hpp"
#include "ddroute/pipeline.hpp"

namespace ddroute {

// Query files are JSONL, one {"s": id, "t": id} object per line.
std::vector<RouteQuery> load_queries(const std::string& path);
void save_queries(const std::vector<RouteQuery>& queries,
                  const std::string& path);

// Result files are JSONL: {"trip": [ids], "attempts": n, "method": "..."},
// plus "elapsed_ms" when include_timing is set. Failures carry an empty
// trip. Timing is opt-in so that seeded runs stay byte-identical.
void save_route_results(const std::vector<RouteResult>& results,
                        const std::string& path, bool include_timing);

void save_match_report(const MatchReport& report, const std::string& path,
                       bool include_timing);
void save_bench_report(const BenchReport& report, const std::string& path);

// Aligned-column text tables for terminals; one stats row per percentile.
std::string format_match_report(const MatchReport& report);
std::string format_bench_report(const BenchReport& report);

}  // namespace ddroute
