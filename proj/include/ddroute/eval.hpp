#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddroute/diagram.hpp"
#include "ddroute/graph.hpp"
#include "ddroute/pipeline.hpp"

namespace ddroute {

// Fraction of ground-trip vertices lying within euclidean distance epsilon
// of some proposed-trip vertex. Set-based: reversing either trip changes
// nothing. An empty proposed trip scores 0 (see MatchScore::proposed_empty);
// an empty ground trip is an error.
double match_rate(const RoadGraph& g, const Trip& ground, const Trip& proposed,
                  double epsilon);

struct MatchScore {
  double rate = 0.0;
  bool proposed_empty = false;
};

MatchScore match_score(const RoadGraph& g, const Trip& ground,
                       const Trip& proposed, double epsilon);

// Nearest-rank percentiles plus moments. For n values sorted ascending the
// p-th percentile is the ceil(p*n/100)-th value (1-based). Zeroed when the
// sample is empty.
struct SummaryStats {
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  int count = 0;
};

SummaryStats summarize(std::vector<double> values);

struct EvalConfig {
  int samples_per_instance = 20;
  double epsilon = -1.0;  // negative: use median_edge_length of the road graph
  int workers = 1;
  uint64_t seed = 0;
  SampleConfig sample;  // per-draw attempt/time budget
};

struct InstanceResult {
  RouteQuery query;
  bool completed = false;     // at least one draw produced a road trip
  double epsilon_match = 0.0;  // median over successful draws
  double exact_match = 0.0;    // same, at epsilon = 0
  int successes = 0;
  int draws = 0;
  double total_ms = 0.0;
};

struct MethodReport {
  std::string method;
  std::vector<InstanceResult> instances;
  int completed_count = 0;
  // Over this method's own completed instances.
  SummaryStats epsilon_match;
  SummaryStats exact_match;
  SummaryStats time_ms;
  // Over the instances every evaluated method completed.
  SummaryStats epsilon_match_intersection;
  SummaryStats exact_match_intersection;
};

struct MatchReport {
  double epsilon = 0.0;
  int samples_per_instance = 0;
  int instance_count = 0;
  int intersection_completed = 0;
  std::vector<MethodReport> methods;
};

// Method names: "shortest", "single-pass", "stepwise".
RouteResult run_method(const RouteModel& m, const std::string& method,
                       const RouteQuery& q, const SampleConfig& cfg);

// For every test trip, query its endpoints with each method, draw
// samples_per_instance road trips ("shortest" is deterministic and runs
// once), and score each instance by the median match rate of its successful
// draws against the test trip. Instances where a method never produced a
// trip count as not completed for it and are excluded from that method's
// statistics. Deterministic given cfg.seed regardless of worker count.
MatchReport evaluate_suite(const RouteModel& m, const std::vector<Trip>& tests,
                           const std::vector<std::string>& methods,
                           const EvalConfig& cfg);

struct BenchMethodReport {
  std::string method;
  std::vector<double> per_query_ms;  // every query, failures included
  std::vector<bool> completed_flags;
  int timeouts = 0;  // queries with no trip within the budget
  SummaryStats time_ms;  // over completed queries
  SummaryStats ratio;    // per-query time / baseline_shortest time, completed
};

struct BenchReport {
  int query_count = 0;
  std::vector<BenchMethodReport> methods;
};

// One run per (query, method); ratios are computed against an internal
// baseline_shortest pass whether or not "shortest" is listed.
BenchReport benchmark_runtime(const RouteModel& m,
                              const std::vector<RouteQuery>& queries,
                              const std::vector<std::string>& methods,
                              const EvalConfig& cfg);

// Total-variation distance between the empirical frequencies of num_samples
// draws conditioned on `condition` and the exact normalized per-solution
// weights. Enumerates every complete assignment, so the diagram must stay
// within 20 variables.
double distribution_check(const ProbDiagram& d, const Assignment& condition,
                          int num_samples, uint64_t seed);

}  // namespace ddroute
