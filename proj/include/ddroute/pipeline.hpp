#pragma once

#include <cstdint>
#include <string>

#include "ddroute/abstraction.hpp"
#include "ddroute/cnf.hpp"
#include "ddroute/diagram.hpp"
#include "ddroute/graph.hpp"

namespace ddroute {

struct RouteQuery {
  int s = 0;
  int t = 0;
};

struct SampleConfig {
  int max_attempts = 400;
  double time_budget_seconds = 300.0;
  int k_per_attempt = 1;
  uint64_t seed = 0;
};

// Road graph + region abstraction + a smooth diagram over the region
// encoding's variables. make_route_model validates the pieces fit together.
struct RouteModel {
  RoadGraph road;
  Abstraction abstraction;
  ProbDiagram diagram;
  VarMap var_map;  // over the region graph
};

RouteModel make_route_model(RoadGraph road, Abstraction abstraction,
                            ProbDiagram diagram);

struct RouteResult {
  bool success = false;
  Trip trip;
  int attempts = 0;
  double elapsed_ms = 0.0;
  std::string method;
};

// Partial assignment forcing the two endpoint regions' s-variables true.
// The regions must differ; same-region queries bypass the diagram entirely.
Assignment build_query_assignment(const RouteModel& m, const RouteQuery& q);

// Extracts the region path from a sampled solution: starting at
// start_region, repeatedly move to the unique unvisited selected neighbor.
// Any disjoint cycles in the solution are never reached and drop out. The
// walk must end at end_region, or the diagram violated its structure
// guarantees and this throws.
Trip refine_region_trip(const RoadGraph& region_graph, const VarMap& vm,
                        const Assignment& solution, int start_region,
                        int end_region);

// Draw region trips from the diagram conditioned on the endpoint regions,
// refine each, and expand over the road subgraph induced by the sampled
// regions (shortest path inside it). Rejection-samples until an expansion
// succeeds or the attempt/time budget runs out.
RouteResult sample_route(const RouteModel& m, const RouteQuery& q,
                         const SampleConfig& cfg);

// Baseline that grows the region trip one region at a time; each candidate
// next region is weighted by the marginal mass of the partial assignment
// extended with it, which costs one full bottom-up pass per candidate.
RouteResult stepwise_sample_route(const RouteModel& m, const RouteQuery& q,
                                  const SampleConfig& cfg);

// Plain shortest path on the road graph.
RouteResult baseline_shortest(const RouteModel& m, const RouteQuery& q);

}  // namespace ddroute
