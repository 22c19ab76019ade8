#include "ddroute/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "ddroute/error.hpp"
#include "ddroute/inference.hpp"
#include "ddroute/rng.hpp"

namespace ddroute {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// Shortest path restricted to the kept regions' induced subgraph.
std::optional<Trip> path_within_regions(const RouteModel& m, int s, int t,
                                        const std::vector<int>& regions) {
  std::vector<char> keep(m.abstraction.region_count(), 0);
  for (int r : regions) keep[r] = 1;
  return shortest_path(m.road, s, t, [&m, &keep](int id) {
    return keep[m.abstraction.region_of(id)] == 0;
  });
}

// Shortest path inside one region's induced subgraph; shared by the
// same-region bypass of both samplers.
RouteResult same_region_route(const RouteModel& m, const RouteQuery& q,
                              const std::string& method,
                              Clock::time_point start) {
  int region = m.abstraction.region_of(q.s);
  auto trip = path_within_regions(m, q.s, q.t, {region});
  RouteResult result;
  result.success = trip.has_value();
  if (trip) result.trip = *trip;
  result.attempts = 0;
  result.method = method;
  result.elapsed_ms = ms_since(start);
  return result;
}

void require_query(const RouteModel& m, const RouteQuery& q) {
  m.road.vertex(q.s);
  m.road.vertex(q.t);
  if (q.s == q.t) {
    throw ValidationError("route query endpoints must differ");
  }
}

}  // namespace

RouteModel make_route_model(RoadGraph road, Abstraction abstraction,
                            ProbDiagram diagram) {
  VarMap vm(abstraction.region_graph);
  if (diagram.num_vars() != vm.num_vars()) {
    throw ValidationError(
        "diagram has " + std::to_string(diagram.num_vars()) +
        " variables but the region graph needs " +
        std::to_string(vm.num_vars()));
  }
  PropertyReport report = validate(diagram);
  if (!report.all_pass()) {
    std::string detail = !report.determinism.pass ? report.determinism.detail
                         : !report.decomposability.pass
                             ? report.decomposability.detail
                             : report.smoothness.detail;
    throw ValidationError("diagram fails structural validation: " + detail);
  }
  for (const auto& entry : abstraction.vertex_to_region) {
    road.vertex(entry.first);  // throws if the abstraction maps unknown ids
  }
  for (const Vertex& v : road.vertices()) {
    abstraction.region_of(v.id);  // throws if a road vertex has no region
  }
  return RouteModel{std::move(road), std::move(abstraction),
                    std::move(diagram), std::move(vm)};
}

Assignment build_query_assignment(const RouteModel& m, const RouteQuery& q) {
  require_query(m, q);
  int rs = m.abstraction.region_of(q.s);
  int rt = m.abstraction.region_of(q.t);
  if (rs == rt) {
    throw ValidationError(
        "endpoints share a region; the encoding cannot express single-region "
        "trips (use the same-region bypass)");
  }
  Assignment a(m.diagram.num_vars());
  a.bind(m.var_map.s_var(rs), true);
  a.bind(m.var_map.s_var(rt), true);
  return a;
}

Trip refine_region_trip(const RoadGraph& region_graph, const VarMap& vm,
                        const Assignment& solution, int start_region,
                        int end_region) {
  std::vector<bool> selected(region_graph.vertex_count(), false);
  for (const Vertex& v : region_graph.vertices()) {
    if (solution.value(vm.n_var(v.id))) selected[v.id] = true;
  }
  if (!selected[start_region] || !selected[end_region]) {
    throw ValidationError("solution does not select the endpoint regions");
  }

  Trip trip{{start_region}};
  std::vector<bool> visited(region_graph.vertex_count(), false);
  visited[start_region] = true;
  int current = start_region;
  for (;;) {
    int next = -1;
    for (int nbr : region_graph.neighbors(current)) {
      if (!selected[nbr] || visited[nbr]) continue;
      if (next != -1) {
        throw ValidationError(
            "solution violates the path structure: region " +
            std::to_string(current) + " has two unvisited selected neighbors");
      }
      next = nbr;
    }
    if (next == -1) break;
    trip.vertices.push_back(next);
    visited[next] = true;
    current = next;
  }
  if (current != end_region) {
    throw ValidationError(
        "solution walk ended at region " + std::to_string(current) +
        " instead of the end region " + std::to_string(end_region));
  }
  return trip;
}

RouteResult sample_route(const RouteModel& m, const RouteQuery& q,
                         const SampleConfig& cfg) {
  require_query(m, q);
  auto start = Clock::now();
  int rs = m.abstraction.region_of(q.s);
  int rt = m.abstraction.region_of(q.t);
  if (rs == rt) return same_region_route(m, q, "single-pass", start);

  // An unsatisfiable condition surfaces as UnsatisfiableConditionError from
  // the first sample_assignments call; no separate upfront pass needed.
  Assignment condition = build_query_assignment(m, q);

  RouteResult result;
  result.method = "single-pass";
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    if (ms_since(start) > cfg.time_budget_seconds * 1000.0) break;
    result.attempts = attempt;
    auto samples = sample_assignments(m.diagram, condition, cfg.k_per_attempt,
                                      mix_seed(cfg.seed, attempt));
    for (const Assignment& solution : samples) {
      Trip regions =
          refine_region_trip(m.abstraction.region_graph, m.var_map, solution,
                             rs, rt);
      auto trip = path_within_regions(m, q.s, q.t, regions.vertices);
      if (trip) {
        result.success = true;
        result.trip = *trip;
        result.elapsed_ms = ms_since(start);
        return result;
      }
    }
  }
  result.elapsed_ms = ms_since(start);
  return result;
}

RouteResult stepwise_sample_route(const RouteModel& m, const RouteQuery& q,
                                  const SampleConfig& cfg) {
  require_query(m, q);
  auto start = Clock::now();
  int rs = m.abstraction.region_of(q.s);
  int rt = m.abstraction.region_of(q.t);
  if (rs == rt) return same_region_route(m, q, "stepwise", start);

  Assignment base = build_query_assignment(m, q);
  if (probability_of(m.diagram, base) == 0.0) {
    throw UnsatisfiableConditionError(
        "no region trip connects the endpoint regions under this diagram");
  }

  const RoadGraph& rg = m.abstraction.region_graph;
  RouteResult result;
  result.method = "stepwise";
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    if (ms_since(start) > cfg.time_budget_seconds * 1000.0) break;
    result.attempts = attempt;
    Rng rng(mix_seed(cfg.seed, attempt));

    Assignment partial = base;
    partial.bind(m.var_map.n_var(rs), true);
    Trip regions{{rs}};
    int current = rs;
    while (current != rt) {
      // Candidate extensions: adjacent, unvisited, and keeping the walked
      // prefix a simple trip. Each is weighted by the mass of the partial
      // assignment extended with its n-variable (one full pass apiece).
      std::vector<int> candidates;
      std::vector<double> weights;
      double total = 0.0;
      for (int nbr : rg.neighbors(current)) {
        if (std::find(regions.vertices.begin(), regions.vertices.end(), nbr) !=
            regions.vertices.end()) {
          continue;
        }
        Trip extended = regions;
        extended.vertices.push_back(nbr);
        if (!is_simple_trip(rg, extended)) continue;
        Assignment trial = partial;
        trial.bind(m.var_map.n_var(nbr), true);
        double w = probability_of(m.diagram, trial);
        if (w > 0.0) {
          candidates.push_back(nbr);
          weights.push_back(w);
          total += w;
        }
      }
      if (candidates.empty()) break;  // dead end; reject the attempt

      double draw = rng.next_double() * total;
      int chosen = candidates.back();
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (draw < weights[i]) {
          chosen = candidates[i];
          break;
        }
        draw -= weights[i];
      }
      regions.vertices.push_back(chosen);
      partial.bind(m.var_map.n_var(chosen), true);
      current = chosen;
    }
    if (current != rt) continue;

    auto trip = path_within_regions(m, q.s, q.t, regions.vertices);
    if (trip) {
      result.success = true;
      result.trip = *trip;
      result.elapsed_ms = ms_since(start);
      return result;
    }
  }
  result.elapsed_ms = ms_since(start);
  return result;
}

RouteResult baseline_shortest(const RouteModel& m, const RouteQuery& q) {
  require_query(m, q);
  auto start = Clock::now();
  auto trip = shortest_path(m.road, q.s, q.t);
  RouteResult result;
  result.success = trip.has_value();
  if (trip) result.trip = *trip;
  result.method = "shortest";
  result.elapsed_ms = ms_since(start);
  return result;
}

}  // namespace ddroute
