#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ddroute/graph.hpp"

namespace ddroute {

// Partition of a road graph into axis-aligned square cells. Region ids are
// assigned to the non-empty cells in (row, column) scan order, so they are
// contiguous 0..R-1. The region graph links regions joined by at least one
// road edge; region coordinates are the cell centers.
struct Abstraction {
  double cell_size = 0.0;
  RoadGraph region_graph;
  std::vector<std::vector<int>> region_to_vertices;  // ascending per region

  int region_of(int vertex_id) const;
  int region_count() const { return region_graph.vertex_count(); }

  std::unordered_map<int, int> vertex_to_region;
};

Abstraction abstract_graph(const RoadGraph& g, double cell_size);

Abstraction load_abstraction(const std::string& path);
void save_abstraction(const Abstraction& a, const std::string& path);

// Region sequence visited by a road trip: map each vertex to its region,
// collapse consecutive duplicates, then cut revisit cycles (keep the first
// occurrence, splice to the step after the revisit) until loop-free.
Trip project_trip(const Abstraction& a, const Trip& trip);

}  // namespace ddroute
