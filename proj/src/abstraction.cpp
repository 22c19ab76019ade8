#include "ddroute/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "ddroute/error.hpp"
#include "json.hpp"

namespace ddroute {

int Abstraction::region_of(int vertex_id) const {
  auto it = vertex_to_region.find(vertex_id);
  if (it == vertex_to_region.end()) {
    throw ValidationError("vertex " + std::to_string(vertex_id) +
                          " has no region");
  }
  return it->second;
}

Abstraction abstract_graph(const RoadGraph& g, double cell_size) {
  if (!(cell_size > 0.0)) throw ValidationError("cell size must be positive");
  if (g.vertex_count() == 0) throw ValidationError("empty graph");

  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  for (const Vertex& v : g.vertices()) {
    min_x = std::min(min_x, v.x);
    min_y = std::min(min_y, v.y);
  }

  // Non-empty cells keyed (row, col); std::map gives scan order directly.
  std::map<std::pair<int, int>, std::vector<int>> cells;
  for (const Vertex& v : g.vertices()) {
    int col = static_cast<int>(std::floor((v.x - min_x) / cell_size));
    int row = static_cast<int>(std::floor((v.y - min_y) / cell_size));
    cells[{row, col}].push_back(v.id);
  }

  Abstraction a;
  a.cell_size = cell_size;
  std::vector<Vertex> region_vertices;
  int next_region = 0;
  for (auto& [cell, members] : cells) {
    std::sort(members.begin(), members.end());
    for (int vid : members) a.vertex_to_region[vid] = next_region;
    a.region_to_vertices.push_back(members);
    region_vertices.push_back({next_region,
                               min_x + (cell.second + 0.5) * cell_size,
                               min_y + (cell.first + 0.5) * cell_size});
    ++next_region;
  }

  std::map<std::pair<int, int>, double> region_edges;
  for (const Edge& e : g.edges()) {
    int ru = a.vertex_to_region.at(e.u);
    int rv = a.vertex_to_region.at(e.v);
    if (ru == rv) continue;
    if (ru > rv) std::swap(ru, rv);
    if (!region_edges.count({ru, rv})) {
      region_edges[{ru, rv}] = euclidean_distance(region_vertices[ru],
                                                  region_vertices[rv]);
    }
  }
  std::vector<Edge> edges;
  for (const auto& [key, length] : region_edges) {
    edges.push_back({key.first, key.second, length});
  }
  a.region_graph = RoadGraph(std::move(region_vertices), std::move(edges));
  return a;
}

Trip project_trip(const Abstraction& a, const Trip& trip) {
  if (trip.empty()) throw ValidationError("empty trip");

  // Collapse runs of vertices inside one region.
  std::vector<int> collapsed;
  for (int v : trip.vertices) {
    int r = a.region_of(v);
    if (collapsed.empty() || collapsed.back() != r) collapsed.push_back(r);
  }

  // Cut cycles: on a revisit, pop back to the first occurrence and continue
  // from the step after the revisit.
  std::vector<int> out;
  std::unordered_map<int, int> position;
  for (int r : collapsed) {
    auto it = position.find(r);
    if (it != position.end()) {
      while (static_cast<int>(out.size()) > it->second + 1) {
        position.erase(out.back());
        out.pop_back();
      }
      continue;
    }
    if (!out.empty() && !a.region_graph.adjacent(out.back(), r)) {
      throw ValidationError(
          "projected regions " + std::to_string(out.back()) + " and " +
          std::to_string(r) + " are not adjacent; trip does not match "
          "this abstraction");
    }
    position[r] = static_cast<int>(out.size());
    out.push_back(r);
  }
  return Trip{std::move(out)};
}

Abstraction load_abstraction(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open abstraction file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  try {
    Abstraction a;
    a.cell_size = j.at("cell_size").get<double>();
    const auto& rg = j.at("region_graph");
    std::vector<Vertex> vertices;
    for (const auto& n : rg.at("nodes")) {
      vertices.push_back({n.at("id").get<int>(), n.at("x").get<double>(),
                          n.at("y").get<double>()});
    }
    std::vector<Edge> edges;
    for (const auto& e : rg.at("edges")) {
      edges.push_back({e.at("u").get<int>(), e.at("v").get<int>(),
                       e.at("length").get<double>()});
    }
    a.region_graph = RoadGraph(std::move(vertices), std::move(edges));
    a.region_to_vertices.resize(a.region_graph.vertex_count());
    for (const auto& pair : j.at("vertex_to_region")) {
      int vid = pair.at(0).get<int>();
      int rid = pair.at(1).get<int>();
      if (rid < 0 || rid >= a.region_graph.vertex_count()) {
        throw ParseError("region id out of range in " + path);
      }
      a.vertex_to_region[vid] = rid;
      a.region_to_vertices[rid].push_back(vid);
    }
    for (auto& members : a.region_to_vertices) {
      std::sort(members.begin(), members.end());
      if (members.empty()) {
        throw ParseError("abstraction has an empty region in " + path);
      }
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad abstraction schema in " + path + ": " + e.what());
  }
}

void save_abstraction(const Abstraction& a, const std::string& path) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Vertex& v : a.region_graph.vertices()) {
    nodes.push_back({{"id", v.id}, {"x", v.x}, {"y", v.y}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : a.region_graph.edges()) {
    edges.push_back({{"u", e.u}, {"v", e.v}, {"length", e.length}});
  }
  nlohmann::json mapping = nlohmann::json::array();
  for (const auto& members : a.region_to_vertices) {
    for (int vid : members) {
      // Filled region by region; re-sorted below for a stable file.
      mapping.push_back({vid, a.vertex_to_region.at(vid)});
    }
  }
  std::sort(mapping.begin(), mapping.end(),
            [](const nlohmann::json& x, const nlohmann::json& y) {
              return x.at(0).get<int>() < y.at(0).get<int>();
            });
  nlohmann::json j{{"cell_size", a.cell_size},
                   {"region_graph", {{"nodes", nodes}, {"edges", edges}}},
                   {"vertex_to_region", mapping}};
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write abstraction file: " + path);
  out << j.dump() << '\n';
}

}  // namespace ddroute
