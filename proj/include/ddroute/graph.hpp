#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ddroute {

struct Vertex {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct Edge {
  int u = 0;
  int v = 0;
  double length = 1.0;
};

// Ordered vertex sequence on some graph. Semantic checks (adjacency,
// simplicity) live in free functions that also take the graph.
struct Trip {
  std::vector<int> vertices;

  bool empty() const { return vertices.empty(); }
  std::size_t size() const { return vertices.size(); }
  int front() const { return vertices.front(); }
  int back() const { return vertices.back(); }
  bool operator==(const Trip&) const = default;
};

// Undirected graph with vertex coordinates and positive edge lengths.
// Immutable after construction; the constructor validates (unique ids, no
// self loops, no duplicate edges, declared endpoints, positive lengths).
class RoadGraph {
 public:
  RoadGraph() = default;
  RoadGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  bool has_vertex(int id) const { return index_of_.count(id) > 0; }
  const Vertex& vertex(int id) const;
  // Neighbor vertex ids in ascending order.
  std::span<const int> neighbors(int id) const;
  // Edge lengths parallel to neighbors(id), for walks that would otherwise
  // pay an edge lookup per relaxation.
  std::span<const double> neighbor_lengths(int id) const;
  bool adjacent(int u, int v) const;
  double edge_length(int u, int v) const;

  // Ascending id order.
  const std::vector<Vertex>& vertices() const { return vertices_; }
  // Normalized (u < v) and sorted by (u, v).
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  int rank_of(int id) const;

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::unordered_map<int, int> index_of_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::vector<double>> adjacency_lengths_;
  // Neighbor positions in vertices() order, parallel to adjacency_, so the
  // path search below never translates ids inside its hot loop.
  std::vector<std::vector<int>> adjacency_ranks_;

  friend std::optional<Trip> shortest_path(
      const RoadGraph& g, int s, int t,
      const std::function<bool(int)>& is_blocked);
};

// width columns x height rows; vertex (row r, col c) has id r*width + c and
// coordinates (c*spacing, r*spacing). Edges join horizontal and vertical
// lattice neighbors with length == spacing.
RoadGraph build_grid_graph(int width, int height, double spacing = 1.0);

RoadGraph load_graph(const std::string& path);
void save_graph(const RoadGraph& g, const std::string& path);

// Dijkstra over edge lengths, skipping blocked vertices. When two shortest
// alternatives reach a vertex at equal distance, the smaller predecessor id
// wins, so the returned path is deterministic. std::nullopt if unreachable.
std::optional<Trip> shortest_path(const RoadGraph& g, int s, int t,
                                  const std::unordered_set<int>& blocked = {});

// Same search with the blocked set given as a predicate over vertex ids;
// avoids materializing a hash set when the caller already has a cheap test.
std::optional<Trip> shortest_path(const RoadGraph& g, int s, int t,
                                  const std::function<bool(int)>& is_blocked);

// A trip is simple when it repeats no vertex and no trip vertex has three or
// more other trip vertices among its graph neighbors (no detours). Throws if
// the sequence is empty or consecutive vertices are not adjacent.
bool is_simple_trip(const RoadGraph& g, const Trip& trip);

double euclidean_distance(const Vertex& a, const Vertex& b);

// Nearest-rank median of the edge lengths; default epsilon for match rates.
double median_edge_length(const RoadGraph& g);

}  // namespace ddroute
