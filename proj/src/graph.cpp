#include "ddroute/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include "ddroute/error.hpp"
#include "json.hpp"

namespace ddroute {

RoadGraph::RoadGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  std::sort(vertices_.begin(), vertices_.end(),
            [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
  for (int i = 0; i < static_cast<int>(vertices_.size()); ++i) {
    if (!index_of_.emplace(vertices_[i].id, i).second) {
      throw ValidationError("duplicate vertex id " +
                            std::to_string(vertices_[i].id));
    }
  }

  for (Edge& e : edges_) {
    if (e.u == e.v) {
      throw ValidationError("self loop at vertex " + std::to_string(e.u));
    }
    if (!has_vertex(e.u) || !has_vertex(e.v)) {
      throw ValidationError("edge endpoint not declared: " +
                            std::to_string(e.u) + "-" + std::to_string(e.v));
    }
    if (!(e.length > 0.0)) {
      throw ValidationError("non-positive edge length on " +
                            std::to_string(e.u) + "-" + std::to_string(e.v));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i - 1].u == edges_[i].u && edges_[i - 1].v == edges_[i].v) {
      throw ValidationError("duplicate edge " + std::to_string(edges_[i].u) +
                            "-" + std::to_string(edges_[i].v));
    }
  }

  std::vector<std::vector<std::pair<int, double>>> adj(vertices_.size());
  for (const Edge& e : edges_) {
    adj[rank_of(e.u)].emplace_back(e.v, e.length);
    adj[rank_of(e.v)].emplace_back(e.u, e.length);
  }
  adjacency_.resize(vertices_.size());
  adjacency_lengths_.resize(vertices_.size());
  adjacency_ranks_.resize(vertices_.size());
  for (std::size_t i = 0; i < adj.size(); ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    adjacency_[i].reserve(adj[i].size());
    adjacency_lengths_[i].reserve(adj[i].size());
    adjacency_ranks_[i].reserve(adj[i].size());
    for (const auto& [id, length] : adj[i]) {
      adjacency_[i].push_back(id);
      adjacency_lengths_[i].push_back(length);
      adjacency_ranks_[i].push_back(rank_of(id));
    }
  }
}

int RoadGraph::rank_of(int id) const {
  auto it = index_of_.find(id);
  if (it == index_of_.end()) {
    throw ValidationError("unknown vertex id " + std::to_string(id));
  }
  return it->second;
}

const Vertex& RoadGraph::vertex(int id) const { return vertices_[rank_of(id)]; }

std::span<const int> RoadGraph::neighbors(int id) const {
  return adjacency_[rank_of(id)];
}

std::span<const double> RoadGraph::neighbor_lengths(int id) const {
  return adjacency_lengths_[rank_of(id)];
}

bool RoadGraph::adjacent(int u, int v) const {
  rank_of(v);
  auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

double RoadGraph::edge_length(int u, int v) const {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(
      edges_.begin(), edges_.end(), std::pair(u, v),
      [](const Edge& e, const std::pair<int, int>& key) {
        return std::pair(e.u, e.v) < key;
      });
  if (it == edges_.end() || it->u != u || it->v != v) {
    throw ValidationError("no edge " + std::to_string(u) + "-" +
                          std::to_string(v));
  }
  return it->length;
}

RoadGraph build_grid_graph(int width, int height, double spacing) {
  if (width < 1 || height < 1 || !(spacing > 0.0)) {
    throw ValidationError("grid dimensions and spacing must be positive");
  }
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      int id = r * width + c;
      vertices.push_back({id, c * spacing, r * spacing});
      if (c + 1 < width) edges.push_back({id, id + 1, spacing});
      if (r + 1 < height) edges.push_back({id, id + width, spacing});
    }
  }
  return RoadGraph(std::move(vertices), std::move(edges));
}

RoadGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  try {
    std::vector<Vertex> vertices;
    for (const auto& n : j.at("nodes")) {
      vertices.push_back({n.at("id").get<int>(), n.at("x").get<double>(),
                          n.at("y").get<double>()});
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back({e.at("u").get<int>(), e.at("v").get<int>(),
                       e.at("length").get<double>()});
    }
    return RoadGraph(std::move(vertices), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad graph schema in " + path + ": " + e.what());
  }
}

void save_graph(const RoadGraph& g, const std::string& path) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Vertex& v : g.vertices()) {
    nodes.push_back({{"id", v.id}, {"x", v.x}, {"y", v.y}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({{"u", e.u}, {"v", e.v}, {"length", e.length}});
  }
  nlohmann::json j{{"nodes", nodes}, {"edges", edges}};
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write graph file: " + path);
  out << j.dump() << '\n';
}

std::optional<Trip> shortest_path(const RoadGraph& g, int s, int t,
                                  const std::unordered_set<int>& blocked) {
  return shortest_path(
      g, s, t, [&blocked](int id) { return blocked.count(id) > 0; });
}

std::optional<Trip> shortest_path(const RoadGraph& g, int s, int t,
                                  const std::function<bool(int)>& is_blocked) {
  g.vertex(s);
  g.vertex(t);
  if (is_blocked(s) || is_blocked(t)) {
    throw ValidationError("shortest_path endpoint is blocked");
  }
  if (s == t) return Trip{{s}};

  // Everything below works on vertex ranks (positions in the ascending-id
  // vertex list) so the bookkeeping lives in flat arrays. Ranks order the
  // same way ids do, which keeps the predecessor tie rule meaningful.
  const auto& verts = g.vertices();
  const int n = static_cast<int>(verts.size());

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<int> pred(n, n);
  std::vector<char> done(n, 0);
  std::vector<char> barred(n, 0);
  for (int r = 0; r < n; ++r) barred[r] = is_blocked(verts[r].id) ? 1 : 0;

  const int sr = g.rank_of(s);
  const int tr = g.rank_of(t);
  // Keyed (distance, rank) so the pop order, and with it the predecessor
  // tie rule below, is deterministic.
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  dist[sr] = 0.0;
  queue.push({0.0, sr});

  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (done[u] || d > dist[u]) continue;
    done[u] = 1;
    if (u == tr) break;
    const auto& nbrs = g.adjacency_ranks_[u];
    const auto& lens = g.adjacency_lengths_[u];
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      int v = nbrs[i];
      if (barred[v]) continue;
      double nd = d + lens[i];
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = u;
        queue.push({nd, v});
      } else if (nd == dist[v] && !done[v] && u < pred[v]) {
        pred[v] = u;
      }
    }
  }

  if (!done[tr]) return std::nullopt;
  Trip trip;
  for (int v = tr; v != sr; v = pred[v]) trip.vertices.push_back(verts[v].id);
  trip.vertices.push_back(s);
  std::reverse(trip.vertices.begin(), trip.vertices.end());
  return trip;
}

bool is_simple_trip(const RoadGraph& g, const Trip& trip) {
  if (trip.empty()) throw ValidationError("empty trip");
  std::unordered_set<int> seen;
  bool repeated = false;
  for (std::size_t i = 0; i < trip.size(); ++i) {
    g.vertex(trip.vertices[i]);
    if (i > 0 && !g.adjacent(trip.vertices[i - 1], trip.vertices[i])) {
      throw ValidationError("consecutive trip vertices not adjacent: " +
                            std::to_string(trip.vertices[i - 1]) + "-" +
                            std::to_string(trip.vertices[i]));
    }
    repeated |= !seen.insert(trip.vertices[i]).second;
  }
  if (repeated) return false;
  // Detour check: a vertex with >= 3 trip vertices among its neighbors would
  // admit a shortcut, so the sequence is not simple.
  for (int v : trip.vertices) {
    int in_trip = 0;
    for (int nbr : g.neighbors(v)) in_trip += seen.count(nbr);
    if (in_trip >= 3) return false;
  }
  return true;
}

double euclidean_distance(const Vertex& a, const Vertex& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double median_edge_length(const RoadGraph& g) {
  if (g.edge_count() == 0) throw ValidationError("graph has no edges");
  std::vector<double> lengths;
  lengths.reserve(g.edge_count());
  for (const Edge& e : g.edges()) lengths.push_back(e.length);
  std::sort(lengths.begin(), lengths.end());
  // Nearest-rank percentile at p = 50.
  std::size_t rank = (lengths.size() + 1) / 2;
  return lengths[rank - 1];
}

}  // namespace ddroute
