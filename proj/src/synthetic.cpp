#include "ddroute/synthetic.hpp"

#include <fstream>

#include "ddroute/error.hpp"
#include "ddroute/rng.hpp"
#include "json.hpp"

namespace ddroute {

std::vector<Trip> generate_synthetic_trips(const RoadGraph& g,
                                           const Abstraction& a, int count,
                                           uint64_t seed) {
  if (count < 0) throw ValidationError("negative trip count");
  if (g.vertex_count() < 2) throw ValidationError("need at least 2 vertices");

  Rng rng(seed);
  std::vector<Trip> trips;
  long attempts = 0;
  const long attempt_limit = 100L * count;
  while (static_cast<int>(trips.size()) < count) {
    if (++attempts > attempt_limit) {
      throw ResourceLimitError(
          "synthetic trip generation exceeded " +
          std::to_string(attempt_limit) + " endpoint draws");
    }
    int s = g.vertices()[rng.next_below(g.vertex_count())].id;
    int t = s;
    while (t == s) t = g.vertices()[rng.next_below(g.vertex_count())].id;

    auto direct = shortest_path(g, s, t);
    if (!direct) continue;  // disconnected pair; redraw

    Trip regions = project_trip(a, *direct);
    if (regions.size() <= 2) {
      trips.push_back(*direct);
      continue;
    }
    std::unordered_set<int> blocked;
    for (std::size_t i = 1; i + 1 < regions.size(); ++i) {
      for (int vid : a.region_to_vertices[regions.vertices[i]]) {
        blocked.insert(vid);
      }
    }
    auto detour = shortest_path(g, s, t, blocked);
    trips.push_back(detour ? *detour : *direct);
  }
  return trips;
}

std::vector<Trip> load_trips(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trips file: " + path);
  std::vector<Trip> trips;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      Trip t;
      for (const auto& v : j.at("vertices")) t.vertices.push_back(v.get<int>());
      trips.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("bad trip at " + path + ":" + std::to_string(line_no) +
                       ": " + e.what());
    }
  }
  return trips;
}

void save_trips(const std::vector<Trip>& trips, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write trips file: " + path);
  for (const Trip& t : trips) {
    nlohmann::json j{{"vertices", t.vertices}};
    out << j.dump() << '\n';
  }
}

}  // namespace ddroute
