#pragma once

#include <cstdint>
#include <vector>

#include "ddroute/abstraction.hpp"
#include "ddroute/graph.hpp"

namespace ddroute {

// Draws random endpoint pairs and returns, per pair, the shortest path that
// avoids every road vertex of the regions strictly between the endpoints'
// regions on the direct shortest path; falls back to the direct path when no
// detour exists or nothing lies between. This yields trips that deviate from
// the plain shortest path in a learnable, region-level way.
//
// Deterministic for a given seed. Gives up after 100 * count endpoint draws.
std::vector<Trip> generate_synthetic_trips(const RoadGraph& g,
                                           const Abstraction& a, int count,
                                           uint64_t seed);

std::vector<Trip> load_trips(const std::string& path);
void save_trips(const std::vector<Trip>& trips, const std::string& path);

}  // namespace ddroute
