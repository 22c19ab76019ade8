#include "ddroute/encode.hpp"

#include "ddroute/error.hpp"

namespace ddroute {

CnfFormula encode_relaxed(const RoadGraph& g) {
  if (g.vertex_count() < 1) throw ValidationError("empty graph");
  VarMap vm(g);
  CnfFormula f(vm.num_vars(), vm);
  const auto& ids = vm.vertex_ids();
  int V = vm.vertex_count();

  {  // H1: at least one endpoint.
    std::vector<int> clause;
    for (int id : ids) clause.push_back(vm.s_var(id));
    f.add_clause(std::move(clause), ClauseTag::H1);
  }

  // H2: a trip vertex has at least one trip neighbor.
  for (int id : ids) {
    std::vector<int> clause{-vm.n_var(id)};
    for (int nbr : g.neighbors(id)) clause.push_back(vm.n_var(nbr));
    f.add_clause(std::move(clause), ClauseTag::H2);
  }

  // H3: at most two endpoints, pairwise over all vertex triples.
  for (int i = 0; i < V; ++i) {
    for (int j = i + 1; j < V; ++j) {
      for (int k = j + 1; k < V; ++k) {
        f.add_clause({-vm.s_var(ids[i]), -vm.s_var(ids[j]), -vm.s_var(ids[k])},
                     ClauseTag::H3);
      }
    }
  }

  // H4: an endpoint lies on the trip and has at most one trip neighbor.
  for (int id : ids) {
    f.add_clause({-vm.s_var(id), vm.n_var(id)}, ClauseTag::H4);
    auto nbrs = g.neighbors(id);
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        f.add_clause({-vm.s_var(id), -vm.n_var(nbrs[a]), -vm.n_var(nbrs[b])},
                     ClauseTag::H4);
      }
    }
  }

  // H5: a trip vertex with trip neighbor j either is an endpoint or has
  // exactly one trip neighbor besides j.
  for (int id : ids) {
    auto nbrs = g.neighbors(id);
    for (int j : nbrs) {
      std::vector<int> head{-vm.n_var(id), -vm.n_var(j), vm.s_var(id)};
      std::vector<int> others;
      for (int k : nbrs) {
        if (k != j) others.push_back(k);
      }
      {
        std::vector<int> clause = head;
        for (int k : others) clause.push_back(vm.n_var(k));
        f.add_clause(std::move(clause), ClauseTag::H5);
      }
      for (std::size_t a = 0; a < others.size(); ++a) {
        for (std::size_t b = a + 1; b < others.size(); ++b) {
          std::vector<int> clause = head;
          clause.push_back(-vm.n_var(others[a]));
          clause.push_back(-vm.n_var(others[b]));
          f.add_clause(std::move(clause), ClauseTag::H5);
        }
      }
    }
  }

  return f;
}

Assignment trip_to_assignment(const RoadGraph& g, const Trip& trip) {
  if (trip.size() < 2) {
    throw ValidationError(
        "trips with fewer than 2 vertices have no satisfying encoding");
  }
  if (!is_simple_trip(g, trip)) {
    throw ValidationError("trip is not simple");
  }
  VarMap vm(g);
  Assignment a(vm.num_vars());
  for (int v = 1; v <= vm.num_vars(); ++v) a.bind(v, false);
  for (int vertex : trip.vertices) a.bind(vm.n_var(vertex), true);
  a.bind(vm.s_var(trip.front()), true);
  a.bind(vm.s_var(trip.back()), true);
  return a;
}

}  // namespace ddroute
