#pragma once

#include "ddroute/cnf.hpp"
#include "ddroute/graph.hpp"

namespace ddroute {

// CNF whose solutions over-approximate the simple trips of g: each solution
// is one simple path (its endpoints carry the two true s-variables) plus
// zero or more vertex-disjoint cycles. Five clause families:
//
//   H1  some endpoint exists:          (s_1 | ... | s_V)
//   H2  trip vertices have a trip      (~n_i | n_j1 | ... | n_jk)   j in adj(i)
//       neighbor:
//   H3  at most two endpoints:         (~s_i | ~s_j | ~s_k)         i<j<k
//   H4  an endpoint is on the trip     (~s_i | n_i)
//       with at most one trip          (~s_i | ~n_j | ~n_k)         {j,k} in adj(i)
//       neighbor:
//   H5  an interior trip vertex        (~n_i | ~n_j | s_i | n_k...) k in adj(i)\{j}
//       continues in exactly one       (~n_i | ~n_j | s_i | ~n_l | ~n_m)
//       other direction:                                            {l,m} in adj(i)\{j}
//
// Vertices are iterated in ascending id order and clauses are emitted family
// by family, so the output is deterministic. Variables: 2 per vertex.
CnfFormula encode_relaxed(const RoadGraph& g);

// Assignment selecting exactly the trip's vertices (n-variables) and its two
// endpoints (s-variables). Requires a simple trip with at least 2 vertices;
// a single vertex cannot satisfy H2, so it is rejected here.
Assignment trip_to_assignment(const RoadGraph& g, const Trip& trip);

}  // namespace ddroute
