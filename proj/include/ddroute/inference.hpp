#pragma once

#include <cstdint>
#include <vector>

#include "ddroute/cnf.hpp"
#include "ddroute/diagram.hpp"

namespace ddroute {

// Walks the diagram along a complete satisfying assignment and increments
// the traversed branch counter of every decision node on the way (all
// children of a conjunction are visited). If the walk reaches the false
// leaf, throws RejectedInstanceError and mutates nothing: the trace is
// collected first and committed only on success.
void learn_assignment(ProbDiagram& d, const Assignment& tau);

// Laplace-smoothed branch probabilities from the accumulated counters:
// hi = (#hi + 1) / (#hi + #lo + 2), lo = 1 - hi.
void finalize_params(ProbDiagram& d);

// Total probability mass of the assignments consistent with the (possibly
// partial) condition, under the current branch parameters. Single bottom-up
// pass; accumulates in log space once the diagram passes 40 variables.
double probability_of(const ProbDiagram& d, const Assignment& condition);

// k complete assignments distributed per the branch parameters conditioned
// on `condition`. Bottom-up per sample: every unbound decision node draws
// one uniform variate against hi_mass / (lo_mass + hi_mass) in ascending
// node order, then the choices are materialized from the root. One seeded
// generator per call. Requires the root to mention every variable and the
// condition to have positive mass.
std::vector<Assignment> sample_assignments(const ProbDiagram& d,
                                           const Assignment& condition, int k,
                                           uint64_t seed);

}  // namespace ddroute
