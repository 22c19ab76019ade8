#pragma once

#include <cstdint>
#include <vector>

#include "ddroute/cnf.hpp"
#include "ddroute/diagram.hpp"

namespace ddroute {

struct CompileOptions {
  // Permutation of 1..num_vars giving the split order. Empty means: use the
  // interleaved order when the formula carries a variable map, natural
  // otherwise.
  std::vector<int> order;
  uint64_t node_budget = 10'000'000;
  double timeout_seconds = 0.0;  // 0 disables the deadline
  int var_ceiling = 64;
};

// 1, 2, ..., num_vars.
std::vector<int> natural_order(int num_vars);

// n(v0), s(v0), n(v1), s(v1), ... so each vertex's pair of variables is
// decided together; the default for trip encodings.
std::vector<int> interleaved_order(const VarMap& vm);

// Compiles f into a diagram whose accepted assignments over num_vars
// variables are exactly the solutions of f. Top-down trace: unit propagation
// (implied literals become decision nodes with one false branch), connected
// component decomposition (a conjunction node per split), Shannon expansion
// on the lowest-ordered variable of each component, and a cache keyed on the
// canonicalized residual clause set. Structurally identical nodes are
// shared. Variables no clause ends up constraining are appended under the
// root as free decision nodes, so the root always mentions every variable.
//
// All counters start at 0 and all branch parameters at 0.5. Deterministic
// for a given (formula, order).
ProbDiagram compile_cnf(const CnfFormula& f, const CompileOptions& opts = {});

// Rewrites the diagram so both branches of every decision node mention the
// same variables: a branch missing variables present on its sibling is
// replaced by a conjunction of the original child and one fresh decision
// node per missing variable (both arms to the true leaf, parameters 0.5,
// counters 0). Counters and parameters of existing nodes are preserved; an
// already-smooth diagram comes back structurally unchanged.
ProbDiagram smooth(const ProbDiagram& d);

}  // namespace ddroute
