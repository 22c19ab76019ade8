#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddroute/graph.hpp"

namespace ddroute {

// Two Boolean variables per vertex: n (vertex lies on the trip) and s
// (vertex is a trip endpoint). DIMACS-style 1-based indices; vertex ids are
// ranked in ascending order, so for contiguous ids 0..V-1 the map is simply
// n(i) = i+1 and s(i) = V+i+1.
class VarMap {
 public:
  VarMap() = default;
  explicit VarMap(const RoadGraph& g);
  explicit VarMap(std::vector<int> vertex_ids);

  int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
  int num_vars() const { return 2 * vertex_count(); }

  int n_var(int vertex_id) const { return rank_of(vertex_id) + 1; }
  int s_var(int vertex_id) const {
    return vertex_count() + rank_of(vertex_id) + 1;
  }

  bool is_n_var(int var) const { return var >= 1 && var <= vertex_count(); }
  bool is_s_var(int var) const {
    return var > vertex_count() && var <= num_vars();
  }
  int vertex_of(int var) const;

  const std::vector<int>& vertex_ids() const { return vertex_ids_; }

 private:
  int rank_of(int vertex_id) const;

  std::vector<int> vertex_ids_;  // ascending
};

// Partial or complete truth assignment over variables 1..num_vars.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int num_vars) : values_(num_vars + 1, -1) {}

  int num_vars() const { return static_cast<int>(values_.size()) - 1; }
  int bound_count() const { return bound_; }
  bool is_complete() const { return bound_ == num_vars(); }

  bool is_bound(int var) const { return values_.at(var) >= 0; }
  bool value(int var) const;
  void bind(int var, bool value);

  // Bound variables as signed literals, ascending by variable.
  std::vector<int> literals() const;

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<signed char> values_;  // index 0 unused; -1 unbound
  int bound_ = 0;
};

enum class ClauseTag : unsigned char { H1, H2, H3, H4, H5, Untagged };

// Clause list in CNF over 1-based variables. Clauses are stored in emission
// order; each carries a tag naming the constraint family it came from.
class CnfFormula {
 public:
  CnfFormula() = default;
  explicit CnfFormula(int num_vars, std::optional<VarMap> var_map = {});

  void add_clause(std::vector<int> literals,
                  ClauseTag tag = ClauseTag::Untagged);

  int num_vars() const { return num_vars_; }
  std::size_t clause_count() const { return clauses_.size(); }
  const std::vector<std::vector<int>>& clauses() const { return clauses_; }
  const std::vector<ClauseTag>& tags() const { return tags_; }
  const std::optional<VarMap>& var_map() const { return var_map_; }

 private:
  int num_vars_ = 0;
  std::vector<std::vector<int>> clauses_;
  std::vector<ClauseTag> tags_;
  std::optional<VarMap> var_map_;
};

// Requires a complete assignment.
bool satisfies(const CnfFormula& f, const Assignment& a);

// All complete satisfying assignments, ordered lexicographically by
// (value of var 1, value of var 2, ...) with false before true.
// Brute force; refuses formulas beyond 24 variables.
std::vector<Assignment> enumerate_solutions(const CnfFormula& f);

}  // namespace ddroute
