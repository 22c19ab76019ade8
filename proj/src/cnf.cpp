#include "ddroute/cnf.hpp"

#include <algorithm>
#include <cstdlib>

#include "ddroute/error.hpp"

namespace ddroute {

VarMap::VarMap(const RoadGraph& g) {
  vertex_ids_.reserve(g.vertex_count());
  for (const Vertex& v : g.vertices()) vertex_ids_.push_back(v.id);
}

VarMap::VarMap(std::vector<int> vertex_ids) : vertex_ids_(std::move(vertex_ids)) {
  std::sort(vertex_ids_.begin(), vertex_ids_.end());
  if (std::adjacent_find(vertex_ids_.begin(), vertex_ids_.end()) !=
      vertex_ids_.end()) {
    throw ValidationError("duplicate vertex id in variable map");
  }
}

int VarMap::rank_of(int vertex_id) const {
  auto it = std::lower_bound(vertex_ids_.begin(), vertex_ids_.end(), vertex_id);
  if (it == vertex_ids_.end() || *it != vertex_id) {
    throw ValidationError("vertex " + std::to_string(vertex_id) +
                          " not in variable map");
  }
  return static_cast<int>(it - vertex_ids_.begin());
}

int VarMap::vertex_of(int var) const {
  if (is_n_var(var)) return vertex_ids_[var - 1];
  if (is_s_var(var)) return vertex_ids_[var - vertex_count() - 1];
  throw ValidationError("variable " + std::to_string(var) + " out of range");
}

bool Assignment::value(int var) const {
  signed char v = values_.at(var);
  if (v < 0) {
    throw ValidationError("variable " + std::to_string(var) + " is unbound");
  }
  return v == 1;
}

void Assignment::bind(int var, bool value) {
  if (var < 1 || var > num_vars()) {
    throw ValidationError("variable " + std::to_string(var) + " out of range");
  }
  signed char& slot = values_[var];
  if (slot < 0) ++bound_;
  slot = value ? 1 : 0;
}

std::vector<int> Assignment::literals() const {
  std::vector<int> lits;
  for (int v = 1; v <= num_vars(); ++v) {
    if (values_[v] >= 0) lits.push_back(values_[v] == 1 ? v : -v);
  }
  return lits;
}

CnfFormula::CnfFormula(int num_vars, std::optional<VarMap> var_map)
    : num_vars_(num_vars), var_map_(std::move(var_map)) {
  if (num_vars < 1) throw ValidationError("formula needs at least 1 variable");
  if (var_map_ && var_map_->num_vars() != num_vars) {
    throw ValidationError("variable map size does not match num_vars");
  }
}

void CnfFormula::add_clause(std::vector<int> literals, ClauseTag tag) {
  if (literals.empty()) throw ValidationError("empty clause");
  std::vector<int> vars_seen;
  for (int lit : literals) {
    int var = std::abs(lit);
    if (var < 1 || var > num_vars_) {
      throw ValidationError("literal " + std::to_string(lit) +
                            " out of range");
    }
    if (std::find(vars_seen.begin(), vars_seen.end(), lit) != vars_seen.end()) {
      throw ValidationError("duplicate literal " + std::to_string(lit) +
                            " in clause");
    }
    vars_seen.push_back(lit);
  }
  clauses_.push_back(std::move(literals));
  tags_.push_back(tag);
}

bool satisfies(const CnfFormula& f, const Assignment& a) {
  if (a.num_vars() != f.num_vars() || !a.is_complete()) {
    throw ValidationError("satisfies requires a complete assignment over the "
                          "formula's variables");
  }
  for (const auto& clause : f.clauses()) {
    bool sat = false;
    for (int lit : clause) {
      if (a.value(std::abs(lit)) == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

std::vector<Assignment> enumerate_solutions(const CnfFormula& f) {
  int n = f.num_vars();
  if (n > 24) {
    throw ResourceLimitError("refusing brute-force enumeration beyond 24 "
                             "variables");
  }
  // Bitmask clause evaluation; bit (n - v) of the mask holds variable v so
  // ascending masks enumerate assignments in lexicographic variable order.
  std::vector<uint32_t> pos(f.clause_count(), 0), neg(f.clause_count(), 0);
  for (std::size_t c = 0; c < f.clause_count(); ++c) {
    for (int lit : f.clauses()[c]) {
      uint32_t bit = 1u << (n - std::abs(lit));
      (lit > 0 ? pos[c] : neg[c]) |= bit;
    }
  }
  std::vector<Assignment> solutions;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool sat = true;
    for (std::size_t c = 0; c < f.clause_count(); ++c) {
      if ((mask & pos[c]) == 0 && (~mask & neg[c]) == 0) {
        sat = false;
        break;
      }
    }
    if (!sat) continue;
    Assignment a(n);
    for (int v = 1; v <= n; ++v) a.bind(v, (mask >> (n - v)) & 1u);
    solutions.push_back(std::move(a));
  }
  return solutions;
}

}  // namespace ddroute
