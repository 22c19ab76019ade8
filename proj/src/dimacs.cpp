#include "ddroute/dimacs.hpp"

#include <fstream>
#include <sstream>

#include "ddroute/error.hpp"

namespace ddroute {

void write_dimacs(const CnfFormula& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write CNF file: " + path);
  out << "p cnf " << f.num_vars() << ' ' << f.clause_count() << '\n';
  for (const auto& clause : f.clauses()) {
    for (int lit : clause) out << lit << ' ';
    out << "0\n";
  }
  if (f.var_map()) {
    const VarMap& vm = *f.var_map();
    std::ofstream side(path + ".vars");
    if (!side) throw ParseError("cannot write sidecar: " + path + ".vars");
    for (int id : vm.vertex_ids()) {
      side << "n " << id << ' ' << vm.n_var(id) << '\n';
    }
    for (int id : vm.vertex_ids()) {
      side << "s " << id << ' ' << vm.s_var(id) << '\n';
    }
  }
}

CnfFormula read_dimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CNF file: " + path);

  int num_vars = -1;
  long num_clauses = -1;
  std::string line;
  std::vector<std::vector<int>> clauses;
  std::vector<int> current;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    if (line[0] == 'p') {
      std::istringstream hs(line);
      std::string p, cnf;
      if (!(hs >> p >> cnf >> num_vars >> num_clauses) || cnf != "cnf") {
        throw ParseError("bad DIMACS header in " + path);
      }
      continue;
    }
    if (num_vars < 0) throw ParseError("clause before header in " + path);
    std::istringstream ls(line);
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        clauses.push_back(current);
        current.clear();
      } else {
        current.push_back(lit);
      }
    }
    if (!ls.eof()) throw ParseError("non-integer token in " + path);
  }
  if (num_vars < 1) throw ParseError("missing DIMACS header in " + path);
  if (!current.empty()) {
    throw ParseError("unterminated clause at end of " + path);
  }
  if (static_cast<long>(clauses.size()) != num_clauses) {
    throw ParseError("clause count mismatch in " + path + ": header says " +
                     std::to_string(num_clauses) + ", found " +
                     std::to_string(clauses.size()));
  }

  std::optional<VarMap> vm;
  std::ifstream side(path + ".vars");
  if (side) {
    // The sidecar fixes which vertex each n/s variable belongs to; verify it
    // is consistent with the ascending-rank layout VarMap implements.
    std::vector<int> ids;
    std::vector<std::tuple<char, int, int>> entries;
    std::string kind;
    int vertex, var;
    while (side >> kind >> vertex >> var) {
      if (kind != "n" && kind != "s") {
        throw ParseError("bad sidecar line in " + path + ".vars");
      }
      if (kind == "n") ids.push_back(vertex);
      entries.emplace_back(kind[0], vertex, var);
    }
    VarMap candidate(ids);
    if (candidate.num_vars() != num_vars) {
      throw ParseError("sidecar variable count disagrees with header in " +
                       path + ".vars");
    }
    for (const auto& [k, vtx, v] : entries) {
      int expected = k == 'n' ? candidate.n_var(vtx) : candidate.s_var(vtx);
      if (v != expected) {
        throw ParseError("sidecar maps vertex " + std::to_string(vtx) +
                         " to unexpected variable in " + path + ".vars");
      }
    }
    vm = std::move(candidate);
  }

  CnfFormula f(num_vars, std::move(vm));
  for (auto& clause : clauses) f.add_clause(std::move(clause));
  return f;
}

}  // namespace ddroute
