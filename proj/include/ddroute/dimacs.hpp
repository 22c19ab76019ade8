#pragma once

#include <string>

#include "ddroute/cnf.hpp"

namespace ddroute {

// Standard DIMACS CNF ("p cnf <vars> <clauses>", 0-terminated clauses).
// When the formula carries a variable map, a sidecar "<path>.vars" records
// it, one "n <vertex> <var>" or "s <vertex> <var>" line per variable.
void write_dimacs(const CnfFormula& f, const std::string& path);

// Reads the sidecar back when present. Tags are not recoverable from DIMACS;
// clauses come back untagged.
CnfFormula read_dimacs(const std::string& path);

}  // namespace ddroute
