#pragma once

#include <stdexcept>

namespace ddroute {

// Malformed input file (JSON, DIMACS, diagram text format).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally invalid data or violated precondition.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Node budget, timeout, variable ceiling, or enumeration bound exceeded.
struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training instance whose traversal reaches the false leaf; counters are
// left untouched when this is thrown.
struct RejectedInstanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conditioning assignment with zero probability mass under the diagram.
struct UnsatisfiableConditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ddroute
