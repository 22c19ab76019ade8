#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ddroute {

// Small bitset over variables 1..num_vars.
class VarSet {
 public:
  VarSet() = default;
  explicit VarSet(int num_vars) : bits_((num_vars + 63) / 64, 0) {}

  void set(int var) { bits_[(var - 1) >> 6] |= 1ULL << ((var - 1) & 63); }
  bool test(int var) const {
    return (bits_[(var - 1) >> 6] >> ((var - 1) & 63)) & 1ULL;
  }
  VarSet& operator|=(const VarSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }
  bool disjoint_with(const VarSet& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] & o.bits_[i]) return false;
    }
    return true;
  }
  int count() const;
  bool operator==(const VarSet&) const = default;

 private:
  std::vector<uint64_t> bits_;
};

using NodeId = int32_t;

enum class NodeKind : unsigned char { True, False, Decision, Conjunction };

struct DiagramNode {
  NodeKind kind = NodeKind::True;
  int var = 0;       // Decision only
  NodeId lo = -1;    // Decision only
  NodeId hi = -1;
  uint64_t lo_count = 0;
  uint64_t hi_count = 0;
  double lo_param = 0.5;
  double hi_param = 0.5;
  std::vector<NodeId> children;  // Conjunction only
};

// Rooted DAG of decision and conjunction nodes over Boolean variables, with
// per-branch traversal counters and probabilities on every decision node.
// Node ids are topological: every child id is smaller than its parent's.
class ProbDiagram {
 public:
  static constexpr int kFormatVersion = 1;

  // Incremental bottom-up construction; enforces the id ordering and basic
  // shape rules. Leaves are interned (at most one True and one False node).
  class Builder {
   public:
    explicit Builder(int num_vars);

    NodeId true_leaf();
    NodeId false_leaf();
    NodeId decision(int var, NodeId lo, NodeId hi, uint64_t lo_count = 0,
                    uint64_t hi_count = 0, double lo_param = 0.5,
                    double hi_param = 0.5);
    NodeId conjunction(std::vector<NodeId> children);

    std::size_t node_count() const { return nodes_.size(); }
    const DiagramNode& node(NodeId id) const { return nodes_.at(id); }
    ProbDiagram finish(NodeId root);

   private:
    NodeId check_child(NodeId id) const;

    int num_vars_;
    std::vector<DiagramNode> nodes_;
    NodeId true_id_ = -1;
    NodeId false_id_ = -1;
  };

  ProbDiagram() = default;

  int num_vars() const { return num_vars_; }
  std::size_t node_count() const { return nodes_.size(); }
  NodeId root() const { return root_; }
  const DiagramNode& node(NodeId id) const { return nodes_[id]; }
  const std::vector<DiagramNode>& nodes() const { return nodes_; }
  DiagramNode& mutable_node(NodeId id) { return nodes_[id]; }

  uint64_t trained_instances() const { return trained_instances_; }
  void set_trained_instances(uint64_t n) { trained_instances_ = n; }
  void add_trained_instance() { ++trained_instances_; }

  // Variables mentioned at-or-below each node, bottom-up.
  std::vector<VarSet> variable_sets() const;

 private:
  std::vector<DiagramNode> nodes_;
  NodeId root_ = -1;
  int num_vars_ = 0;
  uint64_t trained_instances_ = 0;
};

struct PropertyCheck {
  bool pass = true;
  std::optional<NodeId> witness;
  std::string detail;
};

// The three structural properties the inference algorithms rely on.
struct PropertyReport {
  PropertyCheck determinism;      // branch variable not re-decided below
  PropertyCheck decomposability;  // conjunction children share no variables
  PropertyCheck smoothness;       // both branches mention the same variables
  bool all_pass() const {
    return determinism.pass && decomposability.pass && smoothness.pass;
  }
};

// Never throws on property violations; reports them with a witness node.
PropertyReport validate(const ProbDiagram& d);

// True iff the complete assignment reaches only the true leaf.
bool accepts(const ProbDiagram& d, const class Assignment& a);

// Number of satisfying assignments over all num_vars variables. Requires a
// smooth diagram; variables the root never mentions are free and contribute
// a factor of two each.
uint64_t model_count(const ProbDiagram& d);

// Text form, one node per line ("T", "F", "D ...", "A k c1..ck"), ids equal
// to line position. Branch parameters keep 17 significant digits so a
// round-trip is bit-exact.
void serialize(const ProbDiagram& d, const std::string& path);
ProbDiagram deserialize(const std::string& path);

}  // namespace ddroute
