#include <algorithm>
#include <map>
#include <unordered_map>

#include "ddroute/compile.hpp"
#include "ddroute/error.hpp"

namespace ddroute {

ProbDiagram smooth(const ProbDiagram& d) {
  std::vector<VarSet> vars = d.variable_sets();

  // Only nodes reachable from the root are carried over.
  std::vector<bool> reachable(d.node_count(), false);
  {
    std::vector<NodeId> stack{d.root()};
    reachable[d.root()] = true;
    while (!stack.empty()) {
      const DiagramNode& n = d.node(stack.back());
      stack.pop_back();
      std::vector<NodeId> next;
      if (n.kind == NodeKind::Decision) {
        next = {n.lo, n.hi};
      } else if (n.kind == NodeKind::Conjunction) {
        next = n.children;
      }
      for (NodeId c : next) {
        if (!reachable[c]) {
          reachable[c] = true;
          stack.push_back(c);
        }
      }
    }
  }

  ProbDiagram::Builder b(d.num_vars());
  std::vector<NodeId> remap(d.node_count(), -1);
  std::unordered_map<int, NodeId> pad_for_var;
  std::map<std::vector<NodeId>, NodeId> pad_conjunctions;

  auto pad_node = [&](int var) {
    auto it = pad_for_var.find(var);
    if (it != pad_for_var.end()) return it->second;
    NodeId t = b.true_leaf();
    NodeId id = b.decision(var, t, t);
    pad_for_var.emplace(var, id);
    return id;
  };

  // Child of a decision branch, wrapped in a conjunction with one fresh
  // decision node per variable its sibling mentions but it does not.
  auto padded = [&](NodeId mapped, const VarSet& own, const VarSet& sibling) {
    std::vector<NodeId> children{mapped};
    for (int v = 1; v <= d.num_vars(); ++v) {
      if (sibling.test(v) && !own.test(v)) children.push_back(pad_node(v));
    }
    if (children.size() == 1) return mapped;
    std::sort(children.begin(), children.end());
    auto it = pad_conjunctions.find(children);
    if (it != pad_conjunctions.end()) return it->second;
    NodeId id = b.conjunction(children);
    pad_conjunctions.emplace(std::move(children), id);
    return id;
  };

  for (std::size_t i = 0; i < d.node_count(); ++i) {
    if (!reachable[i]) continue;
    const DiagramNode& n = d.node(static_cast<NodeId>(i));
    switch (n.kind) {
      case NodeKind::True:
        remap[i] = b.true_leaf();
        break;
      case NodeKind::False:
        remap[i] = b.false_leaf();
        break;
      case NodeKind::Conjunction: {
        std::vector<NodeId> children;
        children.reserve(n.children.size());
        for (NodeId c : n.children) children.push_back(remap[c]);
        remap[i] = b.conjunction(std::move(children));
        break;
      }
      case NodeKind::Decision: {
        NodeId lo = padded(remap[n.lo], vars[n.lo], vars[n.hi]);
        NodeId hi = padded(remap[n.hi], vars[n.hi], vars[n.lo]);
        remap[i] = b.decision(n.var, lo, hi, n.lo_count, n.hi_count,
                              n.lo_param, n.hi_param);
        break;
      }
    }
  }

  ProbDiagram out = b.finish(remap[d.root()]);
  out.set_trained_instances(d.trained_instances());
  return out;
}

}  // namespace ddroute
