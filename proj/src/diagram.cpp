#include "ddroute/diagram.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ddroute/cnf.hpp"
#include "ddroute/error.hpp"

namespace ddroute {

int VarSet::count() const {
  int total = 0;
  for (uint64_t w : bits_) total += std::popcount(w);
  return total;
}

ProbDiagram::Builder::Builder(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1) throw ValidationError("diagram needs at least 1 variable");
}

NodeId ProbDiagram::Builder::check_child(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(nodes_.size())) {
    throw ValidationError("child id " + std::to_string(id) +
                          " does not exist yet");
  }
  return id;
}

NodeId ProbDiagram::Builder::true_leaf() {
  if (true_id_ < 0) {
    true_id_ = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({NodeKind::True, 0, -1, -1, 0, 0, 0.5, 0.5, {}});
  }
  return true_id_;
}

NodeId ProbDiagram::Builder::false_leaf() {
  if (false_id_ < 0) {
    false_id_ = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({NodeKind::False, 0, -1, -1, 0, 0, 0.5, 0.5, {}});
  }
  return false_id_;
}

NodeId ProbDiagram::Builder::decision(int var, NodeId lo, NodeId hi,
                                      uint64_t lo_count, uint64_t hi_count,
                                      double lo_param, double hi_param) {
  if (var < 1 || var > num_vars_) {
    throw ValidationError("decision variable " + std::to_string(var) +
                          " out of range");
  }
  check_child(lo);
  check_child(hi);
  if (!(lo_param >= 0.0) || !(hi_param >= 0.0) ||
      std::abs(lo_param + hi_param - 1.0) > 1e-9) {
    throw ValidationError("branch parameters must be nonnegative and sum to 1");
  }
  nodes_.push_back({NodeKind::Decision, var, lo, hi, lo_count, hi_count,
                    lo_param, hi_param, {}});
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId ProbDiagram::Builder::conjunction(std::vector<NodeId> children) {
  if (children.size() < 2) {
    throw ValidationError("conjunction needs at least 2 children");
  }
  for (NodeId c : children) check_child(c);
  nodes_.push_back(
      {NodeKind::Conjunction, 0, -1, -1, 0, 0, 0.5, 0.5, std::move(children)});
  return static_cast<NodeId>(nodes_.size()) - 1;
}

ProbDiagram ProbDiagram::Builder::finish(NodeId root) {
  check_child(root);
  ProbDiagram d;
  d.nodes_ = std::move(nodes_);
  d.root_ = root;
  d.num_vars_ = num_vars_;
  return d;
}

std::vector<VarSet> ProbDiagram::variable_sets() const {
  std::vector<VarSet> vars(nodes_.size(), VarSet(num_vars_));
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const DiagramNode& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::True:
      case NodeKind::False:
        break;
      case NodeKind::Decision:
        vars[i] = vars[n.lo];
        vars[i] |= vars[n.hi];
        vars[i].set(n.var);
        break;
      case NodeKind::Conjunction:
        for (NodeId c : n.children) vars[i] |= vars[c];
        break;
    }
  }
  return vars;
}

PropertyReport validate(const ProbDiagram& d) {
  PropertyReport report;
  std::vector<VarSet> vars = d.variable_sets();
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    const DiagramNode& n = d.node(static_cast<NodeId>(i));
    if (n.kind == NodeKind::Decision) {
      if (report.determinism.pass &&
          (vars[n.lo].test(n.var) || vars[n.hi].test(n.var))) {
        report.determinism = {false, static_cast<NodeId>(i),
                              "variable " + std::to_string(n.var) +
                                  " re-decided below node " +
                                  std::to_string(i)};
      }
      if (report.smoothness.pass && !(vars[n.lo] == vars[n.hi])) {
        report.smoothness = {false, static_cast<NodeId>(i),
                             "branches of node " + std::to_string(i) +
                                 " mention different variables"};
      }
    } else if (n.kind == NodeKind::Conjunction) {
      if (report.decomposability.pass) {
        VarSet seen(d.num_vars());
        for (NodeId c : n.children) {
          if (!seen.disjoint_with(vars[c])) {
            report.decomposability = {false, static_cast<NodeId>(i),
                                      "children of node " + std::to_string(i) +
                                          " share variables"};
            break;
          }
          seen |= vars[c];
        }
      }
    }
  }
  return report;
}

bool accepts(const ProbDiagram& d, const Assignment& a) {
  if (a.num_vars() != d.num_vars() || !a.is_complete()) {
    throw ValidationError("accepts requires a complete assignment over the "
                          "diagram's variables");
  }
  std::vector<NodeId> stack{d.root()};
  while (!stack.empty()) {
    const DiagramNode& n = d.node(stack.back());
    stack.pop_back();
    switch (n.kind) {
      case NodeKind::True:
        break;
      case NodeKind::False:
        return false;
      case NodeKind::Decision:
        stack.push_back(a.value(n.var) ? n.hi : n.lo);
        break;
      case NodeKind::Conjunction:
        for (NodeId c : n.children) stack.push_back(c);
        break;
    }
  }
  return true;
}

uint64_t model_count(const ProbDiagram& d) {
  PropertyReport report = validate(d);
  if (!report.smoothness.pass) {
    throw ValidationError("model_count requires a smooth diagram: " +
                          report.smoothness.detail);
  }
  std::vector<VarSet> vars = d.variable_sets();
  // Counts are per-node over the node's own variable set; unsigned __int128
  // guards intermediate products before the final free-variable shift.
  std::vector<unsigned __int128> counts(d.node_count(), 0);
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    const DiagramNode& n = d.node(static_cast<NodeId>(i));
    switch (n.kind) {
      case NodeKind::True:
        counts[i] = 1;
        break;
      case NodeKind::False:
        counts[i] = 0;
        break;
      case NodeKind::Decision:
        counts[i] = counts[n.lo] + counts[n.hi];
        break;
      case NodeKind::Conjunction: {
        unsigned __int128 product = 1;
        for (NodeId c : n.children) product *= counts[c];
        counts[i] = product;
        break;
      }
    }
    if (counts[i] > (unsigned __int128)UINT64_MAX) {
      throw ResourceLimitError("model count exceeds 64 bits");
    }
  }
  int free_vars = d.num_vars() - vars[d.root()].count();
  unsigned __int128 total = counts[d.root()];
  for (int i = 0; i < free_vars; ++i) {
    total *= 2;
    if (total > (unsigned __int128)UINT64_MAX) {
      throw ResourceLimitError("model count exceeds 64 bits");
    }
  }
  return static_cast<uint64_t>(total);
}

void serialize(const ProbDiagram& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write diagram file: " + path);
  out << "prob " << ProbDiagram::kFormatVersion << ' ' << d.node_count() << ' '
      << d.num_vars() << '\n';
  char buf[64];
  for (const DiagramNode& n : d.nodes()) {
    switch (n.kind) {
      case NodeKind::True:
        out << "T\n";
        break;
      case NodeKind::False:
        out << "F\n";
        break;
      case NodeKind::Decision:
        out << "D " << n.var << ' ' << n.lo << ' ' << n.hi << ' ' << n.lo_count
            << ' ' << n.hi_count;
        std::snprintf(buf, sizeof buf, " %.17g %.17g", n.lo_param, n.hi_param);
        out << buf << '\n';
        break;
      case NodeKind::Conjunction:
        out << "A " << n.children.size();
        for (NodeId c : n.children) out << ' ' << c;
        out << '\n';
        break;
    }
  }
  out << "root " << d.root() << '\n';
}

ProbDiagram deserialize(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open diagram file: " + path);
  std::string magic;
  int version = 0, num_vars = 0;
  std::size_t num_nodes = 0;
  if (!(in >> magic >> version >> num_nodes >> num_vars) || magic != "prob") {
    throw ParseError("bad diagram header in " + path);
  }
  if (version != ProbDiagram::kFormatVersion) {
    throw ParseError("diagram format version " + std::to_string(version) +
                     " not supported (expected " +
                     std::to_string(ProbDiagram::kFormatVersion) + ")");
  }

  ProbDiagram::Builder builder(num_vars);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    std::string kind;
    if (!(in >> kind)) throw ParseError("truncated diagram in " + path);
    if (kind == "T") {
      if (builder.true_leaf() != static_cast<NodeId>(i)) {
        throw ParseError("duplicate true leaf in " + path);
      }
    } else if (kind == "F") {
      if (builder.false_leaf() != static_cast<NodeId>(i)) {
        throw ParseError("duplicate false leaf in " + path);
      }
    } else if (kind == "D") {
      int var;
      long long lo, hi;
      uint64_t lo_count, hi_count;
      double lo_param, hi_param;
      if (!(in >> var >> lo >> hi >> lo_count >> hi_count >> lo_param >>
            hi_param)) {
        throw ParseError("bad decision node in " + path);
      }
      if (lo >= static_cast<long long>(i) || hi >= static_cast<long long>(i)) {
        throw ParseError("child id not smaller than node id in " + path);
      }
      try {
        builder.decision(var, static_cast<NodeId>(lo), static_cast<NodeId>(hi),
                         lo_count, hi_count, lo_param, hi_param);
      } catch (const ValidationError& e) {
        throw ParseError(std::string("invalid decision node in ") + path +
                         ": " + e.what());
      }
    } else if (kind == "A") {
      std::size_t k;
      if (!(in >> k)) throw ParseError("bad conjunction node in " + path);
      std::vector<NodeId> children(k);
      for (auto& c : children) {
        long long raw;
        if (!(in >> raw)) throw ParseError("bad conjunction node in " + path);
        if (raw >= static_cast<long long>(i)) {
          throw ParseError("child id not smaller than node id in " + path);
        }
        c = static_cast<NodeId>(raw);
      }
      try {
        builder.conjunction(std::move(children));
      } catch (const ValidationError& e) {
        throw ParseError(std::string("invalid conjunction node in ") + path +
                         ": " + e.what());
      }
    } else {
      throw ParseError("unknown node kind '" + kind + "' in " + path);
    }
  }
  std::string tail;
  long long root;
  if (!(in >> tail >> root) || tail != "root") {
    throw ParseError("missing root line in " + path);
  }
  if (root < 0 || root >= static_cast<long long>(num_nodes)) {
    throw ParseError("root id out of range in " + path);
  }
  return builder.finish(static_cast<NodeId>(root));
}

}  // namespace ddroute
