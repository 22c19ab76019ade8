#include "ddroute/inference.hpp"

#include <cmath>
#include <limits>

#include "ddroute/error.hpp"
#include "ddroute/rng.hpp"

namespace ddroute {

namespace {

constexpr int kLogSpaceVarThreshold = 40;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_same_vars(const ProbDiagram& d, const Assignment& a,
                       const char* what) {
  if (a.num_vars() != d.num_vars()) {
    throw ValidationError(std::string(what) +
                          " must range over the diagram's variables");
  }
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Mass of each node's solution set restricted to `condition`, linear or log
// depending on the variable count. The same cache drives probability_of and
// the per-node branch choices in sample_assignments.
struct Gamma {
  std::vector<double> value;
  bool log_space = false;

  double zero() const { return log_space ? kNegInf : 0.0; }
  bool is_zero(double x) const { return log_space ? x == kNegInf : x == 0.0; }
};

Gamma compute_gamma(const ProbDiagram& d, const Assignment& condition) {
  Gamma g;
  g.log_space = d.num_vars() > kLogSpaceVarThreshold;
  g.value.resize(d.node_count());
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    const DiagramNode& n = d.node(static_cast<NodeId>(i));
    double& out = g.value[i];
    switch (n.kind) {
      case NodeKind::True:
        out = g.log_space ? 0.0 : 1.0;
        break;
      case NodeKind::False:
        out = g.zero();
        break;
      case NodeKind::Conjunction:
        out = g.log_space ? 0.0 : 1.0;
        for (NodeId c : n.children) {
          if (g.log_space) {
            out += g.value[c];
          } else {
            out *= g.value[c];
          }
        }
        break;
      case NodeKind::Decision: {
        if (condition.is_bound(n.var)) {
          bool v = condition.value(n.var);
          double param = v ? n.hi_param : n.lo_param;
          double child = g.value[v ? n.hi : n.lo];
          out = g.log_space ? std::log(param) + child : param * child;
        } else if (g.log_space) {
          out = log_add(std::log(n.lo_param) + g.value[n.lo],
                        std::log(n.hi_param) + g.value[n.hi]);
        } else {
          out = n.lo_param * g.value[n.lo] + n.hi_param * g.value[n.hi];
        }
        break;
      }
    }
  }
  return g;
}

}  // namespace

void learn_assignment(ProbDiagram& d, const Assignment& tau) {
  require_same_vars(d, tau, "training assignment");
  if (!tau.is_complete()) {
    throw ValidationError("training assignment must be complete");
  }
  // Trace first; commit only if the walk never hits the false leaf.
  std::vector<std::pair<NodeId, bool>> trace;
  std::vector<NodeId> stack{d.root()};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    const DiagramNode& n = d.node(id);
    switch (n.kind) {
      case NodeKind::True:
        break;
      case NodeKind::False:
        throw RejectedInstanceError(
            "assignment does not satisfy the compiled formula");
      case NodeKind::Decision: {
        bool v = tau.value(n.var);
        trace.emplace_back(id, v);
        stack.push_back(v ? n.hi : n.lo);
        break;
      }
      case NodeKind::Conjunction:
        for (NodeId c : n.children) stack.push_back(c);
        break;
    }
  }
  for (auto [id, v] : trace) {
    DiagramNode& n = d.mutable_node(id);
    ++(v ? n.hi_count : n.lo_count);
  }
  d.add_trained_instance();
}

void finalize_params(ProbDiagram& d) {
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    DiagramNode& n = d.mutable_node(static_cast<NodeId>(i));
    if (n.kind != NodeKind::Decision) continue;
    n.hi_param = static_cast<double>(n.hi_count + 1) /
                 static_cast<double>(n.hi_count + n.lo_count + 2);
    n.lo_param = 1.0 - n.hi_param;
  }
}

double probability_of(const ProbDiagram& d, const Assignment& condition) {
  require_same_vars(d, condition, "condition");
  Gamma g = compute_gamma(d, condition);
  double root = g.value[d.root()];
  return g.log_space ? std::exp(root) : root;
}

std::vector<Assignment> sample_assignments(const ProbDiagram& d,
                                           const Assignment& condition, int k,
                                           uint64_t seed) {
  require_same_vars(d, condition, "condition");
  if (k < 1) throw ValidationError("sample count must be positive");
  {
    // The root must mention every variable or samples would come out
    // incomplete. Cheap reachability walk instead of full variable sets,
    // stopping as soon as every variable is accounted for.
    std::vector<char> visited(d.node_count(), 0);
    std::vector<char> decided(static_cast<std::size_t>(d.num_vars()) + 1, 0);
    int missing = d.num_vars();
    std::vector<NodeId> stack{d.root()};
    visited[d.root()] = 1;
    while (!stack.empty() && missing > 0) {
      const DiagramNode& n = d.node(stack.back());
      stack.pop_back();
      if (n.kind == NodeKind::Decision) {
        if (!decided[n.var]) {
          decided[n.var] = 1;
          --missing;
        }
        for (NodeId c : {n.lo, n.hi}) {
          if (!visited[c]) {
            visited[c] = 1;
            stack.push_back(c);
          }
        }
      } else if (n.kind == NodeKind::Conjunction) {
        for (NodeId c : n.children) {
          if (!visited[c]) {
            visited[c] = 1;
            stack.push_back(c);
          }
        }
      }
    }
    if (missing > 0) {
      throw ValidationError(
          "diagram root does not mention every variable; samples would be "
          "incomplete (smooth the diagram first)");
    }
  }

  Gamma g = compute_gamma(d, condition);
  if (g.is_zero(g.value[d.root()])) {
    throw UnsatisfiableConditionError(
        "conditioning assignment has zero probability mass");
  }

  // The branch shares depend only on the condition, so they are computed
  // once and shared by every round. Sentinels in `choice`: 0/1 = forced by
  // the condition, -1 = zero mass both ways (never on a sampled path),
  // 2 = drawn each round against hi_share.
  std::vector<signed char> choice(d.node_count(), 0);
  std::vector<double> hi_share(d.node_count(), 0.0);
  std::vector<NodeId> draw_sites;
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    const DiagramNode& n = d.node(static_cast<NodeId>(i));
    if (n.kind != NodeKind::Decision) continue;
    if (condition.is_bound(n.var)) {
      choice[i] = condition.value(n.var) ? 1 : 0;
      continue;
    }
    if (g.log_space) {
      double lo_mass = std::log(n.lo_param) + g.value[n.lo];
      double hi_mass = std::log(n.hi_param) + g.value[n.hi];
      double total = log_add(lo_mass, hi_mass);
      if (total == kNegInf) {
        choice[i] = -1;
        continue;
      }
      hi_share[i] = std::exp(hi_mass - total);
    } else {
      double lo_mass = n.lo_param * g.value[n.lo];
      double hi_mass = n.hi_param * g.value[n.hi];
      if (lo_mass + hi_mass == 0.0) {
        choice[i] = -1;
        continue;
      }
      hi_share[i] = hi_mass / (lo_mass + hi_mass);
    }
    choice[i] = 2;
    draw_sites.push_back(static_cast<NodeId>(i));
  }

  Rng rng(seed);
  std::vector<Assignment> samples;
  samples.reserve(k);
  std::vector<NodeId> stack;
  for (int round = 0; round < k; ++round) {
    // Draws happen at every unbound decision node with positive mass, in
    // ascending node order, whether or not the node ends up on the sampled
    // path; this pins the generator stream for reproducibility.
    for (NodeId i : draw_sites) {
      choice[i] = rng.next_double() < hi_share[i] ? 1 : 0;
    }

    Assignment sample(d.num_vars());
    stack.assign(1, d.root());
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      const DiagramNode& n = d.node(id);
      if (n.kind == NodeKind::Decision) {
        if (choice[id] < 0) {
          throw std::logic_error("sampler reached a zero-mass node");
        }
        sample.bind(n.var, choice[id] == 1);
        stack.push_back(choice[id] == 1 ? n.hi : n.lo);
      } else if (n.kind == NodeKind::Conjunction) {
        for (NodeId c : n.children) stack.push_back(c);
      } else if (n.kind == NodeKind::False) {
        throw std::logic_error("sampler reached the false leaf");
      }
    }
    if (!sample.is_complete()) {
      throw std::logic_error("sampler produced an incomplete assignment");
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace ddroute
