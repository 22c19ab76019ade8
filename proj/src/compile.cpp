#include "ddroute/compile.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <map>
#include <optional>
#include <unordered_map>

#include "ddroute/error.hpp"

namespace ddroute {

std::vector<int> natural_order(int num_vars) {
  std::vector<int> order(num_vars);
  for (int i = 0; i < num_vars; ++i) order[i] = i + 1;
  return order;
}

std::vector<int> interleaved_order(const VarMap& vm) {
  std::vector<int> order;
  order.reserve(vm.num_vars());
  for (int id : vm.vertex_ids()) {
    order.push_back(vm.n_var(id));
    order.push_back(vm.s_var(id));
  }
  return order;
}

namespace {

struct CClause {
  uint64_t pos = 0;
  uint64_t neg = 0;
  friend auto operator<=>(const CClause&, const CClause&) = default;
  uint64_t vars() const { return pos | neg; }
};

// Canonical residual: sorted, deduplicated.
using Residual = std::vector<CClause>;

struct ResidualHash {
  std::size_t operator()(const Residual& r) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const CClause& c : r) {
      h = (h ^ c.pos) * 0x100000001b3ULL;
      h = (h ^ c.neg) * 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

// Residual after binding var := value; nullopt when a clause empties out.
std::optional<Residual> cofactor(const Residual& r, int var, bool value) {
  uint64_t bit = 1ULL << (var - 1);
  Residual out;
  out.reserve(r.size());
  for (const CClause& c : r) {
    if ((value ? c.pos : c.neg) & bit) continue;  // satisfied, drop
    CClause reduced = c;
    (value ? reduced.neg : reduced.pos) &= ~bit;
    if (reduced.vars() == 0) return std::nullopt;
    out.push_back(reduced);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

class Compiler {
 public:
  Compiler(const CnfFormula& f, const CompileOptions& opts)
      : builder_(f.num_vars()), num_vars_(f.num_vars()), opts_(opts) {
    int ceiling = std::min(opts.var_ceiling, 64);
    if (num_vars_ > ceiling) {
      throw ResourceLimitError("formula has " + std::to_string(num_vars_) +
                               " variables, over the compiler ceiling of " +
                               std::to_string(ceiling));
    }

    order_ = opts.order;
    if (order_.empty()) {
      order_ = f.var_map() ? interleaved_order(*f.var_map())
                           : natural_order(num_vars_);
    }
    std::vector<bool> seen(num_vars_ + 1, false);
    if (static_cast<int>(order_.size()) != num_vars_) {
      throw ValidationError("variable order must cover every variable");
    }
    for (int v : order_) {
      if (v < 1 || v > num_vars_ || seen[v]) {
        throw ValidationError("variable order is not a permutation");
      }
      seen[v] = true;
    }
    rank_.assign(num_vars_ + 1, 0);
    for (int i = 0; i < num_vars_; ++i) rank_[order_[i]] = i;

    if (opts.timeout_seconds > 0.0) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(opts.timeout_seconds));
    }
  }

  ProbDiagram run(const CnfFormula& f) {
    Residual root_residual;
    for (const auto& clause : f.clauses()) {
      CClause c;
      for (int lit : clause) {
        (lit > 0 ? c.pos : c.neg) |= 1ULL << (std::abs(lit) - 1);
      }
      if (c.pos & c.neg) continue;  // tautology
      root_residual.push_back(c);
    }
    std::sort(root_residual.begin(), root_residual.end());
    root_residual.erase(
        std::unique(root_residual.begin(), root_residual.end()),
        root_residual.end());

    NodeId root = build(std::move(root_residual));
    root = pad_free_variables(root);
    return builder_.finish(root);
  }

 private:
  NodeId mk_false() { return builder_.false_leaf(); }
  NodeId mk_true() { return builder_.true_leaf(); }

  NodeId mk_decision(int var, NodeId lo, NodeId hi) {
    if (lo == hi && builder_.node(lo).kind == NodeKind::False) return lo;
    auto key = std::tuple(var, lo, hi);
    auto it = decision_cache_.find(key);
    if (it != decision_cache_.end()) return it->second;
    NodeId id = builder_.decision(var, lo, hi);
    check_limits();
    decision_cache_.emplace(key, id);
    return id;
  }

  NodeId mk_conjunction(std::vector<NodeId> children) {
    std::sort(children.begin(), children.end());
    if (children.size() == 1) return children[0];
    auto it = conjunction_cache_.find(children);
    if (it != conjunction_cache_.end()) return it->second;
    NodeId id = builder_.conjunction(children);
    check_limits();
    conjunction_cache_.emplace(std::move(children), id);
    return id;
  }

  void check_limits() {
    if (builder_.node_count() > opts_.node_budget) {
      throw ResourceLimitError("diagram node budget of " +
                               std::to_string(opts_.node_budget) +
                               " exceeded");
    }
    if (deadline_ && (++tick_ & 0xfff) == 0 &&
        std::chrono::steady_clock::now() > *deadline_) {
      throw ResourceLimitError("compilation timeout exceeded");
    }
  }

  // Unit propagation to fixpoint. Returns the implied literals and the
  // reduced residual, or nullopt on conflict.
  std::optional<std::pair<std::vector<int>, Residual>> propagate(Residual r) {
    std::vector<int> implied;
    bool again = true;
    while (again) {
      again = false;
      for (const CClause& c : r) {
        uint64_t vm = c.vars();
        if (std::popcount(vm) != 1) continue;
        int var = std::countr_zero(vm) + 1;
        bool value = c.pos != 0;
        implied.push_back(value ? var : -var);
        auto next = cofactor(r, var, value);
        if (!next) return std::nullopt;
        r = std::move(*next);
        again = true;
        break;
      }
    }
    return std::pair(std::move(implied), std::move(r));
  }

  std::vector<Residual> split_components(const Residual& r) {
    std::vector<Residual> comps;
    std::vector<bool> used(r.size(), false);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (used[i]) continue;
      uint64_t mask = r[i].vars();
      Residual comp{r[i]};
      used[i] = true;
      bool grew = true;
      while (grew) {
        grew = false;
        for (std::size_t j = i + 1; j < r.size(); ++j) {
          if (!used[j] && (r[j].vars() & mask)) {
            mask |= r[j].vars();
            comp.push_back(r[j]);
            used[j] = true;
            grew = true;
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
    return comps;
  }

  int split_variable(const Residual& r) const {
    uint64_t mask = 0;
    for (const CClause& c : r) mask |= c.vars();
    for (int v : order_) {
      if ((mask >> (v - 1)) & 1ULL) return v;
    }
    throw std::logic_error("component without variables");
  }

  NodeId build(Residual r) {
    auto propagated = propagate(std::move(r));
    if (!propagated) return mk_false();
    auto& [implied, core] = *propagated;

    NodeId node;
    auto hit = cache_.find(core);
    if (hit != cache_.end()) {
      node = hit->second;
    } else if (core.empty()) {
      node = mk_true();
    } else {
      std::vector<NodeId> parts;
      for (Residual& comp : split_components(core)) {
        int var = split_variable(comp);
        auto lo_residual = cofactor(comp, var, false);
        NodeId lo = lo_residual ? build(std::move(*lo_residual)) : mk_false();
        auto hi_residual = cofactor(comp, var, true);
        NodeId hi = hi_residual ? build(std::move(*hi_residual)) : mk_false();
        parts.push_back(mk_decision(var, lo, hi));
      }
      node = parts.size() == 1 ? parts[0] : mk_conjunction(std::move(parts));
      cache_.emplace(std::move(core), node);
    }

    // Implied literals become decision nodes with one false branch; wrapped
    // innermost-last so the chain reads in ascending order from the top.
    std::sort(implied.begin(), implied.end(), [&](int a, int b) {
      return rank_[std::abs(a)] > rank_[std::abs(b)];
    });
    for (int lit : implied) {
      node = lit > 0 ? mk_decision(lit, mk_false(), node)
                     : mk_decision(-lit, node, mk_false());
    }
    return node;
  }

  // Free variables (mentioned by no reachable decision node) get a decision
  // node with both arms true, conjoined with the root, so that downstream
  // inference sees a distribution over every variable.
  NodeId pad_free_variables(NodeId root) {
    std::vector<bool> visited(builder_.node_count(), false);
    std::vector<bool> covered(num_vars_ + 1, false);
    std::vector<NodeId> stack{root};
    visited[root] = true;
    while (!stack.empty()) {
      const DiagramNode& n = builder_.node(stack.back());
      stack.pop_back();
      std::vector<NodeId> next;
      if (n.kind == NodeKind::Decision) {
        covered[n.var] = true;
        next = {n.lo, n.hi};
      } else if (n.kind == NodeKind::Conjunction) {
        next = n.children;
      }
      for (NodeId c : next) {
        if (!visited[c]) {
          visited[c] = true;
          stack.push_back(c);
        }
      }
    }

    if (builder_.node(root).kind == NodeKind::False) return root;
    std::vector<NodeId> children;
    for (int v = 1; v <= num_vars_; ++v) {
      if (!covered[v]) children.push_back(mk_decision(v, mk_true(), mk_true()));
    }
    if (children.empty()) return root;
    if (builder_.node(root).kind != NodeKind::True) children.push_back(root);
    return mk_conjunction(std::move(children));
  }

  ProbDiagram::Builder builder_;
  int num_vars_;
  CompileOptions opts_;
  std::vector<int> order_;
  std::vector<int> rank_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  uint64_t tick_ = 0;
  std::unordered_map<Residual, NodeId, ResidualHash> cache_;
  std::map<std::tuple<int, NodeId, NodeId>, NodeId> decision_cache_;
  std::map<std::vector<NodeId>, NodeId> conjunction_cache_;
};

}  // namespace

ProbDiagram compile_cnf(const CnfFormula& f, const CompileOptions& opts) {
  Compiler compiler(f, opts);
  return compiler.run(f);
}

}  // namespace ddroute
