#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <vector>

#include "ddroute/cnf.hpp"
#include "ddroute/compile.hpp"
#include "ddroute/diagram.hpp"
#include "ddroute/encode.hpp"
#include "ddroute/error.hpp"
#include "ddroute/graph.hpp"
#include "ddroute/inference.hpp"
#include "ddroute/rng.hpp"

using namespace ddroute;

namespace {

// (x1 | x2) & (~x1 | ~x3), compiled in natural order and smoothed: 9 nodes,
// root 8 = D(var 1, lo -> A(2,4), hi -> A(3,6)).
ProbDiagram example_diagram() {
  CnfFormula f(3);
  f.add_clause({1, 2});
  f.add_clause({-1, -3});
  CompileOptions opts;
  opts.order = natural_order(3);
  return smooth(compile_cnf(f, opts));
}

Assignment assign(int num_vars, std::vector<int> literals) {
  Assignment a(num_vars);
  for (int lit : literals) a.bind(lit > 0 ? lit : -lit, lit > 0);
  return a;
}

ProbDiagram grid_diagram(int width, CnfFormula* formula_out = nullptr) {
  RoadGraph g = build_grid_graph(width, width);
  CnfFormula f = encode_relaxed(g);
  if (formula_out) *formula_out = f;
  return smooth(compile_cnf(f));
}

std::vector<std::pair<uint64_t, uint64_t>> counters(const ProbDiagram& d) {
  std::vector<std::pair<uint64_t, uint64_t>> out;
  for (const DiagramNode& n : d.nodes()) out.emplace_back(n.lo_count, n.hi_count);
  return out;
}

// Total traversal visits per node when every training walk starts at the
// root: decision nodes forward lo_count/hi_count to the matching child,
// conjunctions forward their own visit count to every child.
std::vector<uint64_t> traversal_visits(const ProbDiagram& d) {
  std::vector<uint64_t> visits(d.node_count(), 0);
  visits[d.root()] = d.trained_instances();
  for (NodeId id = d.root(); id >= 0; --id) {
    const DiagramNode& n = d.node(id);
    if (n.kind == NodeKind::Decision) {
      visits[n.lo] += n.lo_count;
      visits[n.hi] += n.hi_count;
    } else if (n.kind == NodeKind::Conjunction) {
      for (NodeId c : n.children) visits[c] += visits[id];
    }
  }
  return visits;
}

}  // namespace

TEST_CASE("parameter finalization applies add-one smoothing") {
  ProbDiagram::Builder b(1);
  NodeId f = b.false_leaf();
  NodeId t = b.true_leaf();
  SUBCASE("no data stays even") {
    NodeId d = b.decision(1, f, t, 0, 0);
    ProbDiagram dia = b.finish(d);
    finalize_params(dia);
    CHECK(dia.node(d).hi_param == doctest::Approx(0.5));
    CHECK(dia.node(d).lo_param == doctest::Approx(0.5));
  }
  SUBCASE("three high one low") {
    NodeId d = b.decision(1, f, t, 1, 3);
    ProbDiagram dia = b.finish(d);
    finalize_params(dia);
    CHECK(dia.node(d).hi_param == doctest::Approx(4.0 / 6.0));
    CHECK(dia.node(d).lo_param == doctest::Approx(2.0 / 6.0));
  }
  SUBCASE("six high two low") {
    NodeId d = b.decision(1, f, t, 2, 6);
    ProbDiagram dia = b.finish(d);
    finalize_params(dia);
    CHECK(dia.node(d).hi_param == doctest::Approx(0.7));
    CHECK(dia.node(d).lo_param == doctest::Approx(0.3));
  }
}

TEST_CASE("training walks increment exactly the traversed branches") {
  ProbDiagram d = example_diagram();
  Assignment tau = assign(3, {1, 2, -3});

  learn_assignment(d, tau);
  CHECK(d.trained_instances() == 1);

  // Root (8) took its high branch into A(3,6); the variable-3 node (3) took
  // low; the padded variable-2 node (6) took high. Nothing else moved.
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    const DiagramNode& n = d.node(static_cast<NodeId>(i));
    uint64_t expect_lo = (i == 3) ? 1 : 0;
    uint64_t expect_hi = (i == 6 || i == 8) ? 1 : 0;
    CHECK(n.lo_count == expect_lo);
    CHECK(n.hi_count == expect_hi);
  }

  learn_assignment(d, tau);
  CHECK(d.trained_instances() == 2);
  CHECK(d.node(3).lo_count == 2);
  CHECK(d.node(6).hi_count == 2);
  CHECK(d.node(8).hi_count == 2);
}

TEST_CASE("rejected training instances mutate nothing") {
  ProbDiagram d = example_diagram();
  learn_assignment(d, assign(3, {1, 2, -3}));
  auto before = counters(d);

  // Violates (~x1 | ~x3).
  CHECK_THROWS_AS(learn_assignment(d, assign(3, {1, 2, 3})), RejectedInstanceError);
  CHECK(counters(d) == before);
  CHECK(d.trained_instances() == 1);
}

TEST_CASE("training validates its input") {
  ProbDiagram d = example_diagram();
  Assignment wrong_width(2);
  wrong_width.bind(1, true);
  wrong_width.bind(2, true);
  CHECK_THROWS_AS(learn_assignment(d, wrong_width), ValidationError);

  Assignment partial(3);
  partial.bind(1, true);
  CHECK_THROWS_AS(learn_assignment(d, partial), ValidationError);
}

TEST_CASE("probability of assignments under even parameters") {
  ProbDiagram d = example_diagram();

  CHECK(probability_of(d, assign(3, {1, 2, -3})) == doctest::Approx(0.125));
  // A violating assignment has no mass.
  CHECK(probability_of(d, assign(3, {1, 2, 3})) == doctest::Approx(0.0));
  // Partial conditions sum the matching solutions: two on each side of x1.
  CHECK(probability_of(d, assign(3, {1})) == doctest::Approx(0.25));
  CHECK(probability_of(d, assign(3, {-1})) == doctest::Approx(0.25));
  // The empty condition is the diagram's total mass.
  CHECK(probability_of(d, Assignment(3)) == doctest::Approx(0.5));

  Assignment wrong_width(2);
  CHECK_THROWS_AS(probability_of(d, wrong_width), ValidationError);
}

TEST_CASE("total mass equals the sum over enumerated solutions") {
  CnfFormula f;
  ProbDiagram d = grid_diagram(2, &f);

  // Train on a skewed diet so the parameters are not uniform.
  RoadGraph g = build_grid_graph(2, 2);
  for (int i = 0; i < 5; ++i) {
    learn_assignment(d, trip_to_assignment(g, Trip{{0, 1, 3}}));
  }
  learn_assignment(d, trip_to_assignment(g, Trip{{0, 2}}));
  finalize_params(d);

  double total = 0.0;
  for (const Assignment& s : enumerate_solutions(f)) {
    double p = probability_of(d, s);
    CHECK(p > 0.0);  // add-one smoothing keeps every solution reachable
    total += p;
  }
  CHECK(probability_of(d, Assignment(f.num_vars())) == doctest::Approx(total));
}

TEST_CASE("branch counters satisfy the traversal-count identity") {
  CnfFormula f;
  ProbDiagram d = grid_diagram(3, &f);

  auto sols = enumerate_solutions(f);
  REQUIRE(sols.size() == 94);
  Rng rng(97);
  for (int i = 0; i < 500; ++i) {
    learn_assignment(d, sols[rng.next_below(sols.size())]);
  }
  CHECK(d.trained_instances() == 500);

  // Every decision node's two counters account for every walk reaching it.
  std::vector<uint64_t> visits = traversal_visits(d);
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    const DiagramNode& n = d.node(static_cast<NodeId>(i));
    if (n.kind == NodeKind::Decision) {
      CHECK(n.lo_count + n.hi_count == visits[i]);
    }
  }
}

TEST_CASE("fully conditioned sampling replays the condition") {
  ProbDiagram d = example_diagram();
  Assignment sigma = assign(3, {1, 2, -3});
  auto samples = sample_assignments(d, sigma, 4, 99);
  REQUIRE(samples.size() == 4);
  for (const Assignment& s : samples) CHECK(s == sigma);
}

TEST_CASE("conditioned samples cover the support and respect the condition") {
  CnfFormula f;
  ProbDiagram d = grid_diagram(2, &f);
  const VarMap& vm = *f.var_map();

  // Endpoints fixed to opposite corners 0 and 3.
  Assignment cond(f.num_vars());
  cond.bind(vm.s_var(0), true);
  cond.bind(vm.s_var(3), true);

  auto samples = sample_assignments(d, cond, 200, 7);
  REQUIRE(samples.size() == 200);
  std::set<std::set<int>> seen;
  for (const Assignment& s : samples) {
    CHECK(s.is_complete());
    CHECK(satisfies(f, s));
    CHECK(s.value(vm.s_var(0)));
    CHECK(s.value(vm.s_var(3)));
    std::set<int> n_true;
    for (int v : vm.vertex_ids()) {
      if (s.value(vm.n_var(v))) n_true.insert(v);
    }
    bool left = n_true == std::set<int>{0, 1, 3};
    bool right = n_true == std::set<int>{0, 2, 3};
    CHECK((left || right));
    seen.insert(n_true);
  }
  // Both corner-to-corner routes appear under even parameters.
  CHECK(seen.size() == 2);
}

TEST_CASE("sampling is reproducible per seed") {
  CnfFormula f;
  ProbDiagram d = grid_diagram(2, &f);
  Assignment empty(f.num_vars());

  auto a = sample_assignments(d, empty, 50, 12345);
  auto b = sample_assignments(d, empty, 50, 12345);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("zero-mass conditions are rejected") {
  CnfFormula f;
  ProbDiagram d = grid_diagram(2, &f);
  const VarMap& vm = *f.var_map();

  // Three endpoints violate the at-most-two family.
  Assignment three(f.num_vars());
  three.bind(vm.s_var(0), true);
  three.bind(vm.s_var(1), true);
  three.bind(vm.s_var(2), true);
  CHECK_THROWS_AS(sample_assignments(d, three, 1, 0), UnsatisfiableConditionError);

  ProbDiagram e = example_diagram();
  CHECK_THROWS_AS(sample_assignments(e, assign(3, {1, 3}), 1, 0),
                  UnsatisfiableConditionError);
}

TEST_CASE("sampling requires the root to mention every variable") {
  // A hand-built diagram over 2 variables that never decides variable 2.
  ProbDiagram::Builder b(2);
  NodeId f = b.false_leaf();
  NodeId t = b.true_leaf();
  NodeId d = b.decision(1, f, t);
  ProbDiagram partial = b.finish(d);
  CHECK_THROWS_AS(sample_assignments(partial, Assignment(2), 1, 0),
                  ValidationError);
}

TEST_CASE("learned parameters move sampling toward the training data") {
  CnfFormula f;
  ProbDiagram d = grid_diagram(2, &f);
  const VarMap& vm = *f.var_map();
  RoadGraph g = build_grid_graph(2, 2);

  // Heavily favor the route through vertex 1.
  for (int i = 0; i < 60; ++i) {
    learn_assignment(d, trip_to_assignment(g, Trip{{0, 1, 3}}));
  }
  learn_assignment(d, trip_to_assignment(g, Trip{{0, 2, 3}}));
  finalize_params(d);

  Assignment cond(f.num_vars());
  cond.bind(vm.s_var(0), true);
  cond.bind(vm.s_var(3), true);

  int via_one = 0;
  auto samples = sample_assignments(d, cond, 300, 4242);
  for (const Assignment& s : samples) {
    if (s.value(vm.n_var(1))) ++via_one;
  }
  CHECK(via_one > 240);  // expected rate is far above 80 percent
}
