// Acceptance checks for the route-sampling pipeline. Each criterion prints
// one PASS/FAIL line; the exit code is the number of failures.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ddroute/abstraction.hpp"
#include "ddroute/cnf.hpp"
#include "ddroute/compile.hpp"
#include "ddroute/diagram.hpp"
#include "ddroute/encode.hpp"
#include "ddroute/error.hpp"
#include "ddroute/eval.hpp"
#include "ddroute/graph.hpp"
#include "ddroute/inference.hpp"
#include "ddroute/pipeline.hpp"
#include "ddroute/rng.hpp"
#include "ddroute/synthetic.hpp"

using namespace ddroute;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome ok(std::string detail = "") { return {true, std::move(detail)}; }
Outcome fail(std::string detail) { return {false, std::move(detail)}; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

RoadGraph random_connected_graph(Rng& rng, int n) {
  std::vector<Vertex> vs;
  for (int i = 0; i < n; ++i) {
    vs.push_back({i, static_cast<double>(rng.next_below(100)),
                  static_cast<double>(rng.next_below(100))});
  }
  std::set<std::pair<int, int>> seen;
  std::vector<Edge> es;
  auto add = [&](int u, int v) {
    if (u == v) return;
    auto key = std::minmax(u, v);
    if (!seen.insert(key).second) return;
    es.push_back({key.first, key.second, 1.0 + rng.next_double()});
  };
  for (int i = 1; i < n; ++i) add(i, static_cast<int>(rng.next_below(i)));
  int extra = static_cast<int>(rng.next_below(n));
  for (int i = 0; i < extra; ++i) {
    add(static_cast<int>(rng.next_below(n)), static_cast<int>(rng.next_below(n)));
  }
  return RoadGraph(std::move(vs), std::move(es));
}

ProbDiagram compiled_grid(int width, CnfFormula* formula_out = nullptr) {
  RoadGraph g = build_grid_graph(width, width);
  CnfFormula f = encode_relaxed(g);
  if (formula_out) *formula_out = f;
  return smooth(compile_cnf(f));
}

// Solutions of the relaxed encoding must decompose into one simple path
// between the two endpoint vertices plus vertex-disjoint cycles.
Outcome check_solution_shape(const RoadGraph& g, const VarMap& vm,
                             const Assignment& sol) {
  std::vector<int> endpoints;
  std::set<int> selected;
  for (int v : vm.vertex_ids()) {
    if (sol.value(vm.s_var(v))) endpoints.push_back(v);
    if (sol.value(vm.n_var(v))) selected.insert(v);
  }
  if (endpoints.size() != 2) {
    return fail("expected 2 endpoints, got " + std::to_string(endpoints.size()));
  }
  for (int e : endpoints) {
    if (!selected.count(e)) return fail("endpoint not on the trip");
  }
  auto selected_degree = [&](int v) {
    int d = 0;
    for (int nb : g.neighbors(v)) d += selected.count(nb) ? 1 : 0;
    return d;
  };
  for (int v : selected) {
    int want = (v == endpoints[0] || v == endpoints[1]) ? 1 : 2;
    if (selected_degree(v) != want) {
      return fail("vertex " + std::to_string(v) + " has selected degree " +
                  std::to_string(selected_degree(v)) + ", wanted " +
                  std::to_string(want));
    }
  }
  // Follow the unique-successor walk; it must join the endpoints. Whatever
  // is left over has all-degree-2 and forms disjoint cycles.
  std::set<int> visited{endpoints[0]};
  int cur = endpoints[0];
  while (cur != endpoints[1]) {
    int next = -1;
    for (int nb : g.neighbors(cur)) {
      if (selected.count(nb) && !visited.count(nb)) {
        if (next != -1) return fail("walk forks");
        next = nb;
      }
    }
    if (next == -1) return fail("walk dead-ends before the second endpoint");
    visited.insert(next);
    cur = next;
  }
  return ok();
}

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

// Shared desk-scale model: 16x16 road grid, 4-unit cells (16 regions),
// trained on 500 synthetic trips. Built once, used by criteria 9 and 10.
struct DeskSetup {
  RouteModel trained;
  RouteModel untrained;
  std::vector<Trip> tests;
};

DeskSetup build_desk_setup() {
  RoadGraph road = build_grid_graph(16, 16);
  Abstraction abs = abstract_graph(road, 4.0);
  ProbDiagram base = smooth(compile_cnf(encode_relaxed(abs.region_graph)));

  ProbDiagram trained = base;
  for (const Trip& t : generate_synthetic_trips(road, abs, 500, 7)) {
    try {
      learn_assignment(trained,
                       trip_to_assignment(abs.region_graph, project_trip(abs, t)));
    } catch (const ValidationError&) {
    } catch (const RejectedInstanceError&) {
    }
  }
  finalize_params(trained);

  DeskSetup setup{
      make_route_model(road, abs, std::move(trained)),
      make_route_model(road, abs, std::move(base)),
      generate_synthetic_trips(road, abs, 100, 21),
  };
  return setup;
}

// --- criteria ---------------------------------------------------------

Outcome criterion_variable_count() {
  Rng rng(301);
  std::vector<RoadGraph> graphs;
  for (int w = 2; w <= 5; ++w) graphs.push_back(build_grid_graph(w, w));
  for (int i = 0; i < 10; ++i) {
    graphs.push_back(random_connected_graph(rng, 4 + static_cast<int>(rng.next_below(17))));
  }
  for (const RoadGraph& g : graphs) {
    CnfFormula f = encode_relaxed(g);
    if (f.num_vars() != 2 * g.vertex_count()) {
      return fail("graph with " + std::to_string(g.vertex_count()) +
                  " vertices got " + std::to_string(f.num_vars()) + " variables");
    }
    int h1 = 0, h2 = 0;
    for (ClauseTag t : f.tags()) {
      h1 += t == ClauseTag::H1;
      h2 += t == ClauseTag::H2;
    }
    if (h1 != 1 || h2 != g.vertex_count()) {
      return fail("unexpected family sizes on a " +
                  std::to_string(g.vertex_count()) + "-vertex graph");
    }
  }
  return ok(std::to_string(graphs.size()) + " graphs");
}

Outcome criterion_solution_semantics() {
  for (int width : {2, 3}) {
    RoadGraph g = build_grid_graph(width, width);
    CnfFormula f = encode_relaxed(g);
    auto sols = enumerate_solutions(f);
    uint64_t expected = width == 2 ? 8 : 94;
    if (sols.size() != expected) {
      return fail(std::to_string(width) + "x" + std::to_string(width) + " has " +
                  std::to_string(sols.size()) + " solutions, expected " +
                  std::to_string(expected));
    }
    ProbDiagram d = smooth(compile_cnf(f));
    if (model_count(d) != sols.size()) {
      return fail("model count " + std::to_string(model_count(d)) +
                  " != enumerated " + std::to_string(sols.size()));
    }
    for (const Assignment& sol : sols) {
      Outcome shape = check_solution_shape(g, *f.var_map(), sol);
      if (!shape.pass) return shape;
    }
  }
  return ok("8 and 94 solutions, all path-plus-cycles");
}

Outcome criterion_structural_properties() {
  for (int width : {2, 3, 4}) {
    ProbDiagram d = compiled_grid(width);
    PropertyReport rep = validate(d);
    if (!rep.all_pass()) {
      std::string which = !rep.determinism.pass ? rep.determinism.detail
                          : !rep.decomposability.pass ? rep.decomposability.detail
                                                      : rep.smoothness.detail;
      return fail(std::to_string(width) + "-grid: " + which);
    }
  }
  return ok("grids 2, 3, 4");
}

Outcome criterion_smoothing_preserves_semantics() {
  Rng rng(47);
  for (int round = 0; round < 20; ++round) {
    int num_vars = 6 + static_cast<int>(rng.next_below(9));
    CnfFormula f(num_vars);
    int clauses = 4 + static_cast<int>(rng.next_below(16));
    for (int c = 0; c < clauses; ++c) {
      std::vector<int> clause;
      std::vector<bool> used(num_vars + 1, false);
      int width = 1 + static_cast<int>(rng.next_below(4));
      for (int i = 0; i < width; ++i) {
        int var = 1 + static_cast<int>(rng.next_below(num_vars));
        if (used[var]) continue;
        used[var] = true;
        clause.push_back(rng.bernoulli(0.5) ? var : -var);
      }
      f.add_clause(std::move(clause));
    }
    CompileOptions opts;
    opts.order = natural_order(num_vars);
    ProbDiagram rough = compile_cnf(f, opts);
    ProbDiagram smoothed = smooth(rough);
    if (!validate(smoothed).all_pass()) return fail("smoothed diagram invalid");
    if (model_count(smoothed) != enumerate_solutions(f).size()) {
      return fail("round " + std::to_string(round) + ": count mismatch");
    }
    for (unsigned bits = 0; bits < (1u << num_vars); ++bits) {
      Assignment a(num_vars);
      for (int v = 1; v <= num_vars; ++v) a.bind(v, (bits >> (num_vars - v)) & 1u);
      if (accepts(rough, a) != accepts(smoothed, a) ||
          accepts(smoothed, a) != satisfies(f, a)) {
        return fail("round " + std::to_string(round) + ": membership changed");
      }
    }
  }
  return ok("20 random formulas");
}

Outcome criterion_training_counters() {
  CnfFormula f;
  ProbDiagram d = compiled_grid(3, &f);
  auto sols = enumerate_solutions(f);
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    learn_assignment(d, sols[rng.next_below(sols.size())]);
  }
  finalize_params(d);

  std::vector<uint64_t> visits = traversal_visits(d);
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    const DiagramNode& n = d.node(static_cast<NodeId>(i));
    if (n.kind != NodeKind::Decision) continue;
    if (n.lo_count + n.hi_count != visits[i]) {
      return fail("node " + std::to_string(i) + ": counters " +
                  std::to_string(n.lo_count + n.hi_count) + " != visits " +
                  std::to_string(visits[i]));
    }
    double hi = static_cast<double>(n.hi_count + 1) /
                static_cast<double>(n.hi_count + n.lo_count + 2);
    if (n.hi_param != hi || n.lo_param != 1.0 - hi) {
      return fail("node " + std::to_string(i) + ": parameters off the add-one rule");
    }
    if (!(n.lo_param > 0.0 && n.hi_param > 0.0)) {
      return fail("node " + std::to_string(i) + ": zero branch probability");
    }
  }
  return ok("300 instances over 94 solutions");
}

Outcome criterion_sampling_distribution() {
  RoadGraph g = build_grid_graph(2, 2);
  CnfFormula f = encode_relaxed(g);
  ProbDiagram d = smooth(compile_cnf(f));
  for (int i = 0; i < 9; ++i) {
    learn_assignment(d, trip_to_assignment(g, Trip{{0, 1, 3}}));
  }
  for (int i = 0; i < 3; ++i) {
    learn_assignment(d, trip_to_assignment(g, Trip{{2, 0}}));
  }
  learn_assignment(d, trip_to_assignment(g, Trip{{1, 3, 2}}));
  finalize_params(d);

  double tv = distribution_check(d, Assignment(f.num_vars()), 20000, 9001);
  if (!(tv < 0.03)) {
    return fail("total variation " + fmt(tv) + " at 20000 samples");
  }
  Assignment sigma = trip_to_assignment(g, Trip{{0, 1, 3}});
  double tv_fixed = distribution_check(d, sigma, 2000, 77);
  if (!(tv_fixed <= 1e-9)) {
    return fail("fully conditioned distance " + fmt(tv_fixed));
  }
  return ok("TV " + fmt(tv) + " unconditioned, 0 fully conditioned");
}

Outcome criterion_conditioned_samples_satisfy() {
  CnfFormula f;
  ProbDiagram d = compiled_grid(3, &f);
  auto sols = enumerate_solutions(f);
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    learn_assignment(d, sols[rng.next_below(sols.size())]);
  }
  finalize_params(d);

  int total = 0, conditions = 0;
  while (conditions < 20) {
    Assignment cond(f.num_vars());
    for (int v = 1; v <= f.num_vars(); ++v) {
      uint64_t r = rng.next_below(10);
      if (r < 2) cond.bind(v, r == 1);
    }
    if (probability_of(d, cond) <= 0.0) continue;
    ++conditions;
    auto samples = sample_assignments(d, cond, 500, rng.next_u64());
    for (const Assignment& s : samples) {
      ++total;
      if (!s.is_complete()) return fail("incomplete sample");
      for (int v = 1; v <= f.num_vars(); ++v) {
        if (cond.is_bound(v) && s.value(v) != cond.value(v)) {
          return fail("sample contradicts its condition");
        }
      }
      if (!satisfies(f, s)) return fail("sample violates the formula");
    }
  }
  return ok(std::to_string(total) + " samples over 20 conditions");
}

Outcome criterion_region_trip_support() {
  RoadGraph road = build_grid_graph(4, 4);
  Abstraction abs = abstract_graph(road, 2.0);
  CnfFormula f = encode_relaxed(abs.region_graph);
  ProbDiagram d = smooth(compile_cnf(f));
  RouteModel m = make_route_model(road, abs, std::move(d));

  Assignment cond = build_query_assignment(m, RouteQuery{0, 15});
  std::set<std::vector<int>> expected;
  for (const Assignment& sol : enumerate_solutions(f)) {
    if (!sol.value(m.var_map.s_var(0)) || !sol.value(m.var_map.s_var(3))) continue;
    expected.insert(
        refine_region_trip(abs.region_graph, m.var_map, sol, 0, 3).vertices);
  }
  if (expected.size() < 2) return fail("expected at least two region routes");

  std::set<std::vector<int>> sampled;
  for (const Assignment& s :
       sample_assignments(m.diagram, cond, 5000, 4242)) {
    sampled.insert(
        refine_region_trip(abs.region_graph, m.var_map, s, 0, 3).vertices);
  }
  if (sampled != expected) {
    return fail("sampled " + std::to_string(sampled.size()) + " of " +
                std::to_string(expected.size()) + " region routes");
  }
  return ok("all " + std::to_string(expected.size()) +
            " region routes in 5000 samples");
}

Outcome criterion_match_quality(const DeskSetup& desk) {
  EvalConfig cfg;
  cfg.samples_per_instance = 20;
  cfg.seed = 3;

  MatchReport trained = evaluate_suite(
      desk.trained, desk.tests, {"shortest", "single-pass", "stepwise"}, cfg);
  MatchReport untrained =
      evaluate_suite(desk.untrained, desk.tests, {"single-pass"}, cfg);

  double single = 0.0, shortest = 0.0;
  for (const MethodReport& mr : trained.methods) {
    if (mr.method == "single-pass") single = mr.epsilon_match.p50;
    if (mr.method == "shortest") shortest = mr.epsilon_match.p50;
  }
  double untrained_single = untrained.methods.at(0).epsilon_match.p50;

  std::string detail = "trained " + fmt(single) + ", shortest " +
                       fmt(shortest) + ", untrained " + fmt(untrained_single);
  if (!(single >= shortest + 0.05)) {
    return fail(detail + ": no margin over the shortest baseline");
  }
  if (!(single >= untrained_single)) {
    return fail(detail + ": training did not help");
  }
  return {true, detail};
}

Outcome criterion_runtime_margin(const DeskSetup& desk) {
  std::vector<RouteQuery> queries;
  for (const Trip& t : desk.tests) queries.push_back({t.front(), t.back()});

  EvalConfig cfg;
  cfg.seed = 3;
  BenchReport report = benchmark_runtime(
      desk.trained, queries, {"shortest", "single-pass", "stepwise"}, cfg);

  double single = 0.0, stepwise = 0.0;
  double single_ratio = 0.0, stepwise_ratio = 0.0;
  for (const BenchMethodReport& mr : report.methods) {
    if (mr.method == "single-pass") {
      single = mr.time_ms.p50;
      single_ratio = mr.ratio.p50;
    }
    if (mr.method == "stepwise") {
      stepwise = mr.time_ms.p50;
      stepwise_ratio = mr.ratio.p50;
    }
  }
  if (single <= 0.0) return fail("no single-pass timing");
  double speedup = stepwise / single;
  std::string detail = "stepwise/single-pass median ratio " + fmt(speedup);
  if (!(speedup > 2.0)) return fail(detail);
  if (!(single_ratio < stepwise_ratio)) {
    return fail(detail + ", but baseline-relative ordering flipped");
  }
  return {true, detail};
}

Outcome criterion_diagram_growth() {
  const std::size_t caps[] = {310, 1460, 23680};
  std::vector<std::size_t> sizes;
  for (int width : {2, 3, 4}) {
    sizes.push_back(compiled_grid(width).node_count());
  }
  for (int i = 0; i < 3; ++i) {
    if (sizes[i] > caps[i]) {
      return fail("grid " + std::to_string(i + 2) + " has " +
                  std::to_string(sizes[i]) + " nodes, cap " +
                  std::to_string(caps[i]));
    }
  }
  if (!(sizes[0] < sizes[1] && sizes[1] < sizes[2])) {
    return fail("node counts are not increasing");
  }
  return ok(std::to_string(sizes[0]) + ", " + std::to_string(sizes[1]) + ", " +
            std::to_string(sizes[2]) + " nodes");
}

int run_cli(const std::string& args) {
  std::string cmd =
      std::string(DDROUTE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_cli_reproducibility() {
  fs::path base = "/tmp/ddroute_acceptance";
  fs::remove_all(base);
  std::vector<std::string> artifacts = {
      "road.json", "abs.json",    "train.jsonl",   "region.cnf",
      "region.cnf.vars", "region.pd", "trained.pd", "meta.json",
      "routes.jsonl", "routes_stepwise.jsonl", "eval.json"};

  for (const char* side : {"a", "b"}) {
    fs::path dir = base / side;
    fs::create_directories(dir);
    auto p = [&dir](const std::string& name) { return (dir / name).string(); };
    std::string model = " --graph " + p("road.json") + " --abstraction " +
                        p("abs.json") + " --diagram " + p("trained.pd");

    if (run_cli("gen-grid --width 6 --height 6 --out " + p("road.json")) != 0 ||
        run_cli("abstract --graph " + p("road.json") + " --cell-size 2 --out " +
                p("abs.json")) != 0 ||
        run_cli("gen-trips --graph " + p("road.json") + " --abstraction " +
                p("abs.json") + " --count 40 --seed 5 --out " +
                p("train.jsonl")) != 0 ||
        run_cli("encode --abstraction " + p("abs.json") + " --out " +
                p("region.cnf")) != 0 ||
        run_cli("compile --cnf " + p("region.cnf") + " --out " +
                p("region.pd")) != 0 ||
        run_cli("learn --diagram " + p("region.pd") + " --abstraction " +
                p("abs.json") + " --trips " + p("train.jsonl") + " --out " +
                p("trained.pd") + " --meta " + p("meta.json")) != 0) {
      return fail("a pipeline stage failed in " + dir.string());
    }

    std::ofstream(dir / "q.jsonl")
        << R"({"s": 0, "t": 35})" << '\n'
        << R"({"s": 30, "t": 5})" << '\n';
    if (run_cli("sample" + model + " --queries " + p("q.jsonl") +
                " --seed 11 --k 3 --out " + p("routes.jsonl")) != 0 ||
        run_cli("sample-stepwise" + model + " --queries " + p("q.jsonl") +
                " --seed 11 --out " + p("routes_stepwise.jsonl")) != 0 ||
        run_cli("eval" + model + " --tests " + p("train.jsonl") +
                " --samples 3 --seed 13 --out " + p("eval.json")) != 0) {
      return fail("a query stage failed in " + dir.string());
    }
  }

  for (const std::string& name : artifacts) {
    std::string a = slurp(base / "a" / name);
    std::string b = slurp(base / "b" / name);
    if (a.empty()) return fail(name + " is empty");
    if (a != b) return fail(name + " differs between identical runs");
  }
  return ok(std::to_string(artifacts.size()) + " artifacts byte-identical");
}

}  // namespace

int main() {
  DeskSetup desk = build_desk_setup();

  struct Entry {
    const char* name;
    Outcome outcome;
  };
  std::vector<Entry> entries;
  auto guard = [](auto&& fn) -> Outcome {
    try {
      return fn();
    } catch (const std::exception& e) {
      return fail(std::string("exception: ") + e.what());
    }
  };

  entries.push_back({"two variables per vertex",
                     guard([] { return criterion_variable_count(); })});
  entries.push_back({"solution sets match enumeration",
                     guard([] { return criterion_solution_semantics(); })});
  entries.push_back({"compiled diagrams pass validation",
                     guard([] { return criterion_structural_properties(); })});
  entries.push_back({"smoothing preserves semantics",
                     guard([] { return criterion_smoothing_preserves_semantics(); })});
  entries.push_back({"counters and parameters follow training",
                     guard([] { return criterion_training_counters(); })});
  entries.push_back({"samples track the learned distribution",
                     guard([] { return criterion_sampling_distribution(); })});
  entries.push_back({"conditioned samples satisfy the encoding",
                     guard([] { return criterion_conditioned_samples_satisfy(); })});
  entries.push_back({"sampling covers every region route",
                     guard([] { return criterion_region_trip_support(); })});
  entries.push_back({"training improves match quality",
                     guard([&] { return criterion_match_quality(desk); })});
  entries.push_back({"single-pass sampling outpaces stepwise",
                     guard([&] { return criterion_runtime_margin(desk); })});
  entries.push_back({"diagram growth stays bounded",
                     guard([] { return criterion_diagram_growth(); })});
  entries.push_back({"CLI runs are reproducible",
                     guard([] { return criterion_cli_reproducibility(); })});

  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Entry& e = entries[i];
    failures += e.outcome.pass ? 0 : 1;
    std::printf("criterion %zu (%s): %s%s%s\n", i + 1, e.name,
                e.outcome.pass ? "PASS" : "FAIL",
                e.outcome.detail.empty() ? "" : " — ",
                e.outcome.detail.c_str());
  }
  if (failures == 0) {
    std::printf("all %zu criteria passed\n", entries.size());
  } else {
    std::printf("%d criteria failed\n", failures);
  }
  return failures;
}
