#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ddroute/abstraction.hpp"
#include "ddroute/compile.hpp"
#include "ddroute/dimacs.hpp"
#include "ddroute/encode.hpp"
#include "ddroute/error.hpp"
#include "ddroute/eval.hpp"
#include "ddroute/inference.hpp"
#include "ddroute/pipeline.hpp"
#include "ddroute/report_io.hpp"
#include "ddroute/rng.hpp"
#include "ddroute/synthetic.hpp"

namespace {

using namespace ddroute;

void print_seed(uint64_t seed) { std::cerr << "seed: " << seed << '\n'; }

RouteModel load_model(const std::string& graph_path,
                      const std::string& abstraction_path,
                      const std::string& diagram_path) {
  return make_route_model(load_graph(graph_path),
                          load_abstraction(abstraction_path),
                          deserialize(diagram_path));
}

std::string first_failure(const PropertyReport& rep) {
  if (!rep.determinism.pass) return "determinism: " + rep.determinism.detail;
  if (!rep.decomposability.pass) {
    return "decomposability: " + rep.decomposability.detail;
  }
  return "smoothness: " + rep.smoothness.detail;
}

void print_property(const std::string& name, const PropertyCheck& check) {
  if (check.pass) {
    std::cout << name << ": pass\n";
  } else {
    std::cout << name << ": FAIL (" << check.detail << ")\n";
  }
}

struct GenGridArgs {
  int width = 0;
  int height = 0;
  double spacing = 1.0;
  std::string out;
};

struct AbstractArgs {
  std::string graph;
  double cell_size = 0.0;
  std::string out;
};

struct GenTripsArgs {
  std::string graph;
  std::string abstraction;
  int count = 0;
  uint64_t seed = 0;
  std::string out;
};

struct EncodeArgs {
  std::string graph;
  std::string abstraction;
  std::string out;
};

struct CompileArgs {
  std::string cnf;
  std::string out;
  std::string order = "auto";
  uint64_t node_budget = 10'000'000;
  double timeout = 0.0;
};

struct LearnArgs {
  std::string diagram;
  std::string abstraction;
  std::string trips;
  std::string out;
  std::string meta;
};

struct SampleArgs {
  std::string graph;
  std::string abstraction;
  std::string diagram;
  std::string queries;
  std::string out;
  uint64_t seed = 0;
  int max_attempts = 400;
  double time_budget = 300.0;
  int k_per_attempt = 1;
  bool timing = false;
};

struct EvalArgs {
  std::string graph;
  std::string abstraction;
  std::string diagram;
  std::string tests;
  std::string out;
  std::vector<std::string> methods{"shortest", "single-pass", "stepwise"};
  int samples = 20;
  double epsilon = -1.0;
  int workers = 1;
  uint64_t seed = 0;
  int max_attempts = 400;
  double time_budget = 300.0;
  bool timing = false;
};

struct BenchArgs {
  std::string graph;
  std::string abstraction;
  std::string diagram;
  std::string queries;
  std::string out;
  std::vector<std::string> methods{"shortest", "single-pass", "stepwise"};
  int workers = 1;
  uint64_t seed = 0;
  int max_attempts = 400;
  double time_budget = 300.0;
};

void run_gen_grid(const GenGridArgs& a) {
  save_graph(build_grid_graph(a.width, a.height, a.spacing), a.out);
}

void run_abstract(const AbstractArgs& a) {
  save_abstraction(abstract_graph(load_graph(a.graph), a.cell_size), a.out);
}

void run_gen_trips(const GenTripsArgs& a) {
  RoadGraph g = load_graph(a.graph);
  Abstraction abs = load_abstraction(a.abstraction);
  print_seed(a.seed);
  save_trips(generate_synthetic_trips(g, abs, a.count, a.seed), a.out);
}

void run_encode(const EncodeArgs& a) {
  RoadGraph g = a.graph.empty() ? load_abstraction(a.abstraction).region_graph
                                : load_graph(a.graph);
  CnfFormula f = encode_relaxed(g);
  write_dimacs(f, a.out);
  std::cerr << "variables: " << f.num_vars()
            << " clauses: " << f.clause_count() << '\n';
}

void run_compile(const CompileArgs& a) {
  CnfFormula f = read_dimacs(a.cnf);
  CompileOptions opts;
  opts.node_budget = a.node_budget;
  opts.timeout_seconds = a.timeout;
  if (a.order == "natural") {
    opts.order = natural_order(f.num_vars());
  } else if (a.order == "interleaved") {
    if (!f.var_map()) {
      throw ValidationError(
          "interleaved order needs the .vars sidecar next to the CNF");
    }
    opts.order = interleaved_order(*f.var_map());
  }
  ProbDiagram d = smooth(compile_cnf(f, opts));
  PropertyReport rep = validate(d);
  if (!rep.all_pass()) {
    throw ValidationError("compiled diagram failed validation: " +
                          first_failure(rep));
  }
  serialize(d, a.out);
  std::cerr << "nodes: " << d.node_count() << '\n';
}

void run_learn(const LearnArgs& a) {
  ProbDiagram d = deserialize(a.diagram);
  Abstraction abs = load_abstraction(a.abstraction);
  VarMap vm(abs.region_graph);
  if (d.num_vars() != vm.num_vars()) {
    throw ValidationError("diagram has " + std::to_string(d.num_vars()) +
                          " variables but the region encoding needs " +
                          std::to_string(vm.num_vars()));
  }
  uint64_t rejected = 0;
  for (const Trip& trip : load_trips(a.trips)) {
    Trip region_trip = project_trip(abs, trip);
    Assignment tau;
    try {
      tau = trip_to_assignment(abs.region_graph, region_trip);
    } catch (const ValidationError&) {
      ++rejected;  // too short or not simple: nothing satisfies it
      continue;
    }
    try {
      learn_assignment(d, tau);
    } catch (const RejectedInstanceError&) {
      ++rejected;
    }
  }
  finalize_params(d);
  serialize(d, a.out);
  if (!a.meta.empty()) {
    nlohmann::json meta{{"trained_instances", d.trained_instances()},
                        {"rejected_instances", rejected},
                        {"seed_history", nlohmann::json::array()}};
    std::ofstream out(a.meta);
    if (!out) throw ParseError("cannot write meta file: " + a.meta);
    out << meta.dump(2) << '\n';
  }
  std::cerr << "trained: " << d.trained_instances()
            << " rejected: " << rejected << '\n';
}

void run_sample(const SampleArgs& a, const std::string& method) {
  RouteModel m = load_model(a.graph, a.abstraction, a.diagram);
  std::vector<RouteQuery> queries = load_queries(a.queries);
  print_seed(a.seed);
  SampleConfig cfg;
  cfg.max_attempts = a.max_attempts;
  cfg.time_budget_seconds = a.time_budget;
  cfg.k_per_attempt = a.k_per_attempt;
  std::vector<RouteResult> results;
  results.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    cfg.seed = mix_seed(a.seed, i);
    try {
      results.push_back(run_method(m, method, queries[i], cfg));
    } catch (const UnsatisfiableConditionError& e) {
      std::cerr << "query " << i << ": " << e.what() << '\n';
      RouteResult failed;
      failed.method = method;
      results.push_back(std::move(failed));
    }
  }
  save_route_results(results, a.out, a.timing);
}

void run_eval(const EvalArgs& a) {
  RouteModel m = load_model(a.graph, a.abstraction, a.diagram);
  std::vector<Trip> tests = load_trips(a.tests);
  print_seed(a.seed);
  EvalConfig cfg;
  cfg.samples_per_instance = a.samples;
  cfg.epsilon = a.epsilon;
  cfg.workers = a.workers;
  cfg.seed = a.seed;
  cfg.sample.max_attempts = a.max_attempts;
  cfg.sample.time_budget_seconds = a.time_budget;
  MatchReport report = evaluate_suite(m, tests, a.methods, cfg);
  save_match_report(report, a.out, a.timing);
  std::cout << format_match_report(report);
}

void run_bench(const BenchArgs& a) {
  RouteModel m = load_model(a.graph, a.abstraction, a.diagram);
  std::vector<RouteQuery> queries = load_queries(a.queries);
  print_seed(a.seed);
  EvalConfig cfg;
  cfg.workers = a.workers;
  cfg.seed = a.seed;
  cfg.sample.max_attempts = a.max_attempts;
  cfg.sample.time_budget_seconds = a.time_budget;
  BenchReport report = benchmark_runtime(m, queries, a.methods, cfg);
  save_bench_report(report, a.out);
  std::cout << format_bench_report(report);
}

void run_validate(const std::string& diagram_path) {
  ProbDiagram d = deserialize(diagram_path);
  PropertyReport rep = validate(d);
  std::cout << "nodes: " << d.node_count() << '\n'
            << "variables: " << d.num_vars() << '\n';
  print_property("determinism", rep.determinism);
  print_property("decomposability", rep.decomposability);
  print_property("smoothness", rep.smoothness);
  if (!rep.all_pass()) {
    throw ValidationError("diagram failed validation");
  }
}

void run_count(const std::string& diagram_path) {
  std::cout << model_count(deserialize(diagram_path)) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"route sampling over compiled trip diagrams"};
  app.require_subcommand(1);

  GenGridArgs gg;
  auto* gen_grid =
      app.add_subcommand("gen-grid", "write a grid road graph as JSON");
  gen_grid->add_option("--width", gg.width, "grid columns")->required();
  gen_grid->add_option("--height", gg.height, "grid rows")->required();
  gen_grid->add_option("--spacing", gg.spacing, "edge length")
      ->capture_default_str();
  gen_grid->add_option("--out", gg.out, "output graph file")->required();
  gen_grid->callback([&] { run_gen_grid(gg); });

  AbstractArgs ab;
  auto* abstract_cmd = app.add_subcommand(
      "abstract", "partition a road graph into square cells");
  abstract_cmd->add_option("--graph", ab.graph, "road graph file")->required();
  abstract_cmd->add_option("--cell-size", ab.cell_size, "cell side length")
      ->required();
  abstract_cmd->add_option("--out", ab.out, "output abstraction file")
      ->required();
  abstract_cmd->callback([&] { run_abstract(ab); });

  GenTripsArgs gt;
  auto* gen_trips = app.add_subcommand(
      "gen-trips", "generate synthetic trips with region-level detours");
  gen_trips->add_option("--graph", gt.graph, "road graph file")->required();
  gen_trips->add_option("--abstraction", gt.abstraction, "abstraction file")
      ->required();
  gen_trips->add_option("--count", gt.count, "number of trips")->required();
  gen_trips->add_option("--seed", gt.seed, "random seed")
      ->capture_default_str();
  gen_trips->add_option("--out", gt.out, "output trips file (JSONL)")
      ->required();
  gen_trips->callback([&] { run_gen_trips(gt); });

  EncodeArgs en;
  auto* encode_cmd = app.add_subcommand(
      "encode", "emit the trip constraints of a graph as DIMACS CNF");
  auto* encode_src = encode_cmd->add_option_group("source");
  encode_src->add_option("--graph", en.graph, "encode this road graph");
  encode_src->add_option("--abstraction", en.abstraction,
                         "encode this abstraction's region graph");
  encode_src->require_option(1);
  encode_cmd->add_option("--out", en.out, "output CNF file")->required();
  encode_cmd->callback([&] { run_encode(en); });

  CompileArgs co;
  auto* compile_cmd = app.add_subcommand(
      "compile", "compile a CNF into a smoothed, validated diagram");
  compile_cmd->add_option("--cnf", co.cnf, "input DIMACS file")->required();
  compile_cmd->add_option("--out", co.out, "output diagram file")->required();
  compile_cmd->add_option("--order", co.order, "variable order")
      ->check(CLI::IsMember({"auto", "interleaved", "natural"}))
      ->capture_default_str();
  compile_cmd->add_option("--node-budget", co.node_budget, "max diagram nodes")
      ->capture_default_str();
  compile_cmd
      ->add_option("--timeout", co.timeout, "compile deadline in seconds")
      ->capture_default_str();
  compile_cmd->callback([&] { run_compile(co); });

  LearnArgs le;
  auto* learn_cmd = app.add_subcommand(
      "learn", "fit branch parameters from historical road trips");
  learn_cmd->add_option("--diagram", le.diagram, "compiled diagram file")
      ->required();
  learn_cmd->add_option("--abstraction", le.abstraction, "abstraction file")
      ->required();
  learn_cmd->add_option("--trips", le.trips, "training trips (JSONL)")
      ->required();
  learn_cmd->add_option("--out", le.out, "output diagram file")->required();
  learn_cmd->add_option("--meta", le.meta, "write training meta JSON here");
  learn_cmd->callback([&] { run_learn(le); });

  SampleArgs sa;
  auto* sample_cmd = app.add_subcommand(
      "sample", "answer queries by conditional sampling, one pass per draw");
  SampleArgs ss;
  auto* stepwise_cmd = app.add_subcommand(
      "sample-stepwise",
      "answer queries by stepwise marginal sampling (slow baseline)");
  for (auto [cmd, args] : {std::pair{sample_cmd, &sa}, {stepwise_cmd, &ss}}) {
    cmd->add_option("--graph", args->graph, "road graph file")->required();
    cmd->add_option("--abstraction", args->abstraction, "abstraction file")
        ->required();
    cmd->add_option("--diagram", args->diagram, "trained diagram file")
        ->required();
    cmd->add_option("--queries", args->queries, "query file (JSONL)")
        ->required();
    cmd->add_option("--out", args->out, "output results file (JSONL)")
        ->required();
    cmd->add_option("--seed", args->seed, "random seed")
        ->capture_default_str();
    cmd->add_option("--max-attempts", args->max_attempts,
                    "rejection attempts per query")
        ->capture_default_str();
    cmd->add_option("--time-budget", args->time_budget,
                    "seconds per query")
        ->capture_default_str();
    cmd->add_option("--k", args->k_per_attempt, "draws per attempt")
        ->capture_default_str();
    cmd->add_flag("--timing", args->timing,
                  "include elapsed_ms in the output (not reproducible)");
  }
  sample_cmd->callback([&] { run_sample(sa, "single-pass"); });
  stepwise_cmd->callback([&] { run_sample(ss, "stepwise"); });

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand(
      "eval", "score methods on test trips by epsilon-match rate");
  eval_cmd->add_option("--graph", ev.graph, "road graph file")->required();
  eval_cmd->add_option("--abstraction", ev.abstraction, "abstraction file")
      ->required();
  eval_cmd->add_option("--diagram", ev.diagram, "trained diagram file")
      ->required();
  eval_cmd->add_option("--tests", ev.tests, "test trips (JSONL)")->required();
  eval_cmd->add_option("--out", ev.out, "output report JSON")->required();
  eval_cmd->add_option("--methods", ev.methods, "methods to evaluate")
      ->delimiter(',')
      ->capture_default_str();
  eval_cmd->add_option("--samples", ev.samples, "draws per instance")
      ->capture_default_str();
  eval_cmd
      ->add_option("--epsilon", ev.epsilon,
                   "match radius (negative: median edge length)")
      ->capture_default_str();
  eval_cmd->add_option("--workers", ev.workers, "worker threads")
      ->capture_default_str();
  eval_cmd->add_option("--seed", ev.seed, "random seed")
      ->capture_default_str();
  eval_cmd
      ->add_option("--max-attempts", ev.max_attempts,
                   "rejection attempts per draw")
      ->capture_default_str();
  eval_cmd->add_option("--time-budget", ev.time_budget, "seconds per draw")
      ->capture_default_str();
  eval_cmd->add_flag("--timing", ev.timing,
                     "include timing in the report (not reproducible)");
  eval_cmd->callback([&] { run_eval(ev); });

  BenchArgs be;
  auto* bench_cmd = app.add_subcommand(
      "bench", "compare per-query wall-clock against the shortest-path "
               "baseline");
  bench_cmd->add_option("--graph", be.graph, "road graph file")->required();
  bench_cmd->add_option("--abstraction", be.abstraction, "abstraction file")
      ->required();
  bench_cmd->add_option("--diagram", be.diagram, "trained diagram file")
      ->required();
  bench_cmd->add_option("--queries", be.queries, "query file (JSONL)")
      ->required();
  bench_cmd->add_option("--out", be.out, "output report JSON")->required();
  bench_cmd->add_option("--methods", be.methods, "methods to time")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--workers", be.workers, "worker threads")
      ->capture_default_str();
  bench_cmd->add_option("--seed", be.seed, "random seed")
      ->capture_default_str();
  bench_cmd
      ->add_option("--max-attempts", be.max_attempts,
                   "rejection attempts per query")
      ->capture_default_str();
  bench_cmd->add_option("--time-budget", be.time_budget, "seconds per query")
      ->capture_default_str();
  bench_cmd->callback([&] { run_bench(be); });

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand(
      "validate", "check the structural properties of a diagram file");
  validate_cmd->add_option("--diagram", validate_path, "diagram file")
      ->required();
  validate_cmd->callback([&] { run_validate(validate_path); });

  std::string count_path;
  auto* count_cmd = app.add_subcommand(
      "count", "print the number of satisfying assignments of a diagram");
  count_cmd->add_option("--diagram", count_path, "diagram file")->required();
  count_cmd->callback([&] { run_count(count_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
