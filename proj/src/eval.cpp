#include "ddroute/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "ddroute/error.hpp"
#include "ddroute/inference.hpp"
#include "ddroute/rng.hpp"

namespace ddroute {

namespace {

double nearest_rank(const std::vector<double>& sorted, double pct) {
  auto rank = static_cast<std::size_t>(
      std::ceil(pct / 100.0 * static_cast<double>(sorted.size())));
  if (rank < 1) rank = 1;
  return sorted[rank - 1];
}

// Runs fn(0..count-1) on up to `workers` threads. Work items must be
// independent; the first exception wins and is rethrown after the join.
void parallel_for(int count, int workers,
                  const std::function<void(int)>& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void require_known_methods(const std::vector<std::string>& methods) {
  if (methods.empty()) throw ValidationError("no methods to evaluate");
  for (const std::string& name : methods) {
    if (name != "shortest" && name != "single-pass" && name != "stepwise") {
      throw ValidationError("unknown method '" + name +
                            "' (expected shortest, single-pass, or stepwise)");
    }
  }
}

}  // namespace

MatchScore match_score(const RoadGraph& g, const Trip& ground,
                       const Trip& proposed, double epsilon) {
  if (ground.empty()) throw ValidationError("ground trip is empty");
  if (epsilon < 0.0) throw ValidationError("epsilon must be nonnegative");
  MatchScore score;
  if (proposed.empty()) {
    score.proposed_empty = true;
    return score;
  }
  std::vector<int> ground_set = ground.vertices;
  std::sort(ground_set.begin(), ground_set.end());
  ground_set.erase(std::unique(ground_set.begin(), ground_set.end()),
                   ground_set.end());
  int close = 0;
  for (int u : ground_set) {
    const Vertex& a = g.vertex(u);
    double best = std::numeric_limits<double>::infinity();
    for (int v : proposed.vertices) {
      best = std::min(best, euclidean_distance(a, g.vertex(v)));
    }
    if (best <= epsilon) ++close;
  }
  score.rate = static_cast<double>(close) / static_cast<double>(ground_set.size());
  return score;
}

double match_rate(const RoadGraph& g, const Trip& ground, const Trip& proposed,
                  double epsilon) {
  return match_score(g, ground, proposed, epsilon).rate;
}

SummaryStats summarize(std::vector<double> values) {
  SummaryStats s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.p25 = nearest_rank(values, 25.0);
  s.p50 = nearest_rank(values, 50.0);
  s.p75 = nearest_rank(values, 75.0);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

RouteResult run_method(const RouteModel& m, const std::string& method,
                       const RouteQuery& q, const SampleConfig& cfg) {
  if (method == "shortest") return baseline_shortest(m, q);
  if (method == "single-pass") return sample_route(m, q, cfg);
  if (method == "stepwise") return stepwise_sample_route(m, q, cfg);
  throw ValidationError("unknown method '" + method +
                        "' (expected shortest, single-pass, or stepwise)");
}

MatchReport evaluate_suite(const RouteModel& m, const std::vector<Trip>& tests,
                           const std::vector<std::string>& methods,
                           const EvalConfig& cfg) {
  require_known_methods(methods);
  if (cfg.samples_per_instance < 1) {
    throw ValidationError("samples_per_instance must be positive");
  }
  for (const Trip& t : tests) {
    if (t.size() < 2) {
      throw ValidationError("test trips need at least two vertices");
    }
  }
  const double eps =
      cfg.epsilon >= 0.0 ? cfg.epsilon : median_edge_length(m.road);

  MatchReport report;
  report.epsilon = eps;
  report.samples_per_instance = cfg.samples_per_instance;
  report.instance_count = static_cast<int>(tests.size());
  report.methods.resize(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    report.methods[mi].method = methods[mi];
    report.methods[mi].instances.resize(tests.size());
  }

  parallel_for(static_cast<int>(tests.size()), cfg.workers, [&](int i) {
    const Trip& ground = tests[static_cast<std::size_t>(i)];
    RouteQuery q{ground.front(), ground.back()};
    uint64_t instance_seed = mix_seed(cfg.seed, static_cast<uint64_t>(i));
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      InstanceResult r;
      r.query = q;
      uint64_t method_seed = mix_seed(instance_seed, mi);
      int draws =
          methods[mi] == "shortest" ? 1 : cfg.samples_per_instance;
      std::vector<double> eps_rates;
      std::vector<double> exact_rates;
      for (int j = 0; j < draws; ++j) {
        SampleConfig sc = cfg.sample;
        sc.seed = mix_seed(method_seed, static_cast<uint64_t>(j));
        RouteResult res;
        try {
          res = run_method(m, methods[mi], q, sc);
        } catch (const UnsatisfiableConditionError&) {
          break;  // every draw would fail the same way
        }
        ++r.draws;
        r.total_ms += res.elapsed_ms;
        if (res.success) {
          ++r.successes;
          eps_rates.push_back(match_rate(m.road, ground, res.trip, eps));
          exact_rates.push_back(match_rate(m.road, ground, res.trip, 0.0));
        }
      }
      r.completed = !eps_rates.empty();
      if (r.completed) {
        r.epsilon_match = summarize(eps_rates).p50;
        r.exact_match = summarize(exact_rates).p50;
      }
      report.methods[mi].instances[static_cast<std::size_t>(i)] = r;
    }
  });

  std::vector<bool> in_intersection(tests.size(), true);
  for (const MethodReport& mr : report.methods) {
    for (std::size_t i = 0; i < tests.size(); ++i) {
      if (!mr.instances[i].completed) in_intersection[i] = false;
    }
  }
  report.intersection_completed = static_cast<int>(
      std::count(in_intersection.begin(), in_intersection.end(), true));

  for (MethodReport& mr : report.methods) {
    std::vector<double> eps_all, exact_all, ms_all, eps_both, exact_both;
    for (std::size_t i = 0; i < mr.instances.size(); ++i) {
      const InstanceResult& r = mr.instances[i];
      if (!r.completed) continue;
      ++mr.completed_count;
      eps_all.push_back(r.epsilon_match);
      exact_all.push_back(r.exact_match);
      ms_all.push_back(r.total_ms);
      if (in_intersection[i]) {
        eps_both.push_back(r.epsilon_match);
        exact_both.push_back(r.exact_match);
      }
    }
    mr.epsilon_match = summarize(std::move(eps_all));
    mr.exact_match = summarize(std::move(exact_all));
    mr.time_ms = summarize(std::move(ms_all));
    mr.epsilon_match_intersection = summarize(std::move(eps_both));
    mr.exact_match_intersection = summarize(std::move(exact_both));
  }
  return report;
}

BenchReport benchmark_runtime(const RouteModel& m,
                              const std::vector<RouteQuery>& queries,
                              const std::vector<std::string>& methods,
                              const EvalConfig& cfg) {
  require_known_methods(methods);
  BenchReport report;
  report.query_count = static_cast<int>(queries.size());
  report.methods.resize(methods.size());
  std::vector<double> base_ms(queries.size(), 0.0);
  std::vector<bool> base_ok(queries.size(), false);
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    report.methods[mi].method = methods[mi];
    report.methods[mi].per_query_ms.resize(queries.size(), 0.0);
    report.methods[mi].completed_flags.resize(queries.size(), false);
  }

  parallel_for(static_cast<int>(queries.size()), cfg.workers, [&](int i) {
    const RouteQuery& q = queries[static_cast<std::size_t>(i)];
    uint64_t instance_seed = mix_seed(cfg.seed, static_cast<uint64_t>(i));
    RouteResult base = baseline_shortest(m, q);
    base_ms[static_cast<std::size_t>(i)] = base.elapsed_ms;
    base_ok[static_cast<std::size_t>(i)] = base.success;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      RouteResult res;
      if (methods[mi] == "shortest") {
        res = base;  // reuse, so shortest/shortest ratios are exactly 1
      } else {
        SampleConfig sc = cfg.sample;
        sc.seed = mix_seed(instance_seed, mi);
        try {
          res = run_method(m, methods[mi], q, sc);
        } catch (const UnsatisfiableConditionError&) {
          res.success = false;
        }
      }
      report.methods[mi].per_query_ms[static_cast<std::size_t>(i)] =
          res.elapsed_ms;
      report.methods[mi].completed_flags[static_cast<std::size_t>(i)] =
          res.success;
    }
  });

  for (BenchMethodReport& mr : report.methods) {
    std::vector<double> ms, ratios;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (!mr.completed_flags[i]) {
        ++mr.timeouts;
        continue;
      }
      ms.push_back(mr.per_query_ms[i]);
      if (base_ok[i] && base_ms[i] > 0.0) {
        ratios.push_back(mr.per_query_ms[i] / base_ms[i]);
      }
    }
    mr.time_ms = summarize(std::move(ms));
    mr.ratio = summarize(std::move(ratios));
  }
  return report;
}

double distribution_check(const ProbDiagram& d, const Assignment& condition,
                          int num_samples, uint64_t seed) {
  const int n = d.num_vars();
  if (n > 20) {
    throw ResourceLimitError(
        "distribution check enumerates every assignment; refuses beyond 20 "
        "variables");
  }
  if (condition.num_vars() != n) {
    throw ValidationError("condition is over a different variable count");
  }
  if (num_samples < 1) throw ValidationError("need at least one sample");

  std::unordered_map<uint32_t, std::size_t> index;
  std::vector<double> exact;
  const uint32_t limit = 1u << n;
  for (uint32_t bits = 0; bits < limit; ++bits) {
    Assignment a(n);
    bool consistent = true;
    for (int v = 1; v <= n; ++v) {
      bool value = (bits >> (n - v)) & 1u;
      if (condition.is_bound(v) && condition.value(v) != value) {
        consistent = false;
        break;
      }
      a.bind(v, value);
    }
    if (!consistent || !accepts(d, a)) continue;
    index.emplace(bits, exact.size());
    exact.push_back(probability_of(d, a));
  }
  if (exact.empty()) {
    throw UnsatisfiableConditionError(
        "condition admits no accepted assignment");
  }
  double total = 0.0;
  for (double w : exact) total += w;
  if (total <= 0.0) {
    throw UnsatisfiableConditionError("condition carries zero mass");
  }
  for (double& w : exact) w /= total;

  std::vector<double> freq(exact.size(), 0.0);
  const double unit = 1.0 / static_cast<double>(num_samples);
  for (const Assignment& s :
       sample_assignments(d, condition, num_samples, seed)) {
    uint32_t bits = 0;
    for (int v = 1; v <= n; ++v) {
      bits = (bits << 1) | (s.value(v) ? 1u : 0u);
    }
    auto it = index.find(bits);
    if (it == index.end()) {
      throw ValidationError("a sample fell outside the enumerated support");
    }
    freq[it->second] += unit;
  }

  double tv = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    tv += std::abs(exact[i] - freq[i]);
  }
  return tv / 2.0;
}

}  // namespace ddroute
