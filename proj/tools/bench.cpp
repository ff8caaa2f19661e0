// Benchmark driver: compares the serial and OpenMP pair-evaluation kernels
// of the reference monitor, and the constraint monitor with its
// optimizations toggled, on generated workloads.

#include <chrono>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypermon/monitor.hpp"
#include "hypermon/semantics.hpp"

using namespace hypermon;

namespace {

double time_ms(const std::function<void()>& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

// Echo-system traces (out mirrors in): pairwise consistent with the default
// determinism specification, so every monitor processes the whole workload.
// With --violate the last trace breaks the pattern.
std::vector<trace> make_traces(size_t count, size_t len, size_t distinct,
                               uint64_t seed, bool violate) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<trace> pool;
  for (size_t i = 0; i < distinct; ++i) {
    trace t;
    for (size_t k = 0; k < len; ++k) {
      std::vector<std::string> ps;
      if (bit(rng)) {
        ps.push_back("in");
        ps.push_back("out");
      }
      t.events.push_back(event(std::move(ps)));
    }
    pool.push_back(std::move(t));
  }
  std::vector<trace> out;
  std::uniform_int_distribution<size_t> pick(0, distinct - 1);
  for (size_t i = 0; i < count; ++i) out.push_back(pool[pick(rng)]);
  if (violate && !out.empty() && len > 0)
    out.back().events[len / 2] = event{"out"};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypermon-bench: kernel and monitor timings"};
  size_t count = 48, len = 16, distinct = 0;
  uint64_t seed = 42;
  bool violate = false;
  std::string spec_text =
      "forall p1,p2. G((out_p1 <-> out_p2) W !(in_p1 <-> in_p2))";
  app.add_option("--traces", count, "number of traces");
  app.add_option("--len", len, "events per trace");
  app.add_option("--distinct", distinct,
                 "distinct traces in the pool (default: all distinct)");
  app.add_option("--seed", seed, "generator seed");
  app.add_flag("--violate", violate, "plant a violation in the last trace");
  app.add_option("--spec", spec_text, "specification text");
  CLI11_PARSE(app, argc, argv);
  if (distinct == 0) distinct = count;

  formula_store fs;
  spec s = parse_spec(fs, spec_text);
  formula core = to_nnf(fs, desugar(fs, s.body));
  std::vector<trace> traces = make_traces(count, len, distinct, seed, violate);

  std::cout << "workload: " << count << " traces x " << len << " events, "
            << distinct << " distinct\n";
  std::cout << "spec: " << print_spec(fs, s) << "\n\n";

  verdict vs, vp;
  double serial = time_ms([&] { vs = oracle_monitor_serial(fs, core, traces); });
  double parallel =
      time_ms([&] { vp = oracle_monitor_parallel(fs, core, traces); });
  std::cout << "pair evaluation (serial):   " << serial << " ms, "
            << (vs.violation ? "violation" : "no violation") << "\n";
  std::cout << "pair evaluation (parallel): " << parallel << " ms, "
            << (vp.violation ? "violation" : "no violation");
  if (parallel > 0.0) std::cout << "  [x" << serial / parallel << "]";
  std::cout << "\n\n";
  if (vs.violation != vp.violation) {
    std::cerr << "error: kernel verdicts disagree\n";
    return 1;
  }

  struct row {
    const char* name;
    monitor_config cfg;
  };
  std::vector<row> rows{
      {"monitor (tree + splitting)", {true, true, {}}},
      {"monitor (tree only)       ", {true, false, {}}},
      {"monitor (flat store)      ", {false, false, {}}},
  };
  for (const row& r : rows) {
    std::pair<verdict, monitor_stats> res;
    double ms =
        time_ms([&] { res = monitor_offline(fs, s, traces, r.cfg); });
    std::cout << r.name << ": " << ms << " ms, "
              << (res.first.violation ? "violation" : "no violation")
              << ", sat_calls=" << res.second.sat_calls
              << ", skipped=" << res.second.sat_calls_skipped
              << ", vars=" << res.second.variables_created
              << ", clauses=" << res.second.clauses_created << "\n";
    if (res.first.violation != vs.violation) {
      std::cerr << "error: monitor and kernel verdicts disagree\n";
      return 1;
    }
  }
  return 0;
}
