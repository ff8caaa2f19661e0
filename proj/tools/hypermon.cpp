// Command-line front end: formula and trace ingestion, offline and
// streamed monitoring, reference-monitor cross checks, DIMACS export.
//
// Exit codes: 0 no violation, 1 violation, 2 usage or input error,
// 3 disagreement between the constraint monitor and the reference monitor.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypermon/monitor.hpp"
#include "hypermon/semantics.hpp"

using namespace hypermon;

namespace {

struct options {
  std::string formula_path;
  std::vector<std::string> trace_paths;
  bool online = false;
  bool oracle = false;
  bool check = false;
  bool no_tree = false;
  bool no_split = false;
  bool stats = false;
  std::string dump_cnf;
  std::string alphabet_csv;
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  size_t start = 0;
  while (!csv.empty() && start <= csv.size()) {
    size_t comma = csv.find(',', start);
    std::string item = comma == std::string::npos
                           ? csv.substr(start)
                           : csv.substr(start, comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void warn_unknown(const std::string& prop, std::vector<std::string>& warned) {
  if (std::find(warned.begin(), warned.end(), prop) != warned.end()) return;
  warned.push_back(prop);
  std::cerr << "warning: proposition '" << prop
            << "' is outside the monitored alphabet and is ignored\n";
}

void print_report(const verdict& v, const std::vector<std::string>& names,
                  const monitor_stats& st, bool want_stats) {
  if (v.violation)
    std::cout << "VERDICT: VIOLATION trace=" << names[v.trace_index]
              << " event=" << v.event_index << "\n";
  else
    std::cout << "VERDICT: NO_VIOLATION\n";
  if (want_stats) {
    std::cout << "STATS: sat_calls=" << st.sat_calls << "\n"
              << "STATS: sat_calls_skipped=" << st.sat_calls_skipped << "\n"
              << "STATS: variables_created=" << st.variables_created << "\n"
              << "STATS: clauses_created=" << st.clauses_created << "\n"
              << "STATS: tree_nodes_created=" << st.tree_nodes_created << "\n"
              << "STATS: tree_hits=" << st.tree_hits << "\n";
  }
}

int run_online(formula_store& fs, const spec& s, const options& opt,
               monitor_config cfg) {
  monitor_session session(fs, s, std::move(cfg));
  std::vector<std::string> names;
  std::vector<std::string> warned;
  std::vector<trace> seen;  // for --oracle / --check
  std::string line;
  size_t events_in_trace = 0;

  while (std::getline(std::cin, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line == "--") {
      if (!session.trace_open()) {
        std::cerr << "error: trace terminator without a trace\n";
        return 2;
      }
      session.end_trace();
      if (!opt.oracle && session.current().violation) break;
      continue;
    }
    event e;
    try {
      if (!parse_event_line(line, e)) continue;
    } catch (const parse_error& pe) {
      std::cerr << "stdin: " << pe.what() << "\n";
      return 2;
    }
    for (const std::string& p : e.props)
      if (!session.ap().contains(p)) warn_unknown(p, warned);
    if (!session.trace_open()) {
      session.begin_trace();
      names.push_back("t" + std::to_string(names.size() + 1));
      seen.emplace_back();
      events_in_trace = 0;
    }
    seen.back().events.push_back(e);
    verdict v = session.feed_event(e);
    ++events_in_trace;
    if (!opt.oracle && v.violation) break;
    if (opt.stats && !v.violation)
      std::cout << "PROGRESS: trace=" << names.back()
                << " event=" << (events_in_trace - 1) << " status=ok\n";
  }
  if (session.trace_open()) session.end_trace();
  auto [v, st] = session.finish();
  if (names.empty()) {
    std::cerr << "error: no traces on the input stream\n";
    return 2;
  }
  formula core = to_nnf(fs, desugar(fs, s.body));
  if (opt.oracle) {
    verdict ref = oracle_monitor(fs, core, seen);
    print_report(ref, names, monitor_stats{}, opt.stats);
    return ref.violation ? 1 : 0;
  }
  if (opt.check) {
    // the session stops at the first violation, so compare against the
    // traces it actually observed
    verdict ref = oracle_monitor(fs, core, seen);
    if (ref.violation != v.violation) {
      std::cerr << "error: constraint monitor and reference monitor disagree "
                   "(monitor="
                << (v.violation ? "violation" : "no violation")
                << ", reference="
                << (ref.violation ? "violation" : "no violation") << ")\n";
      return 3;
    }
  }
  print_report(v, names, st, opt.stats);
  if (!opt.dump_cnf.empty()) {
    std::ofstream out(opt.dump_cnf, std::ios::binary);
    session.write_dimacs(out);
  }
  return v.violation ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hypermon: constraint-based monitor for two-trace hyperproperties"};
  options opt;
  app.add_option("-f,--formula", opt.formula_path,
                 "specification file (required)")
      ->required();
  app.add_option("-t,--trace", opt.trace_paths,
                 "trace file; repeatable, traces are named t1, t2, ... in "
                 "order");
  app.add_flag("--online", opt.online,
               "read events from stdin, one per line; '--' ends a trace");
  app.add_flag("--oracle", opt.oracle,
               "run the brute-force reference monitor instead");
  app.add_flag("--check", opt.check,
               "run both monitors and fail on disagreement");
  app.add_flag("--no-tree", opt.no_tree, "disable the node-tree store");
  app.add_flag("--no-split", opt.no_split, "disable conjunct splitting");
  app.add_flag("--stats", opt.stats, "print counters after the verdict");
  app.add_option("--dump-cnf", opt.dump_cnf,
                 "write the accumulated system as DIMACS CNF");
  app.add_option("--alphabet", opt.alphabet_csv,
                 "extra propositions to encode, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (opt.online == !opt.trace_paths.empty()) {
    std::cerr << "error: provide either --trace files or --online\n";
    return 2;
  }
  if (opt.oracle && opt.check) {
    std::cerr << "error: --oracle and --check are mutually exclusive\n";
    return 2;
  }
  if (opt.oracle && !opt.dump_cnf.empty()) {
    std::cerr << "error: --dump-cnf requires the constraint monitor\n";
    return 2;
  }

  auto text = read_file(opt.formula_path);
  if (!text) {
    std::cerr << "error: cannot read formula file '" << opt.formula_path
              << "'\n";
    return 2;
  }

  formula_store fs;
  spec s;
  try {
    s = parse_spec(fs, *text);
  } catch (const parse_error& e) {
    std::cerr << opt.formula_path << ":" << e.position << ": " << e.what()
              << "\n";
    return 2;
  }

  monitor_config cfg;
  cfg.node_tree = !opt.no_tree;
  cfg.conjunct_splitting = cfg.node_tree && !opt.no_split;
  cfg.extra_alphabet = split_csv(opt.alphabet_csv);

  if (opt.online) return run_online(fs, s, opt, std::move(cfg));

  std::vector<trace> traces;
  std::vector<std::string> names;
  for (const std::string& path : opt.trace_paths) {
    auto content = read_file(path);
    if (!content) {
      std::cerr << "error: cannot read trace file '" << path << "'\n";
      return 2;
    }
    try {
      for (trace& t : parse_traces(*content)) {
        traces.push_back(std::move(t));
        names.push_back("t" + std::to_string(names.size() + 1));
      }
    } catch (const parse_error& e) {
      std::cerr << path << ": " << e.what() << "\n";
      return 2;
    }
  }

  formula core = to_nnf(fs, desugar(fs, s.body));

  if (opt.oracle) {
    std::vector<std::string> ns = s.alphabet;
    ns.insert(ns.end(), cfg.extra_alphabet.begin(), cfg.extra_alphabet.end());
    alphabet ap = alphabet::from(std::move(ns));
    std::vector<std::string> warned;
    for (const trace& t : traces)
      for (const event& e : t.events)
        for (const std::string& p : e.props)
          if (!ap.contains(p)) warn_unknown(p, warned);
    verdict v = oracle_monitor(fs, core, traces);
    print_report(v, names, monitor_stats{}, opt.stats);
    return v.violation ? 1 : 0;
  }

  monitor_session session(fs, s, cfg);
  {
    std::vector<std::string> warned;
    for (const trace& t : traces)
      for (const event& e : t.events)
        for (const std::string& p : e.props)
          if (!session.ap().contains(p)) warn_unknown(p, warned);
  }
  for (const trace& t : traces) {
    session.begin_trace();
    for (const event& e : t.events)
      if (session.feed_event(e).violation) break;
    session.end_trace();
    if (session.current().violation) break;
  }
  auto [v, st] = session.finish();

  if (opt.check) {
    verdict ref = oracle_monitor(fs, core, traces);
    if (ref.violation != v.violation) {
      std::cerr << "error: constraint monitor and reference monitor disagree "
                   "(monitor="
                << (v.violation ? "violation" : "no violation")
                << ", reference="
                << (ref.violation ? "violation" : "no violation") << ")\n";
      return 3;
    }
  }

  print_report(v, names, st, opt.stats);
  if (!opt.dump_cnf.empty()) {
    std::ofstream out(opt.dump_cnf, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << opt.dump_cnf << "'\n";
      return 2;
    }
    session.write_dimacs(out);
  }
  return v.violation ? 1 : 0;
}
