#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hypermon/cnf.hpp"
#include "hypermon/constraint.hpp"
#include "hypermon/formula.hpp"
#include "hypermon/sat.hpp"
#include "hypermon/trace.hpp"
#include "hypermon/verdict.hpp"

namespace hypermon {

struct monitor_config {
  bool node_tree = true;
  bool conjunct_splitting = true;          // requires node_tree
  std::vector<std::string> extra_alphabet;  // joined with the body's props
};

struct monitor_stats {
  uint64_t sat_calls = 0;
  uint64_t sat_calls_skipped = 0;
  uint64_t variables_created = 0;  // placeholder instances minted
  uint64_t clauses_created = 0;    // persistent CNF clauses
  uint64_t tree_nodes_created = 0;
  uint64_t tree_hits = 0;
};

/// Online monitoring session: traces stream in one event at a time, every
/// step rewrites the open obligations against the event, asserts the
/// resulting definitions into an incrementally grown propositional system
/// and checks satisfiability together with the position-indexed encoding of
/// the current trace. Finished traces leave their constraints in the system
/// permanently, so each new trace is checked against everything seen
/// before; the verdict transition is one-way.
///
/// With the node tree enabled, traces with identical rewrite histories
/// share constraints and variables; repeating a known trace creates
/// nothing and skips the satisfiability checks it cannot change. Conjunct
/// splitting deduplicates shared parts of diverging rewrite results.
class monitor_session {
public:
  monitor_session(formula_store& fs, const spec& s, monitor_config cfg = {});

  void begin_trace();
  verdict feed_event(const event& e);
  verdict end_trace();
  std::pair<verdict, monitor_stats> finish();

  verdict current() const { return verdict_; }
  const monitor_stats& stats() const { return stats_; }
  const alphabet& ap() const { return ap_; }
  formula transformed_body() const { return psi_; }
  bool trace_open() const { return open_; }

  /// DIMACS dump of the accumulated persistent system.
  void write_dimacs(std::ostream& out) const;

private:
  struct tree_edge {
    uint32_t child = 0;
    std::vector<uint32_t> bindings;  // creator's child instances
  };
  struct vec_hash {
    size_t operator()(const std::vector<cref>& v) const {
      uint64_t h = 0x2545f4914f6cdd1dull;
      for (cref c : v) h = (h ^ c) * 0x100000001b3ull;
      return static_cast<size_t>(h);
    }
  };
  struct tree_node {
    std::vector<std::pair<polarity, formula>> obligations;
    std::vector<uint32_t> bindings;  // canonical instances of this node
    std::unordered_map<std::vector<cref>, tree_edge, vec_hash> children;
    std::unordered_set<uint64_t> sat_hashes;      // enc prefixes known SAT
    std::unordered_set<uint64_t> end_sat_hashes;  // SAT after closure here
  };
  struct step_record {
    uint32_t lhs = 0;
    cref body = k_true;
    std::vector<uint32_t> opens;
  };

  uint32_t mint_instance(polarity pol, formula f, uint32_t position,
                         uint32_t scope, bool forced);
  bool assert_definition(uint32_t inst, cref body);  // true if anything new
  void assert_persistent(cref c);
  void assert_unit_persistent(uint32_t inst, bool neg);
  void push_clauses(const std::vector<cnf_clause>& clauses, bool persistent);
  void recontextualize(std::unordered_map<uint32_t, uint32_t>& fix);
  void sync_solver_vars();
  void close_current_trace();

  formula_store& fs_;
  monitor_config cfg_;
  formula psi_{};
  alphabet ap_;
  std::vector<uint32_t> ap_props_;  // interned prop ids aligned with ap_
  constraint_store cs_;
  cnf_encoder enc_;
  std::vector<cnf_clause> committed_;
  std::vector<cnf_clause> trace_stash_;  // flat mode: committed at trace end
  std::unique_ptr<sat::solver> solver_;
  std::unordered_set<uint64_t> def_registry_;

  std::vector<tree_node> nodes_;
  uint32_t next_scope_ = 2;
  uint32_t flat_scope_ = 0;
  placeholder_resolver canon_resolver_ = canonical_resolver(cs_);

  verdict verdict_;
  monitor_stats stats_;
  bool open_ = false;
  size_t trace_index_ = 0;
  uint32_t position_ = 0;
  uint32_t cur_node_ = 0;
  uint64_t enc_hash_ = 0;
  size_t prop_tier_synced_ = 0;
  bool step_added_constraints_ = false;
  std::vector<std::pair<polarity, formula>> frontier_obl_;  // flat mode
  std::vector<uint32_t> frontier_inst_;
  std::vector<std::vector<step_record>> steps_;
  uint32_t root_inst_ = 0;
};

/// Drives a session over the traces in order, stopping at the first
/// violation.
std::pair<verdict, monitor_stats> monitor_offline(formula_store& fs,
                                                  const spec& s,
                                                  std::span<const trace> traces,
                                                  monitor_config cfg = {});

}  // namespace hypermon
