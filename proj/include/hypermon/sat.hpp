#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace hypermon::sat {

using var = int32_t;

struct lit {
  int32_t x = -1;

  static lit make(var v, bool negated = false) {
    return lit{v * 2 + (negated ? 1 : 0)};
  }
  var variable() const { return x >> 1; }
  bool negated() const { return x & 1; }
  lit operator~() const { return lit{x ^ 1}; }
  friend bool operator==(lit, lit) = default;
};

enum class status : uint8_t { sat, unsat };

/// Conflict-driven clause-learning solver over permanent clauses.
///
/// Clauses may be added at any point, including between solve() calls while
/// a partial assignment is still in place; the solver backtracks only as
/// far as the new clause requires, so repeated solving of a growing system
/// reuses earlier search work. UNSAT is sticky. All heuristics are
/// deterministic: the same call sequence produces the same result and,
/// when satisfiable, the same model.
class solver {
public:
  var new_var();
  void ensure_vars(int count);
  int num_vars() const { return static_cast<int>(assign_.size()); }

  /// Variables in higher tiers are decided later. Useful for variables that
  /// are almost always implied (e.g. externally asserted units), keeping
  /// backtracks over them shallow.
  void set_decision_tier(var v, uint8_t tier);

  /// Initial decision phase (later overridden by phase saving).
  void set_default_phase(var v, bool value);

  void add_clause(std::span<const lit> lits);
  void add_clause(std::initializer_list<lit> lits) {
    add_clause(std::span<const lit>(lits.begin(), lits.size()));
  }

  status solve();

  bool model_value(var v) const { return model_[static_cast<size_t>(v)] == 1; }
  bool unsat_locked() const { return unsat_; }

  uint64_t num_clauses() const { return clauses_.size(); }
  uint64_t conflicts() const { return conflicts_; }
  uint64_t decisions() const { return decisions_; }

private:
  struct clause {
    std::vector<lit> lits;
  };

  int value(lit l) const {  // 1 true, 0 false, -1 unassigned
    int8_t a = assign_[static_cast<size_t>(l.variable())];
    if (a < 0) return -1;
    return (a == 1) != l.negated() ? 1 : 0;
  }
  int value(var v) const { return assign_[static_cast<size_t>(v)]; }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  void unchecked_enqueue(lit l, int32_t reason);
  void cancel_until(int level);
  int32_t propagate();  // conflicting clause index or -1
  void analyze(int32_t confl, std::vector<lit>& learnt, int& backjump);
  bool attach_pending(uint32_t ci);
  bool ensure_units();
  void attach_watches(uint32_t ci);
  void bump(var v);
  void decay();

  // heap of variables ordered by activity (ties: smaller index first)
  void heap_insert(var v);
  var heap_pop();
  void heap_sift_up(int i);
  void heap_sift_down(int i);
  bool heap_less(var a, var b) const;

  std::vector<clause> clauses_;
  std::vector<std::vector<int32_t>> watches_;  // indexed by lit.x
  std::vector<int8_t> assign_;
  std::vector<int8_t> phase_;
  std::vector<uint8_t> tier_;
  std::vector<int32_t> level_;
  std::vector<int32_t> reason_;
  std::vector<double> activity_;
  std::vector<lit> trail_;
  std::vector<int32_t> trail_lim_;
  std::vector<int32_t> units_;    // indices of unit clauses
  std::vector<int32_t> pending_;  // clauses added since last attach
  std::vector<int8_t> model_;
  std::vector<int32_t> heap_;
  std::vector<int32_t> heap_pos_;
  std::vector<int8_t> seen_;
  size_t qhead_ = 0;
  double var_inc_ = 1.0;
  bool unsat_ = false;
  uint64_t conflicts_ = 0;
  uint64_t decisions_ = 0;
};

}  // namespace hypermon::sat
