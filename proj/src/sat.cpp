#include "hypermon/sat.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace hypermon::sat {

var solver::new_var() {
  var v = static_cast<var>(assign_.size());
  assign_.push_back(-1);
  phase_.push_back(0);
  tier_.push_back(0);
  level_.push_back(0);
  reason_.push_back(-1);
  activity_.push_back(0.0);
  seen_.push_back(0);
  model_.push_back(0);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

void solver::ensure_vars(int count) {
  while (num_vars() < count) new_var();
}

void solver::set_default_phase(var v, bool value) {
  if (assign_[static_cast<size_t>(v)] == -1)
    phase_[static_cast<size_t>(v)] = value ? 1 : 0;
}

void solver::set_decision_tier(var v, uint8_t tier) {
  size_t i = static_cast<size_t>(v);
  if (tier_[i] == tier) return;
  tier_[i] = tier;
  if (heap_pos_[i] >= 0) {
    heap_sift_up(heap_pos_[i]);
    heap_sift_down(heap_pos_[i]);
  }
}

void solver::add_clause(std::span<const lit> lits) {
  if (unsat_) return;
  std::vector<lit> c(lits.begin(), lits.end());
  std::sort(c.begin(), c.end(), [](lit a, lit b) { return a.x < b.x; });
  c.erase(std::unique(c.begin(), c.end()), c.end());
  // Tautology and level-0 simplification.
  std::vector<lit> out;
  out.reserve(c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    if (i + 1 < c.size() && c[i + 1] == ~c[i]) return;  // l and ~l
    int v = value(c[i]);
    if (v == 1 && level_[static_cast<size_t>(c[i].variable())] == 0)
      return;  // permanently satisfied
    if (v == 0 && level_[static_cast<size_t>(c[i].variable())] == 0)
      continue;  // permanently false literal
    out.push_back(c[i]);
  }
  if (out.empty()) {
    unsat_ = true;
    return;
  }
  int32_t ci = static_cast<int32_t>(clauses_.size());
  clauses_.push_back(clause{std::move(out)});
  if (clauses_.back().lits.size() == 1) {
    units_.push_back(ci);
  } else {
    pending_.push_back(ci);
  }
}

void solver::unchecked_enqueue(lit l, int32_t reason) {
  size_t v = static_cast<size_t>(l.variable());
  assert(assign_[v] == -1);
  assign_[v] = l.negated() ? 0 : 1;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

void solver::cancel_until(int level) {
  if (decision_level() <= level) return;
  size_t bound = static_cast<size_t>(trail_lim_[static_cast<size_t>(level)]);
  for (size_t i = trail_.size(); i-- > bound;) {
    size_t v = static_cast<size_t>(trail_[i].variable());
    phase_[v] = assign_[v];  // phase saving
    assign_[v] = -1;
    reason_[v] = -1;
    if (heap_pos_[v] < 0) heap_insert(static_cast<var>(v));
  }
  trail_.resize(bound);
  trail_lim_.resize(static_cast<size_t>(level));
  if (qhead_ > trail_.size()) qhead_ = trail_.size();
}

int32_t solver::propagate() {
  while (qhead_ < trail_.size()) {
    lit p = trail_[qhead_++];  // p is true; visit clauses watching ~p
    lit np = ~p;
    auto& ws = watches_[static_cast<size_t>(np.x)];
    size_t keep = 0;
    for (size_t wi = 0; wi < ws.size(); ++wi) {
      int32_t ci = ws[wi];
      clause& c = clauses_[static_cast<size_t>(ci)];
      if (c.lits[0] == np) std::swap(c.lits[0], c.lits[1]);
      // c.lits[1] == np, which is false.
      if (value(c.lits[0]) == 1) {
        ws[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != 0) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[static_cast<size_t>(c.lits[1].x)].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      if (value(c.lits[0]) == 0) {
        // conflict: keep remaining watches, stop propagation
        for (size_t rest = wi; rest < ws.size(); ++rest) ws[keep++] = ws[rest];
        ws.resize(keep);
        qhead_ = trail_.size();
        return ci;
      }
      unchecked_enqueue(c.lits[0], ci);
      ws[keep++] = ci;
    }
    ws.resize(keep);
  }
  return -1;
}

void solver::analyze(int32_t confl, std::vector<lit>& learnt, int& backjump) {
  learnt.clear();
  learnt.push_back(lit{});  // slot for the asserting literal
  int counter = 0;
  lit p{-1};
  size_t idx = trail_.size();
  int32_t reason = confl;
  do {
    const clause& c = clauses_[static_cast<size_t>(reason)];
    for (size_t j = (p.x == -1 ? 0 : 1); j < c.lits.size(); ++j) {
      lit q = c.lits[j];
      size_t v = static_cast<size_t>(q.variable());
      if (!seen_[v] && level_[v] > 0) {
        seen_[v] = 1;
        bump(static_cast<var>(v));
        if (level_[v] == decision_level())
          ++counter;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[static_cast<size_t>(trail_[idx - 1].variable())]) --idx;
    p = trail_[idx - 1];
    --idx;
    reason = reason_[static_cast<size_t>(p.variable())];
    seen_[static_cast<size_t>(p.variable())] = 0;
    --counter;
  } while (counter > 0);
  learnt[0] = ~p;

  backjump = 0;
  if (learnt.size() > 1) {
    size_t max_i = 1;
    for (size_t i = 2; i < learnt.size(); ++i) {
      if (level_[static_cast<size_t>(learnt[i].variable())] >
          level_[static_cast<size_t>(learnt[max_i].variable())])
        max_i = i;
    }
    std::swap(learnt[1], learnt[max_i]);
    backjump = level_[static_cast<size_t>(learnt[1].variable())];
  }
  for (lit l : learnt) seen_[static_cast<size_t>(l.variable())] = 0;
}

void solver::attach_watches(uint32_t ci) {
  const clause& c = clauses_[ci];
  watches_[static_cast<size_t>(c.lits[0].x)].push_back(static_cast<int32_t>(ci));
  watches_[static_cast<size_t>(c.lits[1].x)].push_back(static_cast<int32_t>(ci));
}

// Brings a freshly added clause into the watch scheme under the current
// partial assignment, backtracking as little as possible. Returns false if
// the solver became unsatisfiable.
bool solver::attach_pending(uint32_t ci) {
  clause& c = clauses_[ci];
  for (;;) {
    size_t non_false = 0;
    for (size_t i = 0; i < c.lits.size() && non_false < 2; ++i) {
      if (value(c.lits[i]) != 0) {
        std::swap(c.lits[non_false], c.lits[i]);
        ++non_false;
      }
    }
    if (non_false >= 2) {
      attach_watches(ci);
      return true;
    }
    // Highest and second-highest levels among false literals.
    int l1 = 0, l2 = 0;
    for (size_t i = non_false; i < c.lits.size(); ++i) {
      int lv = level_[static_cast<size_t>(c.lits[i].variable())];
      if (lv > l1) {
        l2 = l1;
        l1 = lv;
      } else if (lv > l2) {
        l2 = lv;
      }
    }
    if (non_false == 1) {
      // Watch the single non-false literal plus the highest false one. If a
      // later backtrack unassigns only the watched literal the clause may
      // temporarily go unpropagated; deciding that variable then either
      // satisfies the clause (saved phase) or trips a conflict, so the
      // result is unaffected.
      lit u = c.lits[0];
      size_t best = 1;
      for (size_t i = 2; i < c.lits.size(); ++i)
        if (level_[static_cast<size_t>(c.lits[i].variable())] >
            level_[static_cast<size_t>(c.lits[best].variable())])
          best = i;
      std::swap(c.lits[1], c.lits[best]);
      attach_watches(ci);
      if (value(u) == -1) unchecked_enqueue(u, static_cast<int32_t>(ci));
      return true;
    }
    // All literals false.
    if (l1 == 0) {
      unsat_ = true;
      return false;
    }
    cancel_until(l1 == l2 ? l1 - 1 : l2);
  }
}

// Re-asserts unit clauses that are unassigned or violated under the current
// trail. Returns false if the solver became unsatisfiable.
bool solver::ensure_units() {
  for (size_t i = 0; i < units_.size(); ++i) {
    const clause& c = clauses_[static_cast<size_t>(units_[i])];
    lit u = c.lits[0];
    int v = value(u);
    if (v == 1) continue;
    if (v == 0) {
      int lv = level_[static_cast<size_t>(u.variable())];
      if (lv == 0) {
        unsat_ = true;
        return false;
      }
      cancel_until(lv - 1);
      i = static_cast<size_t>(-1);  // restart scan
      continue;
    }
    unchecked_enqueue(u, units_[i]);
  }
  return true;
}

status solver::solve() {
  if (unsat_) return status::unsat;
  for (int32_t ci : pending_) {
    if (!attach_pending(static_cast<uint32_t>(ci))) return status::unsat;
  }
  pending_.clear();
  if (!ensure_units()) return status::unsat;

  std::vector<lit> learnt;
  for (;;) {
    int32_t confl = propagate();
    if (confl >= 0) {
      ++conflicts_;
      if (decision_level() == 0) {
        unsat_ = true;
        return status::unsat;
      }
      int backjump = 0;
      analyze(confl, learnt, backjump);
      cancel_until(backjump);
      int32_t ci = static_cast<int32_t>(clauses_.size());
      clauses_.push_back(clause{learnt});
      if (learnt.size() == 1) {
        units_.push_back(ci);
        unchecked_enqueue(learnt[0], ci);
      } else {
        attach_watches(static_cast<uint32_t>(ci));
        unchecked_enqueue(learnt[0], ci);
      }
      decay();
      if (!ensure_units()) return status::unsat;
    } else {
      // Pick the next unassigned variable; saved phase first.
      var next = -1;
      while (!heap_.empty()) {
        var v = heap_pop();
        if (value(v) == -1) {
          next = v;
          break;
        }
      }
      if (next < 0) {
        bool complete = true;
        for (size_t v = 0; v < assign_.size(); ++v) {
          if (assign_[v] == -1) {
            complete = false;
            heap_insert(static_cast<var>(v));
          }
        }
        if (!complete) continue;
        model_.assign(assign_.begin(), assign_.end());
        return status::sat;
      }
      ++decisions_;
      trail_lim_.push_back(static_cast<int32_t>(trail_.size()));
      unchecked_enqueue(lit::make(next, phase_[static_cast<size_t>(next)] == 0),
                        -1);
    }
  }
}

void solver::bump(var v) {
  activity_[static_cast<size_t>(v)] += var_inc_;
  if (activity_[static_cast<size_t>(v)] > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[static_cast<size_t>(v)] >= 0)
    heap_sift_up(heap_pos_[static_cast<size_t>(v)]);
}

void solver::decay() { var_inc_ /= 0.95; }

bool solver::heap_less(var a, var b) const {
  uint8_t ta = tier_[static_cast<size_t>(a)];
  uint8_t tb = tier_[static_cast<size_t>(b)];
  if (ta != tb) return ta < tb;
  double aa = activity_[static_cast<size_t>(a)];
  double ab = activity_[static_cast<size_t>(b)];
  if (aa != ab) return aa > ab;
  return a < b;
}

void solver::heap_insert(var v) {
  if (heap_pos_[static_cast<size_t>(v)] >= 0) return;
  heap_pos_[static_cast<size_t>(v)] = static_cast<int32_t>(heap_.size());
  heap_.push_back(v);
  heap_sift_up(static_cast<int>(heap_.size()) - 1);
}

var solver::heap_pop() {
  var top = static_cast<var>(heap_[0]);
  heap_pos_[static_cast<size_t>(top)] = -1;
  if (heap_.size() > 1) {
    heap_[0] = heap_.back();
    heap_pos_[static_cast<size_t>(heap_[0])] = 0;
    heap_.pop_back();
    heap_sift_down(0);
  } else {
    heap_.pop_back();
  }
  return top;
}

void solver::heap_sift_up(int i) {
  var v = static_cast<var>(heap_[static_cast<size_t>(i)]);
  while (i > 0) {
    int parent = (i - 1) / 2;
    if (!heap_less(v, static_cast<var>(heap_[static_cast<size_t>(parent)])))
      break;
    heap_[static_cast<size_t>(i)] = heap_[static_cast<size_t>(parent)];
    heap_pos_[static_cast<size_t>(heap_[static_cast<size_t>(i)])] = i;
    i = parent;
  }
  heap_[static_cast<size_t>(i)] = v;
  heap_pos_[static_cast<size_t>(v)] = i;
}

void solver::heap_sift_down(int i) {
  var v = static_cast<var>(heap_[static_cast<size_t>(i)]);
  int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n &&
        heap_less(static_cast<var>(heap_[static_cast<size_t>(child + 1)]),
                  static_cast<var>(heap_[static_cast<size_t>(child)])))
      ++child;
    if (!heap_less(static_cast<var>(heap_[static_cast<size_t>(child)]), v))
      break;
    heap_[static_cast<size_t>(i)] = heap_[static_cast<size_t>(child)];
    heap_pos_[static_cast<size_t>(heap_[static_cast<size_t>(i)])] = i;
    i = child;
  }
  heap_[static_cast<size_t>(i)] = v;
  heap_pos_[static_cast<size_t>(v)] = i;
}

}  // namespace hypermon::sat
