#include "hypermon/semantics.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <unordered_map>

namespace hypermon {

namespace {

void collect_order(const formula_store& fs, formula f,
                   std::vector<formula>& order,
                   std::unordered_map<uint32_t, uint32_t>& index) {
  if (index.count(f.id)) return;
  const formula_node& n = fs.node(f);
  switch (n.kind) {
    case op::tt:
    case op::ff:
    case op::atom:
      break;
    case op::not_:
    case op::next:
    case op::weak_next:
      collect_order(fs, n.lhs, order, index);
      break;
    case op::and_:
    case op::or_:
    case op::until:
    case op::release:
      collect_order(fs, n.lhs, order, index);
      collect_order(fs, n.rhs, order, index);
      break;
    default:
      throw std::logic_error("finite evaluation expects core operators");
  }
  index.emplace(f.id, static_cast<uint32_t>(order.size()));
  order.push_back(f);
}

// Backward dynamic program over positions [0, m). AtomFn decides atom truth
// at a position.
template <typename AtomFn>
bool evaluate(const formula_store& fs, formula root, size_t m,
              AtomFn&& atom_at) {
  assert(m >= 1);
  std::vector<formula> order;
  std::unordered_map<uint32_t, uint32_t> index;
  collect_order(fs, root, order, index);
  const size_t k = order.size();
  std::vector<std::vector<char>> val(k, std::vector<char>(m, 0));
  for (size_t pos = m; pos-- > 0;) {
    for (size_t s = 0; s < k; ++s) {
      const formula_node& n = fs.node(order[s]);
      char v = 0;
      switch (n.kind) {
        case op::tt: v = 1; break;
        case op::ff: v = 0; break;
        case op::atom: v = atom_at(n, pos); break;
        case op::not_:
          v = !val[index.at(n.lhs.id)][pos];
          break;
        case op::and_:
          v = val[index.at(n.lhs.id)][pos] && val[index.at(n.rhs.id)][pos];
          break;
        case op::or_:
          v = val[index.at(n.lhs.id)][pos] || val[index.at(n.rhs.id)][pos];
          break;
        case op::next:
          v = pos + 1 < m && val[index.at(n.lhs.id)][pos + 1];
          break;
        case op::weak_next:
          v = pos + 1 >= m || val[index.at(n.lhs.id)][pos + 1];
          break;
        case op::until: {
          char q = val[index.at(n.rhs.id)][pos];
          char p = val[index.at(n.lhs.id)][pos];
          v = q || (pos + 1 < m && p && val[s][pos + 1]);
          break;
        }
        case op::release: {
          char q = val[index.at(n.rhs.id)][pos];
          char p = val[index.at(n.lhs.id)][pos];
          v = q && (pos + 1 >= m || p || val[s][pos + 1]);
          break;
        }
        default:
          throw std::logic_error("finite evaluation expects core operators");
      }
      val[s][pos] = v;
    }
  }
  return val[index.at(root.id)][0];
}

}  // namespace

bool eval_pair(const formula_store& fs, formula body, const trace& a,
               const trace& b) {
  size_t m = std::min(a.size(), b.size());
  return evaluate(fs, body, m, [&](const formula_node& n, size_t pos) -> char {
    const std::string& name = fs.prop_name(n.prop);
    switch (n.side) {
      case trace_side::first: return a[pos].contains(name);
      case trace_side::second: return b[pos].contains(name);
      default:
        throw std::logic_error("eval_pair: atom without trace side");
    }
  });
}

bool lang_member(const formula_store& fs, formula body, const trace& a,
                 const trace& b) {
  return eval_pair(fs, body, a, b) && eval_pair(fs, body, b, a);
}

bool eval_finite(const formula_store& fs, formula f, const trace& t) {
  return evaluate(fs, f, t.size(),
                  [&](const formula_node& n, size_t pos) -> char {
                    if (n.side != trace_side::none)
                      throw std::logic_error(
                          "eval_finite: atom carries a trace side");
                    return t[pos].contains(fs.prop_name(n.prop));
                  });
}

// ---------------------------------------------------------------------------
// Projection

namespace {

formula project_rec(formula_store& fs, formula f, const trace& t, size_t idx,
                    std::unordered_map<uint64_t, formula>& memo) {
  uint64_t key = (static_cast<uint64_t>(f.id) << 32) | idx;
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  const formula_node n = fs.node(f);  // copy: fs may grow below
  const bool last = t.size() - idx <= 1;
  formula out;
  switch (n.kind) {
    case op::tt:
    case op::ff:
      out = f;
      break;
    case op::atom:
      if (n.side == trace_side::first) {
        out = fs.constant(t[idx].contains(fs.prop_name(n.prop)));
      } else {
        out = fs.make_atom(fs.prop_name(n.prop), trace_side::none);
      }
      break;
    case op::not_: {
      const formula_node child = fs.node(n.lhs);
      if (child.kind != op::atom)
        throw std::logic_error("project expects core NNF");
      if (child.side == trace_side::first) {
        out = fs.constant(!t[idx].contains(fs.prop_name(child.prop)));
      } else {
        out = fs.make_unary(
            op::not_, fs.make_atom(fs.prop_name(child.prop), trace_side::none));
      }
      break;
    }
    case op::and_:
    case op::or_:
      out = fs.make_binary(n.kind, project_rec(fs, n.lhs, t, idx, memo),
                           project_rec(fs, n.rhs, t, idx, memo));
      break;
    case op::next:
      out = last ? fs.constant(false)
                 : fs.make_unary(op::next,
                                 project_rec(fs, n.lhs, t, idx + 1, memo));
      break;
    case op::weak_next:
      out = last ? fs.constant(true)
                 : fs.make_unary(op::weak_next,
                                 project_rec(fs, n.lhs, t, idx + 1, memo));
      break;
    case op::until: {
      formula q = project_rec(fs, n.rhs, t, idx, memo);
      if (last) {
        out = q;
      } else {
        formula p = project_rec(fs, n.lhs, t, idx, memo);
        formula next = fs.make_unary(op::next,
                                     project_rec(fs, f, t, idx + 1, memo));
        out = fs.make_binary(op::or_, q, fs.make_binary(op::and_, p, next));
      }
      break;
    }
    case op::release: {
      formula q = project_rec(fs, n.rhs, t, idx, memo);
      if (last) {
        out = q;
      } else {
        formula p = project_rec(fs, n.lhs, t, idx, memo);
        formula next = fs.make_unary(op::weak_next,
                                     project_rec(fs, f, t, idx + 1, memo));
        out = fs.make_binary(op::and_, q, fs.make_binary(op::or_, p, next));
      }
      break;
    }
    default:
      throw std::logic_error("project expects core NNF");
  }
  memo.emplace(key, out);
  return out;
}

}  // namespace

formula project(formula_store& fs, formula body, const trace& t) {
  assert(t.size() >= 1);
  std::unordered_map<uint64_t, formula> memo;
  return project_rec(fs, body, t, 0, memo);
}

// ---------------------------------------------------------------------------
// Reference monitor

namespace {

bool pair_ok(const formula_store& fs, formula body, const trace& a,
             const trace& b) {
  if (&a == &b) return eval_pair(fs, body, a, a);
  return eval_pair(fs, body, a, b) && eval_pair(fs, body, b, a);
}

// Decodes `code` into k-proposition events appended to `base`.
void append_events(trace& base, uint64_t code, size_t count,
                   const std::vector<std::string>& props) {
  for (size_t i = 0; i < count; ++i) {
    std::vector<std::string> ps;
    for (size_t p = 0; p < props.size(); ++p) {
      if (code & 1) ps.push_back(props[p]);
      code >>= 1;
    }
    base.events.push_back(event(std::move(ps)));
  }
}

// Earliest event index of traces[bad] from which no completion within the
// observed trace lengths can satisfy the specification against the traces
// seen before it. Falls back to the final event when the search space is
// too large or no such prefix exists.
size_t blame_event(const formula_store& fs, formula body,
                   std::span<const trace> traces, size_t bad) {
  const trace& tj = traces[bad];
  std::vector<std::string> props = collect_alphabet(fs, body);
  size_t k = props.size();
  size_t max_len = tj.size();
  for (size_t i = 0; i < bad; ++i) max_len = std::max(max_len, traces[i].size());

  for (size_t p = 0; p + 1 < tj.size() + 1; ++p) {
    size_t prefix_len = p + 1;
    // Total candidate completions: one per length in [prefix_len, max_len]
    // and per proposition assignment of the added positions. The search is
    // budgeted; beyond the budget the final event is blamed instead.
    bool feasible = true;
    uint64_t total = 0;
    for (size_t len = prefix_len; len <= max_len && feasible; ++len) {
      size_t bits = k * (len - prefix_len);
      if (bits > 16) feasible = false;
      else total += uint64_t{1} << bits;
    }
    if (!feasible || total * (bad + 1) * max_len > (uint64_t{1} << 22))
      continue;

    bool all_bad = true;
    for (size_t len = prefix_len; len <= max_len && all_bad; ++len) {
      size_t added = len - prefix_len;
      uint64_t combos = uint64_t{1} << (k * added);
      for (uint64_t code = 0; code < combos && all_bad; ++code) {
        trace cand;
        cand.events.assign(tj.events.begin(),
                           tj.events.begin() + static_cast<long>(prefix_len));
        append_events(cand, code, added, props);
        bool bad_cand = !eval_pair(fs, body, cand, cand);
        for (size_t i = 0; i < bad && !bad_cand; ++i)
          bad_cand = !pair_ok(fs, body, traces[i], cand);
        if (!bad_cand) all_bad = false;
      }
    }
    if (all_bad) return p;
  }
  return tj.size() - 1;
}

}  // namespace

verdict oracle_monitor_serial(const formula_store& fs, formula core_body,
                              std::span<const trace> traces) {
  for (size_t j = 0; j < traces.size(); ++j) {
    for (size_t i = 0; i <= j; ++i) {
      if (!pair_ok(fs, core_body, traces[i], traces[j]))
        return verdict::at(j, blame_event(fs, core_body, traces, j));
    }
  }
  return verdict::none();
}

verdict oracle_monitor_parallel(const formula_store& fs, formula core_body,
                                std::span<const trace> traces) {
  const size_t n = traces.size();
  if (n == 0) return verdict::none();

  // Flatten the triangular pair enumeration; the verdict blames the
  // smallest violating second index, so reduce on j.
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  pairs.reserve(n * (n + 1) / 2);
  for (uint32_t j = 0; j < n; ++j)
    for (uint32_t i = 0; i <= j; ++i) pairs.emplace_back(i, j);

  std::atomic<size_t> bad_j{n};
#ifdef HYPERMON_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (long idx = 0; idx < static_cast<long>(pairs.size()); ++idx) {
    auto [i, j] = pairs[static_cast<size_t>(idx)];
    if (j >= bad_j.load(std::memory_order_relaxed)) continue;
    if (!pair_ok(fs, core_body, traces[i], traces[j])) {
      size_t cur = bad_j.load(std::memory_order_relaxed);
      while (j < cur &&
             !bad_j.compare_exchange_weak(cur, j, std::memory_order_relaxed)) {
      }
    }
  }

  size_t j = bad_j.load();
  if (j == n) return verdict::none();
  return verdict::at(j, blame_event(fs, core_body, traces, j));
}

verdict oracle_monitor(const formula_store& fs, formula core_body,
                       std::span<const trace> traces, bool parallel) {
  if (parallel) return oracle_monitor_parallel(fs, core_body, traces);
  return oracle_monitor_serial(fs, core_body, traces);
}

}  // namespace hypermon
