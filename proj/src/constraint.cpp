#include "hypermon/constraint.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_set>

namespace hypermon {

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

uint64_t cnode_hash(const cnode& n) {
  uint64_t h = static_cast<uint64_t>(n.kind);
  h = mix(h, n.neg);
  h = mix(h, n.sym);
  h = mix(h, n.position);
  for (cref k : n.kids) h = mix(h, k);
  return h;
}

bool cnode_eq(const cnode& a, const cnode& b) {
  return a.kind == b.kind && a.neg == b.neg && a.sym == b.sym &&
         a.position == b.position && a.kids == b.kids;
}

}  // namespace

constraint_store::constraint_store() {
  intern(cnode{cop::ctrue, false, 0, 0, {}});   // k_true
  intern(cnode{cop::cfalse, false, 0, 0, {}});  // k_false
}

cref constraint_store::intern(cnode n) {
  uint64_t h = cnode_hash(n);
  auto& bucket = index_[h];
  for (cref c : bucket)
    if (cnode_eq(nodes_[c], n)) return c;
  cref c = static_cast<cref>(nodes_.size());
  nodes_.push_back(std::move(n));
  bucket.push_back(c);
  return c;
}

cref constraint_store::prop_lit(uint32_t prop, uint32_t position, bool neg) {
  return intern(cnode{cop::prop, neg, prop, position, {}});
}

cref constraint_store::pvar(uint32_t instance, bool neg) {
  return intern(cnode{cop::pvar, neg, instance, 0, {}});
}

cref constraint_store::conj(std::vector<cref> kids) {
  std::vector<cref> out;
  out.reserve(kids.size());
  for (cref k : kids) {
    if (k == k_true) continue;
    if (k == k_false) return k_false;
    out.push_back(k);
  }
  if (out.empty()) return k_true;
  if (out.size() == 1) return out[0];
  return intern(cnode{cop::conj, false, 0, 0, std::move(out)});
}

cref constraint_store::disj(std::vector<cref> kids) {
  std::vector<cref> out;
  out.reserve(kids.size());
  for (cref k : kids) {
    if (k == k_false) continue;
    if (k == k_true) return k_true;
    out.push_back(k);
  }
  if (out.empty()) return k_false;
  if (out.size() == 1) return out[0];
  return intern(cnode{cop::disj, false, 0, 0, std::move(out)});
}

cref constraint_store::impl(uint32_t lhs_instance, cref rhs) {
  if (rhs == k_true) return k_true;
  return intern(cnode{cop::impl, false, lhs_instance, 0, {rhs}});
}

cref constraint_store::canonical(cref c) {
  auto it = canon_.find(c);
  if (it != canon_.end()) return it->second;
  const cnode n = nodes_[c];
  cref out = c;
  switch (n.kind) {
    case cop::conj:
    case cop::disj: {
      std::vector<cref> kids;
      kids.reserve(n.kids.size());
      for (cref k : n.kids) kids.push_back(canonical(k));
      std::sort(kids.begin(), kids.end());
      out = intern(cnode{n.kind, false, 0, 0, std::move(kids)});
      break;
    }
    case cop::impl: {
      cref rhs = canonical(n.kids[0]);
      out = rhs == n.kids[0] ? c : intern(cnode{cop::impl, false, n.sym, 0, {rhs}});
      break;
    }
    default:
      break;
  }
  canon_.emplace(c, out);
  return out;
}

uint32_t constraint_store::instance(polarity pol, formula f, uint32_t position,
                                    uint32_t scope) {
  uint64_t h = mix(mix(mix(static_cast<uint64_t>(pol), f.id), position), scope);
  auto& bucket = instance_index_[h];
  for (uint32_t id : bucket) {
    const placeholder& p = instances_[id];
    if (p.pol == pol && p.f == f && p.position == position && p.scope == scope)
      return id;
  }
  uint32_t id = static_cast<uint32_t>(instances_.size());
  placeholder p;
  p.pol = pol;
  p.f = f;
  p.position = position;
  p.scope = scope;
  instances_.push_back(p);
  bucket.push_back(id);
  return id;
}

placeholder_resolver canonical_resolver(constraint_store& cs) {
  return [&cs](polarity pol, formula f, uint32_t pos) {
    return cs.instance(pol, f, pos, 0);
  };
}

// ---------------------------------------------------------------------------
// Rewriting

namespace {

cref rewrite_rec(constraint_store& cs, const formula_store& fs, formula f,
                 const event& e, uint32_t pos,
                 const placeholder_resolver& resolve) {
  const formula_node& n = fs.node(f);
  switch (n.kind) {
    case op::tt:
      return k_true;
    case op::ff:
      return k_false;
    case op::atom:
      if (n.side == trace_side::first)
        return cs.constant(e.contains(fs.prop_name(n.prop)));
      if (n.side == trace_side::second)
        return cs.prop_lit(n.prop, pos, false);
      throw std::logic_error("rewrite: atom without trace side");
    case op::not_: {
      const formula_node& c = fs.node(n.lhs);
      if (c.kind != op::atom)
        throw std::logic_error("rewrite expects negation normal form");
      if (c.side == trace_side::first)
        return cs.constant(!e.contains(fs.prop_name(c.prop)));
      if (c.side == trace_side::second)
        return cs.prop_lit(c.prop, pos, true);
      throw std::logic_error("rewrite: atom without trace side");
    }
    case op::and_:
      return cs.conj({rewrite_rec(cs, fs, n.lhs, e, pos, resolve),
                      rewrite_rec(cs, fs, n.rhs, e, pos, resolve)});
    case op::or_:
      return cs.disj({rewrite_rec(cs, fs, n.lhs, e, pos, resolve),
                      rewrite_rec(cs, fs, n.rhs, e, pos, resolve)});
    case op::next:
      return cs.pvar(resolve(polarity::strong, n.lhs, pos + 1));
    case op::weak_next:
      return cs.pvar(resolve(polarity::weak, n.lhs, pos + 1));
    case op::until:
      return cs.disj(
          {rewrite_rec(cs, fs, n.rhs, e, pos, resolve),
           cs.conj({rewrite_rec(cs, fs, n.lhs, e, pos, resolve),
                    cs.pvar(resolve(polarity::strong, f, pos + 1))})});
    case op::release:
      return cs.conj(
          {rewrite_rec(cs, fs, n.rhs, e, pos, resolve),
           cs.disj({rewrite_rec(cs, fs, n.lhs, e, pos, resolve),
                    cs.pvar(resolve(polarity::weak, f, pos + 1))})});
    case op::weak_until:
      // unrolls like until but carries a weak obligation
      return cs.disj(
          {rewrite_rec(cs, fs, n.rhs, e, pos, resolve),
           cs.conj({rewrite_rec(cs, fs, n.lhs, e, pos, resolve),
                    cs.pvar(resolve(polarity::weak, f, pos + 1))})});
    case op::globally:
      return cs.conj({rewrite_rec(cs, fs, n.lhs, e, pos, resolve),
                      cs.pvar(resolve(polarity::weak, f, pos + 1))});
    case op::finally_:
      return cs.disj({rewrite_rec(cs, fs, n.lhs, e, pos, resolve),
                      cs.pvar(resolve(polarity::strong, f, pos + 1))});
    default:
      throw std::logic_error("rewrite expects a desugared body");
  }
}

}  // namespace

cref rewrite_event(constraint_store& cs, const formula_store& fs, formula body,
                   const event& e, uint32_t position,
                   const placeholder_resolver& resolve) {
  return rewrite_rec(cs, fs, body, e, position, resolve);
}

cref rewrite_event(constraint_store& cs, const formula_store& fs, formula body,
                   const event& e, uint32_t position) {
  return rewrite_rec(cs, fs, body, e, position, canonical_resolver(cs));
}

cref encode_event(constraint_store& cs, formula_store& fs, const event& e,
                  const alphabet& ap, uint32_t position) {
  std::vector<cref> units;
  units.reserve(ap.size());
  for (const std::string& name : ap.names) {
    uint32_t prop = fs.prop_id(name);
    units.push_back(cs.prop_lit(prop, position, !e.contains(name)));
  }
  return cs.conj(std::move(units));
}

cref encode_trace(constraint_store& cs, formula_store& fs, const trace& t,
                  const alphabet& ap, uint32_t from) {
  std::vector<cref> parts;
  parts.reserve(t.size());
  for (size_t i = 0; i < t.size(); ++i)
    parts.push_back(
        encode_event(cs, fs, t[i], ap, from + static_cast<uint32_t>(i)));
  return cs.conj(std::move(parts));
}

namespace {

void collect_pvars(const constraint_store& cs, cref c,
                   std::vector<uint32_t>& out,
                   std::unordered_set<uint32_t>& seen_insts,
                   std::unordered_set<cref>& seen_nodes) {
  if (seen_nodes.count(c)) return;
  seen_nodes.insert(c);
  const cnode& n = cs.node(c);
  switch (n.kind) {
    case cop::pvar:
      if (seen_insts.insert(n.sym).second) out.push_back(n.sym);
      break;
    case cop::conj:
    case cop::disj:
      for (cref k : n.kids) collect_pvars(cs, k, out, seen_insts, seen_nodes);
      break;
    case cop::impl:
      collect_pvars(cs, n.kids[0], out, seen_insts, seen_nodes);
      break;
    default:
      break;
  }
}

}  // namespace

std::vector<uint32_t> collect_placeholders(const constraint_store& cs,
                                           cref c) {
  std::vector<uint32_t> out;
  std::unordered_set<uint32_t> seen_insts;
  std::unordered_set<cref> seen_nodes;
  collect_pvars(cs, c, out, seen_insts, seen_nodes);
  return out;
}

std::vector<cref> closure_units(constraint_store& cs,
                                std::span<const uint32_t> instances) {
  std::vector<cref> out;
  out.reserve(instances.size());
  for (uint32_t id : instances) {
    bool strong = cs.inst(id).pol == polarity::strong;
    out.push_back(cs.pvar(id, strong));
  }
  return out;
}

cref batch_constraints(constraint_store& cs, const formula_store& fs,
                       formula body, const trace& t) {
  assert(t.size() >= 1);
  auto resolve = canonical_resolver(cs);
  std::vector<cref> parts;
  cref first = rewrite_event(cs, fs, body, t[0], 0, resolve);
  parts.push_back(first);
  std::vector<uint32_t> frontier = collect_placeholders(cs, first);
  std::unordered_set<uint32_t> defined;
  for (uint32_t pos = 1; pos < t.size(); ++pos) {
    std::vector<uint32_t> next;
    std::unordered_set<uint32_t> next_seen;
    for (uint32_t id : frontier) {
      if (!defined.insert(id).second) continue;
      const placeholder& p = cs.inst(id);
      cref c = rewrite_event(cs, fs, p.f, t[pos], pos, resolve);
      parts.push_back(cs.impl(id, c));
      for (uint32_t open : collect_placeholders(cs, c))
        if (next_seen.insert(open).second) next.push_back(open);
    }
    frontier = std::move(next);
  }
  for (cref u : closure_units(cs, frontier)) parts.push_back(u);
  return cs.conj(std::move(parts));
}

cref shift_positions(constraint_store& cs, cref c, uint32_t offset) {
  const cnode n = cs.node(c);
  switch (n.kind) {
    case cop::ctrue:
    case cop::cfalse:
      return c;
    case cop::prop:
      return cs.prop_lit(n.sym, n.position + offset, n.neg);
    case cop::pvar: {
      const placeholder p = cs.inst(n.sym);
      uint32_t shifted =
          cs.instance(p.pol, p.f, p.position + offset, p.scope);
      return cs.pvar(shifted, n.neg);
    }
    case cop::conj:
    case cop::disj: {
      std::vector<cref> kids;
      kids.reserve(n.kids.size());
      for (cref k : n.kids) kids.push_back(shift_positions(cs, k, offset));
      return n.kind == cop::conj ? cs.conj(std::move(kids))
                                 : cs.disj(std::move(kids));
    }
    case cop::impl: {
      const placeholder p = cs.inst(n.sym);
      uint32_t shifted =
          cs.instance(p.pol, p.f, p.position + offset, p.scope);
      return cs.impl(shifted, shift_positions(cs, n.kids[0], offset));
    }
  }
  throw std::logic_error("shift_positions: unreachable");
}

namespace {

void split_rec(const constraint_store& cs, cref c, std::vector<cref>& out) {
  if (c == k_true) return;
  const cnode& n = cs.node(c);
  if (n.kind == cop::conj) {
    for (cref k : n.kids) split_rec(cs, k, out);
  } else {
    out.push_back(c);
  }
}

}  // namespace

std::vector<cref> split_conjuncts(const constraint_store& cs, cref c) {
  std::vector<cref> out;
  split_rec(cs, c, out);
  return out;
}

std::vector<uint32_t> bare_placeholders(const constraint_store& cs, cref c) {
  std::vector<uint32_t> out;
  for (cref k : split_conjuncts(cs, c)) {
    const cnode& n = cs.node(k);
    if (n.kind == cop::pvar && !n.neg) out.push_back(n.sym);
  }
  return out;
}

cref substitute_placeholders(
    constraint_store& cs, cref c,
    const std::unordered_map<uint32_t, uint32_t>& map) {
  const cnode n = cs.node(c);
  switch (n.kind) {
    case cop::ctrue:
    case cop::cfalse:
    case cop::prop:
      return c;
    case cop::pvar: {
      auto it = map.find(n.sym);
      return it == map.end() ? c : cs.pvar(it->second, n.neg);
    }
    case cop::conj:
    case cop::disj: {
      std::vector<cref> kids;
      kids.reserve(n.kids.size());
      bool changed = false;
      for (cref k : n.kids) {
        cref s = substitute_placeholders(cs, k, map);
        changed |= s != k;
        kids.push_back(s);
      }
      if (!changed) return c;
      return n.kind == cop::conj ? cs.conj(std::move(kids))
                                 : cs.disj(std::move(kids));
    }
    case cop::impl: {
      auto it = map.find(n.sym);
      uint32_t lhs = it == map.end() ? n.sym : it->second;
      cref rhs = substitute_placeholders(cs, n.kids[0], map);
      if (lhs == n.sym && rhs == n.kids[0]) return c;
      return cs.impl(lhs, rhs);
    }
  }
  throw std::logic_error("substitute_placeholders: unreachable");
}

std::string print_constraint(const constraint_store& cs,
                             const formula_store& fs, cref c) {
  const cnode& n = cs.node(c);
  switch (n.kind) {
    case cop::ctrue:
      return "true";
    case cop::cfalse:
      return "false";
    case cop::prop:
      return (n.neg ? "!" : "") + fs.prop_name(n.sym) + "@" +
             std::to_string(n.position);
    case cop::pvar: {
      const placeholder& p = cs.inst(n.sym);
      std::string s = n.neg ? "!" : "";
      s += p.pol == polarity::strong ? "v-[" : "v+[";
      s += print_formula(fs, p.f);
      s += "]@" + std::to_string(p.position);
      if (p.scope > 1) s += "#" + std::to_string(p.scope);
      return s;
    }
    case cop::conj:
    case cop::disj: {
      std::string s = "(";
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += n.kind == cop::conj ? " & " : " | ";
        s += print_constraint(cs, fs, n.kids[i]);
      }
      return s + ")";
    }
    case cop::impl: {
      const placeholder& p = cs.inst(n.sym);
      std::string s = "(";
      s += p.pol == polarity::strong ? "v-[" : "v+[";
      s += print_formula(fs, p.f);
      s += "]@" + std::to_string(p.position);
      if (p.scope > 1) s += "#" + std::to_string(p.scope);
      return s + " -> " + print_constraint(cs, fs, n.kids[0]) + ")";
    }
  }
  return "?";
}

}  // namespace hypermon
