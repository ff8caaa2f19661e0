#include "hypermon/monitor.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <stdexcept>

namespace hypermon {

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

constexpr uint64_t k_hash_seed = 0x2545f4914f6cdd1dull;
constexpr uint64_t k_event_marker = 0x517cc1b727220a95ull;

}  // namespace

monitor_session::monitor_session(formula_store& fs, const spec& s,
                                 monitor_config cfg)
    : fs_(fs), cfg_(std::move(cfg)), enc_(cs_, fs) {
  if (cfg_.conjunct_splitting && !cfg_.node_tree)
    throw std::invalid_argument(
        "monitor_config: conjunct splitting requires the node tree");

  psi_ = to_nnf(fs_, desugar(fs_, symmetric_closure(fs_, s.body)));

  std::vector<std::string> names = collect_alphabet(fs_, s.body);
  names.insert(names.end(), s.alphabet.begin(), s.alphabet.end());
  names.insert(names.end(), cfg_.extra_alphabet.begin(),
               cfg_.extra_alphabet.end());
  ap_ = alphabet::from(std::move(names));
  ap_props_.reserve(ap_.size());
  for (const std::string& n : ap_.names) ap_props_.push_back(fs_.prop_id(n));

  if (cfg_.node_tree) {
    root_inst_ = mint_instance(polarity::strong, psi_, 0, 1, true);
    tree_node root;
    root.obligations.emplace_back(polarity::strong, psi_);
    root.bindings.push_back(root_inst_);
    nodes_.push_back(std::move(root));
    assert_unit_persistent(root_inst_, false);
  }
}

uint32_t monitor_session::mint_instance(polarity pol, formula f,
                                        uint32_t position, uint32_t scope,
                                        bool forced) {
  size_t before = cs_.instance_count();
  uint32_t id = cs_.instance(pol, f, position, scope);
  if (cs_.instance_count() > before) {
    ++stats_.variables_created;
    cs_.inst(id).forced = forced;
  }
  return id;
}

void monitor_session::push_clauses(const std::vector<cnf_clause>& clauses,
                                   bool persistent) {
  if (persistent) {
    stats_.clauses_created += clauses.size();
    auto& store = cfg_.node_tree ? committed_ : trace_stash_;
    store.insert(store.end(), clauses.begin(), clauses.end());
  }
  if (solver_) {
    sync_solver_vars();
    for (const cnf_clause& cl : clauses) solver_->add_clause(cl);
  }
}

// Proposition variables are almost always pinned by the trace encoding, so
// deciding them last keeps backtracks cheap when the next event's units
// arrive. Weak placeholders default to true, anticipating the end-of-trace
// closure; strong ones keep the false default for the same reason.
void monitor_session::sync_solver_vars() {
  solver_->ensure_vars(enc_.variable_count());
  const auto& hints = enc_.variable_hints();
  for (size_t i = prop_tier_synced_; i < hints.size(); ++i) {
    auto [v, kind] = hints[i];
    if (kind == 1)
      solver_->set_decision_tier(v, 1);
    else if (kind == 2)
      solver_->set_default_phase(v, true);
  }
  prop_tier_synced_ = hints.size();
}

void monitor_session::assert_persistent(cref c) {
  std::vector<cnf_clause> cls;
  enc_.assert_top(c, cls);
  push_clauses(cls, true);
}

void monitor_session::assert_unit_persistent(uint32_t inst, bool neg) {
  assert_persistent(cs_.pvar(inst, neg));
}

bool monitor_session::assert_definition(uint32_t inst, cref body) {
  bool fresh = false;
  std::vector<cref> parts;
  if (cfg_.conjunct_splitting)
    parts = split_conjuncts(cs_, body);
  else if (body != k_true)
    parts.push_back(body);
  for (cref part : parts) {
    cref can = cs_.canonical(part);
    uint64_t key = (static_cast<uint64_t>(inst) << 32) | can;
    if (def_registry_.insert(key).second) {
      assert_persistent(cs_.impl(inst, part));
      fresh = true;
    }
  }
  return fresh;
}

// Forks the definition chain supporting re-defined placeholders: every
// recorded constraint of the current trace that mentions a forked instance
// is re-asserted with fresh instances, walking toward the root until a
// shared chain variable absorbs the change.
void monitor_session::recontextualize(
    std::unordered_map<uint32_t, uint32_t>& fix) {
  for (size_t pos = steps_.size(); pos-- > 0;) {
    for (step_record& rec : steps_[pos]) {
      bool touched = false;
      for (uint32_t o : rec.opens)
        if (fix.count(o)) {
          touched = true;
          break;
        }
      if (!touched) continue;
      cref body = substitute_placeholders(cs_, rec.body, fix);
      uint32_t lhs = rec.lhs;
      if (!cs_.inst(lhs).forced) {
        const placeholder p = cs_.inst(lhs);
        uint32_t forked =
            mint_instance(p.pol, p.f, p.position, next_scope_++, false);
        cs_.inst(forked).def_key = static_cast<uint64_t>(cs_.canonical(body)) + 1;
        fix[lhs] = forked;
        lhs = forked;
      }
      if (assert_definition(lhs, body)) step_added_constraints_ = true;
      rec.lhs = lhs;
      rec.body = body;
      rec.opens = collect_placeholders(cs_, body);
    }
  }
}

void monitor_session::begin_trace() {
  if (open_) throw std::logic_error("begin_trace: a trace is already open");
  open_ = true;
  position_ = 0;
  steps_.clear();
  enc_hash_ = k_hash_seed;
  solver_ = std::make_unique<sat::solver>();
  prop_tier_synced_ = 0;
  sync_solver_vars();
  for (const cnf_clause& cl : committed_) solver_->add_clause(cl);
  if (cfg_.node_tree) {
    cur_node_ = 0;
    frontier_inst_ = nodes_[0].bindings;
  } else {
    trace_stash_.clear();
    flat_scope_ = next_scope_++;
    uint32_t root =
        mint_instance(polarity::strong, psi_, 0, flat_scope_, false);
    frontier_obl_.assign(1, {polarity::strong, psi_});
    frontier_inst_.assign(1, root);
    std::vector<cnf_clause> cls;
    enc_.assert_top(cs_.pvar(root), cls);
    push_clauses(cls, true);
  }
}

verdict monitor_session::feed_event(const event& e) {
  if (verdict_.violation) return verdict_;
  if (!open_) throw std::logic_error("feed_event: no open trace");
  const uint32_t pos = position_;
  step_added_constraints_ = false;

  // Encoding of this event: unit literals over the alphabet, local to the
  // current trace's solver.
  enc_hash_ = mix(enc_hash_, k_event_marker);
  {
    std::vector<cnf_clause> units;
    units.reserve(ap_props_.size());
    for (size_t i = 0; i < ap_props_.size(); ++i) {
      bool member = e.contains(ap_.names[i]);
      sat::var v =
          enc_.prop_variable(ap_props_[i], pos);
      units.push_back({sat::lit::make(v, !member)});
      enc_hash_ = mix(enc_hash_, (static_cast<uint64_t>(i) << 1) | member);
    }
    push_clauses(units, false);
  }

  if (cfg_.node_tree) {
    const auto obligations = nodes_[cur_node_].obligations;  // copy
    std::vector<cref> results(obligations.size());
    std::vector<cref> key(obligations.size());
    for (size_t j = 0; j < obligations.size(); ++j) {
      results[j] = rewrite_event(cs_, fs_, obligations[j].second, e, pos,
                                 canon_resolver_);
      key[j] = cs_.canonical(results[j]);
    }

    // Opens in deterministic (canonical-form) order.
    std::vector<uint32_t> open_ids;
    {
      std::unordered_set<uint32_t> seen;
      for (cref k : key)
        for (uint32_t id : collect_placeholders(cs_, k))
          if (seen.insert(id).second) open_ids.push_back(id);
    }

    auto it = nodes_[cur_node_].children.find(key);
    bool hit = it != nodes_[cur_node_].children.end();
    uint32_t child;
    std::vector<uint32_t> bindings;
    if (hit) {
      child = it->second.child;
      bindings = it->second.bindings;
      ++stats_.tree_hits;
    } else {
      std::unordered_set<uint32_t> forced_bare;
      for (size_t j = 0; j < obligations.size(); ++j) {
        if (!cs_.inst(frontier_inst_[j]).forced) continue;
        for (uint32_t id : bare_placeholders(cs_, key[j])) forced_bare.insert(id);
      }
      tree_node child_node;
      child_node.obligations.reserve(open_ids.size());
      child_node.bindings.reserve(open_ids.size());
      for (uint32_t id : open_ids) {
        const placeholder p = cs_.inst(id);
        uint32_t b = forced_bare.count(id)
                         ? mint_instance(p.pol, p.f, p.position, 1, true)
                         : mint_instance(p.pol, p.f, p.position,
                                         next_scope_++, false);
        child_node.obligations.emplace_back(p.pol, p.f);
        child_node.bindings.push_back(b);
      }
      child = static_cast<uint32_t>(nodes_.size());
      bindings = child_node.bindings;
      nodes_.push_back(std::move(child_node));
      nodes_[cur_node_].children.emplace(key, tree_edge{child, bindings});
      ++stats_.tree_nodes_created;
    }

    std::unordered_map<uint32_t, uint32_t> can2bound;
    can2bound.reserve(open_ids.size());
    for (size_t k = 0; k < open_ids.size(); ++k)
      can2bound.emplace(open_ids[k], bindings[k]);

    std::vector<step_record> recs;
    recs.reserve(obligations.size());
    std::vector<size_t> conflicts;
    std::vector<cref> bound(obligations.size());
    for (size_t j = 0; j < obligations.size(); ++j)
      bound[j] = substitute_placeholders(cs_, results[j], can2bound);

    for (size_t j = 0; j < obligations.size(); ++j) {
      uint32_t target = frontier_inst_[j];
      uint64_t dk = static_cast<uint64_t>(cs_.canonical(bound[j])) + 1;
      placeholder& tp = cs_.inst(target);
      if (tp.forced) {
        if (assert_definition(target, bound[j])) step_added_constraints_ = true;
      } else if (tp.def_key == 0) {
        tp.def_key = dk;
        if (assert_definition(target, bound[j])) step_added_constraints_ = true;
      } else if (tp.def_key == dk) {
        // shared history: definition already present
      } else {
        conflicts.push_back(j);
        continue;
      }
      recs.push_back(
          {target, bound[j], collect_placeholders(cs_, bound[j])});
    }
    if (!conflicts.empty()) {
      std::unordered_map<uint32_t, uint32_t> fix;
      for (size_t j : conflicts) {
        const placeholder p = cs_.inst(frontier_inst_[j]);
        fix[frontier_inst_[j]] =
            mint_instance(p.pol, p.f, p.position, next_scope_++, false);
      }
      recontextualize(fix);
      for (size_t j : conflicts) {
        uint32_t target = fix[frontier_inst_[j]];
        cs_.inst(target).def_key =
            static_cast<uint64_t>(cs_.canonical(bound[j])) + 1;
        if (assert_definition(target, bound[j])) step_added_constraints_ = true;
        recs.push_back(
            {target, bound[j], collect_placeholders(cs_, bound[j])});
      }
    }
    steps_.push_back(std::move(recs));
    frontier_inst_ = std::move(bindings);
    cur_node_ = child;
    ++position_;

    auto& cache = nodes_[cur_node_].sat_hashes;
    if (hit && !step_added_constraints_ && cache.count(enc_hash_)) {
      ++stats_.sat_calls_skipped;
      return verdict_;
    }
    ++stats_.sat_calls;
    sync_solver_vars();
    if (solver_->solve() == sat::status::sat) {
      cache.insert(enc_hash_);
      return verdict_;
    }
    verdict_ = verdict::at(trace_index_, pos);
    return verdict_;
  }

  // Flat store: per-trace variables, one constraint system per trace as in
  // the base algorithm.
  std::vector<std::pair<polarity, formula>> next_obl;
  std::vector<uint32_t> next_inst;
  std::unordered_set<uint32_t> seen;
  auto resolve = [this](polarity pol, formula f, uint32_t p) {
    return mint_instance(pol, f, p, flat_scope_, false);
  };
  for (size_t j = 0; j < frontier_obl_.size(); ++j) {
    cref body = rewrite_event(cs_, fs_, frontier_obl_[j].second, e, pos,
                              resolve);
    uint32_t target = frontier_inst_[j];
    placeholder& tp = cs_.inst(target);
    if (tp.def_key == 0) {
      tp.def_key = static_cast<uint64_t>(cs_.canonical(body)) + 1;
      assert_definition(target, body);
    }
    for (uint32_t id : collect_placeholders(cs_, body)) {
      if (!seen.insert(id).second) continue;
      const placeholder& p = cs_.inst(id);
      next_obl.emplace_back(p.pol, p.f);
      next_inst.push_back(id);
    }
  }
  frontier_obl_ = std::move(next_obl);
  frontier_inst_ = std::move(next_inst);
  ++position_;
  ++stats_.sat_calls;
  sync_solver_vars();
  if (solver_->solve() == sat::status::unsat)
    verdict_ = verdict::at(trace_index_, pos);
  return verdict_;
}

void monitor_session::close_current_trace() {
  open_ = false;
  steps_.clear();
  frontier_obl_.clear();
  frontier_inst_.clear();
  trace_stash_.clear();
  solver_.reset();
  ++trace_index_;
}

verdict monitor_session::end_trace() {
  if (!open_) throw std::logic_error("end_trace: no open trace");
  if (verdict_.violation) {
    close_current_trace();
    return verdict_;
  }
  if (position_ == 0)
    throw std::invalid_argument(
        "end_trace: traces must contain at least one event");

  step_added_constraints_ = false;
  if (cfg_.node_tree) {
    for (size_t k = 0; k < frontier_inst_.size(); ++k) {
      placeholder& p = cs_.inst(frontier_inst_[k]);
      if (p.pinned) continue;
      p.pinned = true;
      assert_unit_persistent(frontier_inst_[k], p.pol == polarity::strong);
      step_added_constraints_ = true;
    }
    auto& cache = nodes_[cur_node_].end_sat_hashes;
    if (!step_added_constraints_ && cache.count(enc_hash_)) {
      ++stats_.sat_calls_skipped;
    } else {
      ++stats_.sat_calls;
      sync_solver_vars();
      if (solver_->solve() == sat::status::sat) {
        cache.insert(enc_hash_);
      } else {
        verdict_ = verdict::at(trace_index_, position_ - 1);
      }
    }
  } else {
    std::vector<cnf_clause> cls;
    for (size_t k = 0; k < frontier_inst_.size(); ++k) {
      const placeholder& p = cs_.inst(frontier_inst_[k]);
      enc_.assert_top(cs_.pvar(frontier_inst_[k], p.pol == polarity::strong),
                      cls);
    }
    push_clauses(cls, true);
    ++stats_.sat_calls;
    sync_solver_vars();
    if (solver_->solve() == sat::status::unsat)
      verdict_ = verdict::at(trace_index_, position_ - 1);
    if (!verdict_.violation)
      committed_.insert(committed_.end(), trace_stash_.begin(),
                        trace_stash_.end());
  }
  close_current_trace();
  return verdict_;
}

std::pair<verdict, monitor_stats> monitor_session::finish() {
  if (open_) throw std::logic_error("finish: a trace is still open");
  return {verdict_, stats_};
}

void monitor_session::write_dimacs(std::ostream& out) const {
  hypermon::write_dimacs(out, committed_, enc_);
}

std::pair<verdict, monitor_stats> monitor_offline(formula_store& fs,
                                                  const spec& s,
                                                  std::span<const trace> traces,
                                                  monitor_config cfg) {
  monitor_session session(fs, s, std::move(cfg));
  for (const trace& t : traces) {
    session.begin_trace();
    for (const event& e : t.events)
      if (session.feed_event(e).violation) break;
    session.end_trace();
    if (session.current().violation) break;
  }
  return session.finish();
}

}  // namespace hypermon
