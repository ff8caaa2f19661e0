#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypermon/formula.hpp"
#include "hypermon/trace.hpp"

namespace hypermon {

/// Placeholder polarity: strong obligations default to false when the trace
/// ends, weak ones to true.
enum class polarity : uint8_t { strong, weak };

/// An obligation of a subformula at a trace position. `scope` separates
/// instances of the same (polarity, formula, position) triple that belong
/// to different rewrite histories: scope 0 is the canonical space used by
/// the pure operations, scope 1 holds chain variables shared across traces,
/// higher scopes are minted per history by the monitor.
struct placeholder {
  polarity pol = polarity::strong;
  formula f{};
  uint32_t position = 0;
  uint32_t scope = 0;
  bool forced = false;   // holds in every model: eligible for global sharing
  bool pinned = false;   // end-of-trace unit already committed
  uint64_t def_key = 0;  // canonical key of the defining body, 0 = undefined
};

enum class cop : uint8_t { ctrue, cfalse, prop, pvar, conj, disj, impl };

using cref = uint32_t;
inline constexpr cref k_true = 0;
inline constexpr cref k_false = 1;

struct cnode {
  cop kind = cop::ctrue;
  bool neg = false;        // prop / pvar literals
  uint32_t sym = 0;        // prop id | placeholder id | impl lhs placeholder
  uint32_t position = 0;   // prop only
  std::vector<cref> kids;  // conj/disj children; impl rhs at kids[0]
};

/// Hash-consing store for propositional constraints plus the placeholder
/// instance table. Conjunction/disjunction constructors absorb constants
/// but never reorder operands; canonical() additionally sorts commutative
/// operands so that structurally equivalent results share one key.
class constraint_store {
public:
  constraint_store();

  cref constant(bool v) const { return v ? k_true : k_false; }
  cref prop_lit(uint32_t prop, uint32_t position, bool neg = false);
  cref pvar(uint32_t instance, bool neg = false);
  cref conj(std::vector<cref> kids);
  cref disj(std::vector<cref> kids);
  cref impl(uint32_t lhs_instance, cref rhs);

  const cnode& node(cref c) const { return nodes_[c]; }

  /// Canonical representative: commutative operands sorted recursively.
  cref canonical(cref c);

  uint32_t instance(polarity pol, formula f, uint32_t position,
                    uint32_t scope);
  placeholder& inst(uint32_t id) { return instances_[id]; }
  const placeholder& inst(uint32_t id) const { return instances_[id]; }
  size_t instance_count() const { return instances_.size(); }

  size_t size() const { return nodes_.size(); }

private:
  cref intern(cnode n);

  std::vector<cnode> nodes_;
  std::unordered_map<uint64_t, std::vector<cref>> index_;
  std::vector<placeholder> instances_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> instance_index_;
  std::unordered_map<cref, cref> canon_;
};

/// Maps an open obligation to the placeholder instance that stands for it.
using placeholder_resolver =
    std::function<uint32_t(polarity, formula, uint32_t)>;

/// Resolver for the canonical (scope 0) instance space.
placeholder_resolver canonical_resolver(constraint_store& cs);

/// One rewrite step: partially evaluates a core-NNF body against the event
/// at the given position. First-trace atoms resolve to constants, second-
/// trace atoms become position-indexed proposition literals, temporal
/// operators emit placeholder variables for the next position. Constant
/// absorption is applied; no other simplification. weak_until, globally and
/// finally_ over NNF operands are accepted and unroll with the polarity of
/// their core expansion.
cref rewrite_event(constraint_store& cs, const formula_store& fs, formula body,
                   const event& e, uint32_t position,
                   const placeholder_resolver& resolve);
cref rewrite_event(constraint_store& cs, const formula_store& fs, formula body,
                   const event& e, uint32_t position);

/// Position-indexed unit conjunction for one event over the alphabet:
/// a_i for present propositions, !a_i for absent ones.
cref encode_event(constraint_store& cs, formula_store& fs, const event& e,
                  const alphabet& ap, uint32_t position);

/// Full-trace encoding starting at position `from`.
cref encode_trace(constraint_store& cs, formula_store& fs, const trace& t,
                  const alphabet& ap, uint32_t from = 0);

/// Placeholder instances occurring in c, in first-occurrence order.
std::vector<uint32_t> collect_placeholders(const constraint_store& cs, cref c);

/// End-of-trace closure: weak placeholders are asserted, strong ones denied.
std::vector<cref> closure_units(constraint_store& cs,
                                std::span<const uint32_t> instances);

/// Non-incremental construction of the full constraint system of a body
/// against a finite trace: the initial rewrite, one definitional
/// implication per placeholder and position, and the closure units.
cref batch_constraints(constraint_store& cs, const formula_store& fs,
                       formula body, const trace& t);

/// Renames every positional index (propositions and placeholders) upward
/// by `offset`.
cref shift_positions(constraint_store& cs, cref c, uint32_t offset);

/// Top-level conjunct decomposition: nested conjunctions are flattened,
/// `true` yields the empty list.
std::vector<cref> split_conjuncts(const constraint_store& cs, cref c);

/// Placeholders appearing as bare top-level conjuncts of c: these are
/// consequences of asserting c.
std::vector<uint32_t> bare_placeholders(const constraint_store& cs, cref c);

/// Rebuilds c with placeholder instances replaced per `map` (absent ids
/// unchanged).
cref substitute_placeholders(constraint_store& cs, cref c,
                             const std::unordered_map<uint32_t, uint32_t>& map);

std::string print_constraint(const constraint_store& cs,
                             const formula_store& fs, cref c);

}  // namespace hypermon
