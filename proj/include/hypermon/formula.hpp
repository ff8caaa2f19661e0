#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hypermon {

/// Connectives of the input logic. desugar() removes implies, iff,
/// weak_until, globally and finally_; to_nnf() additionally pushes
/// negation onto atoms, leaving the core set
/// {tt, ff, atom, not_(atom), and_, or_, next, weak_next, until, release}.
enum class op : uint8_t {
  tt,
  ff,
  atom,
  not_,
  and_,
  or_,
  implies,
  iff,
  next,       // strong: requires a successor position
  weak_next,  // weak: satisfied at the last position
  until,
  release,
  weak_until,
  globally,
  finally_,
};

/// Which of the two quantified traces an atom observes. `none` marks
/// single-trace atoms as produced by project().
enum class trace_side : uint8_t { first, second, none };

/// Handle into a formula_store. Structurally equal formulas receive the
/// same id, so ids double as canonical subformula identities.
struct formula {
  uint32_t id = UINT32_MAX;
  constexpr bool valid() const { return id != UINT32_MAX; }
  friend constexpr bool operator==(formula, formula) = default;
};

struct formula_node {
  op kind = op::tt;
  trace_side side = trace_side::none;  // atoms only
  uint32_t prop = 0;                   // atoms only: index into prop table
  formula lhs{};                       // unary child or left child
  formula rhs{};                       // right child
};

/// Hash-consing store for formula nodes. Children keep their given order;
/// commutative operands are never reordered, so printing and structural
/// golden tests see formulas exactly as built.
class formula_store {
public:
  formula_store();

  formula constant(bool value) const { return value ? formula{0} : formula{1}; }
  formula make_atom(std::string_view prop, trace_side side);
  formula make_unary(op kind, formula child);
  formula make_binary(op kind, formula lhs, formula rhs);

  const formula_node& node(formula f) const { return nodes_[f.id]; }
  bool is_atom_literal(formula f) const;  // atom or not_(atom)

  uint32_t prop_id(std::string_view name);            // interning
  int find_prop(std::string_view name) const;         // -1 if unknown
  const std::string& prop_name(uint32_t id) const { return props_[id]; }
  uint32_t prop_count() const { return static_cast<uint32_t>(props_.size()); }

  size_t size() const { return nodes_.size(); }

private:
  formula intern(const formula_node& n);

  std::vector<formula_node> nodes_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> index_;
  std::vector<std::string> props_;
  std::unordered_map<std::string, uint32_t> prop_index_;
};

/// A two-trace specification: universally quantified pair of trace
/// variables plus a quantifier-free body over side-tagged atoms.
struct spec {
  std::string var_first;
  std::string var_second;
  formula body{};
  std::vector<std::string> alphabet;  // sorted prop names occurring in body
};

struct parse_error : std::runtime_error {
  size_t position;
  parse_error(const std::string& msg, size_t pos)
      : std::runtime_error(msg), position(pos) {}
};

/// Parses `forall v1, v2. <body>`. Operators: ! & | -> <-> X WX U R W G F,
/// atoms `prop_v1` / `prop_v2`, parentheses, `true`/`false`, `#` line
/// comments. Precedence: unary > U/R/W > & > | > -> > <->; the temporal
/// binaries, -> and <-> are right-associative. Throws parse_error.
spec parse_spec(formula_store& fs, std::string_view text);

std::string print_formula(const formula_store& fs, formula f,
                          std::string_view first = "p1",
                          std::string_view second = "p2");
std::string print_spec(const formula_store& fs, const spec& s);

/// Rewrites implies, iff, weak_until, globally and finally_ into the core
/// operator set: a->b = !a|b, a<->b = (!a|b)&(!b|a), F a = true U a,
/// G a = false R a, a W b = b R (a|b).
formula desugar(formula_store& fs, formula f);

/// Negation normal form via the strong/weak next and until/release
/// dualities. Expects a desugared input.
formula to_nnf(formula_store& fs, formula f);

/// Exchanges the trace side of every atom.
formula swap_sides(formula_store& fs, formula f);

/// f && swap_sides(f).
formula symmetric_closure(formula_store& fs, formula f);

bool is_desugared(const formula_store& fs, formula f);
bool is_core_nnf(const formula_store& fs, formula f);

/// Sorted names of propositions occurring in f.
std::vector<std::string> collect_alphabet(const formula_store& fs, formula f);

}  // namespace hypermon
