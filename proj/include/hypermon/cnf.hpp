#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypermon/constraint.hpp"
#include "hypermon/sat.hpp"

namespace hypermon {

using cnf_clause = std::vector<sat::lit>;

/// Definitional CNF conversion for constraint formulas. Compound subterms
/// occur only positively, so each auxiliary variable is defined by its
/// implication side alone. Auxiliaries are keyed by subformula identity:
/// converting the same conjunct twice emits no new clauses.
class cnf_encoder {
public:
  cnf_encoder(constraint_store& cs, const formula_store& fs)
      : cs_(cs), fs_(fs) {}

  /// Emits clauses asserting c into `out`.
  void assert_top(cref c, std::vector<cnf_clause>& out);

  sat::var prop_variable(uint32_t prop, uint32_t position);
  sat::var placeholder_variable(uint32_t instance);

  int variable_count() const { return next_var_; }
  const std::string& variable_name(sat::var v) const {
    return names_[static_cast<size_t>(v)];
  }
  /// Decision hints per variable: 1 = position-indexed proposition,
  /// 2 = weak placeholder, 3 = strong placeholder.
  const std::vector<std::pair<sat::var, uint8_t>>& variable_hints() const {
    return var_hints_;
  }

private:
  sat::lit arg_literal(cref c, std::vector<cnf_clause>& out);
  sat::var fresh(std::string name);

  constraint_store& cs_;
  const formula_store& fs_;
  std::unordered_map<uint64_t, sat::var> prop_vars_;
  std::vector<std::pair<sat::var, uint8_t>> var_hints_;
  std::unordered_map<uint32_t, sat::var> inst_vars_;
  std::unordered_map<cref, sat::var> aux_vars_;
  std::vector<std::string> names_;
  sat::var next_var_ = 0;
};

/// Standard DIMACS with one comment line per named variable.
void write_dimacs(std::ostream& out, const std::vector<cnf_clause>& clauses,
                  const cnf_encoder& enc);

}  // namespace hypermon
