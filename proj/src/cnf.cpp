#include "hypermon/cnf.hpp"

#include <ostream>
#include <stdexcept>

namespace hypermon {

sat::var cnf_encoder::fresh(std::string name) {
  names_.push_back(std::move(name));
  return next_var_++;
}

sat::var cnf_encoder::prop_variable(uint32_t prop, uint32_t position) {
  uint64_t key = (static_cast<uint64_t>(prop) << 32) | position;
  auto it = prop_vars_.find(key);
  if (it != prop_vars_.end()) return it->second;
  sat::var v = fresh(fs_.prop_name(prop) + "@" + std::to_string(position));
  prop_vars_.emplace(key, v);
  var_hints_.emplace_back(v, 1);
  return v;
}

sat::var cnf_encoder::placeholder_variable(uint32_t instance) {
  auto it = inst_vars_.find(instance);
  if (it != inst_vars_.end()) return it->second;
  const placeholder& p = cs_.inst(instance);
  std::string name = p.pol == polarity::strong ? "v-" : "v+";
  name += std::to_string(instance) + "@" + std::to_string(p.position);
  sat::var v = fresh(std::move(name));
  inst_vars_.emplace(instance, v);
  var_hints_.emplace_back(v, p.pol == polarity::weak ? 2 : 3);
  return v;
}

sat::lit cnf_encoder::arg_literal(cref c, std::vector<cnf_clause>& out) {
  const cnode& n = cs_.node(c);
  switch (n.kind) {
    case cop::prop:
      return sat::lit::make(prop_variable(n.sym, n.position), n.neg);
    case cop::pvar:
      return sat::lit::make(placeholder_variable(n.sym), n.neg);
    case cop::conj:
    case cop::disj: {
      auto it = aux_vars_.find(c);
      if (it != aux_vars_.end()) return sat::lit::make(it->second);
      sat::var x = fresh("aux" + std::to_string(c));
      aux_vars_.emplace(c, x);
      if (n.kind == cop::conj) {
        for (cref k : n.kids)
          out.push_back({sat::lit::make(x, true), arg_literal(k, out)});
      } else {
        cnf_clause cl{sat::lit::make(x, true)};
        for (cref k : n.kids) cl.push_back(arg_literal(k, out));
        out.push_back(std::move(cl));
      }
      return sat::lit::make(x);
    }
    default:
      throw std::logic_error("cnf: constants and implications cannot be "
                             "operands");
  }
}

void cnf_encoder::assert_top(cref c, std::vector<cnf_clause>& out) {
  const cnode& n = cs_.node(c);
  switch (n.kind) {
    case cop::ctrue:
      return;
    case cop::cfalse:
      out.push_back({});  // empty clause: unsatisfiable
      return;
    case cop::prop:
    case cop::pvar:
      out.push_back({arg_literal(c, out)});
      return;
    case cop::conj:
      for (cref k : n.kids) assert_top(k, out);
      return;
    case cop::disj: {
      cnf_clause cl;
      cl.reserve(n.kids.size());
      for (cref k : n.kids) cl.push_back(arg_literal(k, out));
      out.push_back(std::move(cl));
      return;
    }
    case cop::impl: {
      sat::lit guard = sat::lit::make(placeholder_variable(n.sym), true);
      const cnode& rhs = cs_.node(n.kids[0]);
      if (rhs.kind == cop::ctrue) return;
      if (rhs.kind == cop::cfalse) {
        out.push_back({guard});
        return;
      }
      if (rhs.kind == cop::conj) {
        for (cref k : rhs.kids)
          out.push_back({guard, arg_literal(k, out)});
        return;
      }
      if (rhs.kind == cop::disj) {
        cnf_clause cl{guard};
        for (cref k : rhs.kids) cl.push_back(arg_literal(k, out));
        out.push_back(std::move(cl));
        return;
      }
      out.push_back({guard, arg_literal(n.kids[0], out)});
      return;
    }
  }
}

void write_dimacs(std::ostream& out, const std::vector<cnf_clause>& clauses,
                  const cnf_encoder& enc) {
  for (sat::var v = 0; v < enc.variable_count(); ++v)
    out << "c " << (v + 1) << " " << enc.variable_name(v) << "\n";
  out << "p cnf " << enc.variable_count() << " " << clauses.size() << "\n";
  for (const cnf_clause& cl : clauses) {
    for (sat::lit l : cl)
      out << (l.negated() ? -(l.variable() + 1) : (l.variable() + 1)) << " ";
    out << "0\n";
  }
}

}  // namespace hypermon
