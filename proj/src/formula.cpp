#include "hypermon/formula.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace hypermon {

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

uint64_t node_hash(const formula_node& n) {
  uint64_t h = static_cast<uint64_t>(n.kind);
  h = mix(h, static_cast<uint64_t>(n.side));
  h = mix(h, n.prop);
  h = mix(h, n.lhs.id);
  h = mix(h, n.rhs.id);
  return h;
}

bool node_eq(const formula_node& a, const formula_node& b) {
  return a.kind == b.kind && a.side == b.side && a.prop == b.prop &&
         a.lhs == b.lhs && a.rhs == b.rhs;
}

[[maybe_unused]] bool is_unary(op k) {
  return k == op::not_ || k == op::next || k == op::weak_next ||
         k == op::globally || k == op::finally_;
}

[[maybe_unused]] bool is_binary(op k) {
  return k == op::and_ || k == op::or_ || k == op::implies || k == op::iff ||
         k == op::until || k == op::release || k == op::weak_until;
}

}  // namespace

formula_store::formula_store() {
  intern(formula_node{op::tt, trace_side::none, 0, {}, {}});  // id 0
  intern(formula_node{op::ff, trace_side::none, 0, {}, {}});  // id 1
}

formula formula_store::intern(const formula_node& n) {
  auto& bucket = index_[node_hash(n)];
  for (uint32_t id : bucket)
    if (node_eq(nodes_[id], n)) return formula{id};
  uint32_t id = static_cast<uint32_t>(nodes_.size());
  nodes_.push_back(n);
  bucket.push_back(id);
  return formula{id};
}

formula formula_store::make_atom(std::string_view prop, trace_side side) {
  formula_node n;
  n.kind = op::atom;
  n.side = side;
  n.prop = prop_id(prop);
  return intern(n);
}

formula formula_store::make_unary(op kind, formula child) {
  assert(is_unary(kind) && child.valid());
  formula_node n;
  n.kind = kind;
  n.lhs = child;
  return intern(n);
}

formula formula_store::make_binary(op kind, formula lhs, formula rhs) {
  assert(is_binary(kind) && lhs.valid() && rhs.valid());
  formula_node n;
  n.kind = kind;
  n.lhs = lhs;
  n.rhs = rhs;
  return intern(n);
}

bool formula_store::is_atom_literal(formula f) const {
  const formula_node& n = node(f);
  if (n.kind == op::atom) return true;
  return n.kind == op::not_ && node(n.lhs).kind == op::atom;
}

uint32_t formula_store::prop_id(std::string_view name) {
  auto it = prop_index_.find(std::string(name));
  if (it != prop_index_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(props_.size());
  props_.emplace_back(name);
  prop_index_.emplace(props_.back(), id);
  return id;
}

int formula_store::find_prop(std::string_view name) const {
  auto it = prop_index_.find(std::string(name));
  return it == prop_index_.end() ? -1 : static_cast<int>(it->second);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class tok : uint8_t {
  end, lparen, rparen, comma, dot,
  bang, amp, pipe, arrow, darrow,
  kw_forall, kw_true, kw_false,
  kw_next, kw_weak_next, kw_until, kw_release, kw_weak_until,
  kw_globally, kw_finally,
  word,
};

struct token {
  tok kind;
  std::string_view text;
  size_t pos;
};

class lexer {
public:
  explicit lexer(std::string_view src) : src_(src) { advance(); }

  const token& peek() const { return cur_; }
  token take() {
    token t = cur_;
    advance();
    return t;
  }

private:
  void advance() {
    skip_ws();
    size_t p = pos_;
    if (p >= src_.size()) {
      cur_ = {tok::end, {}, p};
      return;
    }
    char c = src_[p];
    auto simple = [&](tok k, size_t len) {
      cur_ = {k, src_.substr(p, len), p};
      pos_ = p + len;
    };
    switch (c) {
      case '(': simple(tok::lparen, 1); return;
      case ')': simple(tok::rparen, 1); return;
      case ',': simple(tok::comma, 1); return;
      case '.': simple(tok::dot, 1); return;
      case '!': simple(tok::bang, 1); return;
      case '&': simple(tok::amp, 1); return;
      case '|': simple(tok::pipe, 1); return;
      case '-':
        if (p + 1 < src_.size() && src_[p + 1] == '>') { simple(tok::arrow, 2); return; }
        throw parse_error("unexpected '-'", p);
      case '<':
        if (p + 2 < src_.size() && src_[p + 1] == '-' && src_[p + 2] == '>') {
          simple(tok::darrow, 3);
          return;
        }
        throw parse_error("unexpected '<'", p);
      default: break;
    }
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t e = p;
      while (e < src_.size() &&
             (isalnum(static_cast<unsigned char>(src_[e])) || src_[e] == '_'))
        ++e;
      std::string_view w = src_.substr(p, e - p);
      tok k = tok::word;
      if (w == "forall") k = tok::kw_forall;
      else if (w == "true") k = tok::kw_true;
      else if (w == "false") k = tok::kw_false;
      else if (w == "X") k = tok::kw_next;
      else if (w == "WX") k = tok::kw_weak_next;
      else if (w == "U") k = tok::kw_until;
      else if (w == "R") k = tok::kw_release;
      else if (w == "W") k = tok::kw_weak_until;
      else if (w == "G") k = tok::kw_globally;
      else if (w == "F") k = tok::kw_finally;
      cur_ = {k, w, p};
      pos_ = e;
      return;
    }
    throw parse_error(std::string("unexpected character '") + c + "'", p);
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
  token cur_{tok::end, {}, 0};
};

class parser {
public:
  parser(formula_store& fs, std::string_view src) : fs_(fs), lex_(src) {}

  spec parse() {
    expect(tok::kw_forall, "expected 'forall'");
    spec s;
    s.var_first = ident("expected trace variable");
    if (lex_.peek().kind != tok::comma)
      throw parse_error("unsupported fragment: exactly two universally "
                        "quantified trace variables are required",
                        lex_.peek().pos);
    lex_.take();
    s.var_second = ident("expected second trace variable");
    if (s.var_first == s.var_second)
      throw parse_error("trace variables must be distinct", lex_.peek().pos);
    if (lex_.peek().kind == tok::comma)
      throw parse_error("unsupported fragment: exactly two universally "
                        "quantified trace variables are required",
                        lex_.peek().pos);
    expect(tok::dot, "expected '.' after quantifier prefix");
    vf_ = s.var_first;
    vs_ = s.var_second;
    s.body = iff_expr();
    if (lex_.peek().kind != tok::end)
      throw parse_error("trailing input after formula", lex_.peek().pos);
    s.alphabet = collect_alphabet(fs_, s.body);
    return s;
  }

private:
  void expect(tok k, const char* msg) {
    if (lex_.peek().kind != k) throw parse_error(msg, lex_.peek().pos);
    lex_.take();
  }

  std::string ident(const char* msg) {
    if (lex_.peek().kind != tok::word) throw parse_error(msg, lex_.peek().pos);
    return std::string(lex_.take().text);
  }

  formula iff_expr() {
    formula l = imp_expr();
    if (lex_.peek().kind == tok::darrow) {
      lex_.take();
      return fs_.make_binary(op::iff, l, iff_expr());
    }
    return l;
  }

  formula imp_expr() {
    formula l = or_expr();
    if (lex_.peek().kind == tok::arrow) {
      lex_.take();
      return fs_.make_binary(op::implies, l, imp_expr());
    }
    return l;
  }

  formula or_expr() {
    formula l = and_expr();
    while (lex_.peek().kind == tok::pipe) {
      lex_.take();
      l = fs_.make_binary(op::or_, l, and_expr());
    }
    return l;
  }

  formula and_expr() {
    formula l = temporal_expr();
    while (lex_.peek().kind == tok::amp) {
      lex_.take();
      l = fs_.make_binary(op::and_, l, temporal_expr());
    }
    return l;
  }

  formula temporal_expr() {
    formula l = unary_expr();
    tok k = lex_.peek().kind;
    if (k == tok::kw_until || k == tok::kw_release || k == tok::kw_weak_until) {
      lex_.take();
      op o = k == tok::kw_until ? op::until
           : k == tok::kw_release ? op::release
                                  : op::weak_until;
      return fs_.make_binary(o, l, temporal_expr());
    }
    return l;
  }

  formula unary_expr() {
    switch (lex_.peek().kind) {
      case tok::bang:
        lex_.take();
        return fs_.make_unary(op::not_, unary_expr());
      case tok::kw_next:
        lex_.take();
        return fs_.make_unary(op::next, unary_expr());
      case tok::kw_weak_next:
        lex_.take();
        return fs_.make_unary(op::weak_next, unary_expr());
      case tok::kw_globally:
        lex_.take();
        return fs_.make_unary(op::globally, unary_expr());
      case tok::kw_finally:
        lex_.take();
        return fs_.make_unary(op::finally_, unary_expr());
      default:
        return primary();
    }
  }

  formula primary() {
    const token& t = lex_.peek();
    switch (t.kind) {
      case tok::kw_true:
        lex_.take();
        return fs_.constant(true);
      case tok::kw_false:
        lex_.take();
        return fs_.constant(false);
      case tok::lparen: {
        lex_.take();
        formula f = iff_expr();
        expect(tok::rparen, "expected ')'");
        return f;
      }
      case tok::word:
        return atom();
      default:
        throw parse_error("expected formula", t.pos);
    }
  }

  formula atom() {
    token t = lex_.take();
    std::string_view w = t.text;
    size_t us = w.rfind('_');
    if (us == std::string_view::npos || us == 0)
      throw parse_error("atom '" + std::string(w) +
                            "' does not name a declared trace variable",
                        t.pos);
    std::string_view prop = w.substr(0, us);
    std::string_view tv = w.substr(us + 1);
    trace_side side;
    if (tv == vf_) side = trace_side::first;
    else if (tv == vs_) side = trace_side::second;
    else
      throw parse_error("atom '" + std::string(w) +
                            "' references undeclared trace variable '" +
                            std::string(tv) + "'",
                        t.pos);
    return fs_.make_atom(prop, side);
  }

  formula_store& fs_;
  lexer lex_;
  std::string vf_, vs_;
};

}  // namespace

spec parse_spec(formula_store& fs, std::string_view text) {
  return parser(fs, text).parse();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Higher binds tighter.
int precedence(op k) {
  switch (k) {
    case op::iff: return 0;
    case op::implies: return 1;
    case op::or_: return 2;
    case op::and_: return 3;
    case op::until:
    case op::release:
    case op::weak_until: return 4;
    default: return 5;  // unary and primary
  }
}

const char* op_text(op k) {
  switch (k) {
    case op::and_: return "&";
    case op::or_: return "|";
    case op::implies: return "->";
    case op::iff: return "<->";
    case op::until: return "U";
    case op::release: return "R";
    case op::weak_until: return "W";
    case op::next: return "X";
    case op::weak_next: return "WX";
    case op::globally: return "G";
    case op::finally_: return "F";
    default: return "?";
  }
}

void print_rec(const formula_store& fs, formula f, std::string_view first,
               std::string_view second, int parent_prec, bool tight,
               std::string& out) {
  const formula_node& n = fs.node(f);
  int prec = precedence(n.kind);
  switch (n.kind) {
    case op::tt: out += "true"; return;
    case op::ff: out += "false"; return;
    case op::atom:
      out += fs.prop_name(n.prop);
      if (n.side == trace_side::first) {
        out += '_';
        out += first;
      } else if (n.side == trace_side::second) {
        out += '_';
        out += second;
      }
      return;
    case op::not_:
      out += '!';
      print_rec(fs, n.lhs, first, second, prec, true, out);
      return;
    case op::next:
    case op::weak_next:
    case op::globally:
    case op::finally_:
      out += op_text(n.kind);
      out += ' ';
      print_rec(fs, n.lhs, first, second, prec, true, out);
      return;
    default: break;
  }
  bool parens = prec < parent_prec || (prec == parent_prec && tight);
  if (parens) out += '(';
  bool right_assoc = n.kind == op::implies || n.kind == op::iff ||
                     n.kind == op::until || n.kind == op::release ||
                     n.kind == op::weak_until;
  // The tight flag forces parentheses on the side where associativity
  // does not absorb an equal-precedence child.
  print_rec(fs, n.lhs, first, second, prec, right_assoc, out);
  out += ' ';
  out += op_text(n.kind);
  out += ' ';
  print_rec(fs, n.rhs, first, second, prec, !right_assoc, out);
  if (parens) out += ')';
}

}  // namespace

std::string print_formula(const formula_store& fs, formula f,
                          std::string_view first, std::string_view second) {
  std::string out;
  print_rec(fs, f, first, second, 0, false, out);
  return out;
}

std::string print_spec(const formula_store& fs, const spec& s) {
  std::string out = "forall " + s.var_first + ", " + s.var_second + ". ";
  out += print_formula(fs, s.body, s.var_first, s.var_second);
  return out;
}

// ---------------------------------------------------------------------------
// Transformations

formula desugar(formula_store& fs, formula f) {
  const formula_node n = fs.node(f);
  switch (n.kind) {
    case op::tt:
    case op::ff:
    case op::atom:
      return f;
    case op::not_:
      return fs.make_unary(op::not_, desugar(fs, n.lhs));
    case op::next:
    case op::weak_next:
      return fs.make_unary(n.kind, desugar(fs, n.lhs));
    case op::and_:
    case op::or_:
    case op::until:
    case op::release:
      return fs.make_binary(n.kind, desugar(fs, n.lhs), desugar(fs, n.rhs));
    case op::implies: {
      formula l = desugar(fs, n.lhs);
      formula r = desugar(fs, n.rhs);
      return fs.make_binary(op::or_, fs.make_unary(op::not_, l), r);
    }
    case op::iff: {
      formula l = desugar(fs, n.lhs);
      formula r = desugar(fs, n.rhs);
      formula lr = fs.make_binary(op::or_, fs.make_unary(op::not_, l), r);
      formula rl = fs.make_binary(op::or_, fs.make_unary(op::not_, r), l);
      return fs.make_binary(op::and_, lr, rl);
    }
    case op::finally_:
      return fs.make_binary(op::until, fs.constant(true), desugar(fs, n.lhs));
    case op::globally:
      return fs.make_binary(op::release, fs.constant(false), desugar(fs, n.lhs));
    case op::weak_until: {
      // a W b = b R (a | b)
      formula a = desugar(fs, n.lhs);
      formula b = desugar(fs, n.rhs);
      return fs.make_binary(op::release, b, fs.make_binary(op::or_, a, b));
    }
  }
  throw std::logic_error("desugar: unreachable");
}

namespace {

formula nnf_rec(formula_store& fs, formula f, bool positive) {
  const formula_node n = fs.node(f);
  switch (n.kind) {
    case op::tt:
      return fs.constant(positive);
    case op::ff:
      return fs.constant(!positive);
    case op::atom:
      return positive ? f : fs.make_unary(op::not_, f);
    case op::not_:
      return nnf_rec(fs, n.lhs, !positive);
    case op::and_:
      return fs.make_binary(positive ? op::and_ : op::or_,
                            nnf_rec(fs, n.lhs, positive),
                            nnf_rec(fs, n.rhs, positive));
    case op::or_:
      return fs.make_binary(positive ? op::or_ : op::and_,
                            nnf_rec(fs, n.lhs, positive),
                            nnf_rec(fs, n.rhs, positive));
    case op::next:
      return fs.make_unary(positive ? op::next : op::weak_next,
                           nnf_rec(fs, n.lhs, positive));
    case op::weak_next:
      return fs.make_unary(positive ? op::weak_next : op::next,
                           nnf_rec(fs, n.lhs, positive));
    case op::until:
      return fs.make_binary(positive ? op::until : op::release,
                            nnf_rec(fs, n.lhs, positive),
                            nnf_rec(fs, n.rhs, positive));
    case op::release:
      return fs.make_binary(positive ? op::release : op::until,
                            nnf_rec(fs, n.lhs, positive),
                            nnf_rec(fs, n.rhs, positive));
    default:
      throw std::logic_error("to_nnf expects a desugared formula");
  }
}

}  // namespace

formula to_nnf(formula_store& fs, formula f) { return nnf_rec(fs, f, true); }

formula swap_sides(formula_store& fs, formula f) {
  const formula_node n = fs.node(f);
  switch (n.kind) {
    case op::tt:
    case op::ff:
      return f;
    case op::atom: {
      trace_side s = n.side;
      if (s == trace_side::first) s = trace_side::second;
      else if (s == trace_side::second) s = trace_side::first;
      return fs.make_atom(fs.prop_name(n.prop), s);
    }
    case op::not_:
    case op::next:
    case op::weak_next:
    case op::globally:
    case op::finally_:
      return fs.make_unary(n.kind, swap_sides(fs, n.lhs));
    default:
      return fs.make_binary(n.kind, swap_sides(fs, n.lhs),
                            swap_sides(fs, n.rhs));
  }
}

formula symmetric_closure(formula_store& fs, formula f) {
  return fs.make_binary(op::and_, f, swap_sides(fs, f));
}

bool is_desugared(const formula_store& fs, formula f) {
  const formula_node& n = fs.node(f);
  switch (n.kind) {
    case op::tt:
    case op::ff:
    case op::atom:
      return true;
    case op::not_:
    case op::next:
    case op::weak_next:
      return is_desugared(fs, n.lhs);
    case op::and_:
    case op::or_:
    case op::until:
    case op::release:
      return is_desugared(fs, n.lhs) && is_desugared(fs, n.rhs);
    default:
      return false;
  }
}

bool is_core_nnf(const formula_store& fs, formula f) {
  const formula_node& n = fs.node(f);
  switch (n.kind) {
    case op::tt:
    case op::ff:
    case op::atom:
      return true;
    case op::not_:
      return fs.node(n.lhs).kind == op::atom;
    case op::next:
    case op::weak_next:
      return is_core_nnf(fs, n.lhs);
    case op::and_:
    case op::or_:
    case op::until:
    case op::release:
      return is_core_nnf(fs, n.lhs) && is_core_nnf(fs, n.rhs);
    default:
      return false;
  }
}

namespace {

void collect_props(const formula_store& fs, formula f,
                   std::vector<uint32_t>& out) {
  const formula_node& n = fs.node(f);
  switch (n.kind) {
    case op::tt:
    case op::ff:
      return;
    case op::atom:
      out.push_back(n.prop);
      return;
    case op::not_:
    case op::next:
    case op::weak_next:
    case op::globally:
    case op::finally_:
      collect_props(fs, n.lhs, out);
      return;
    default:
      collect_props(fs, n.lhs, out);
      collect_props(fs, n.rhs, out);
  }
}

}  // namespace

std::vector<std::string> collect_alphabet(const formula_store& fs, formula f) {
  std::vector<uint32_t> ids;
  collect_props(fs, f, ids);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::string> names;
  names.reserve(ids.size());
  for (uint32_t id : ids) names.push_back(fs.prop_name(id));
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace hypermon
