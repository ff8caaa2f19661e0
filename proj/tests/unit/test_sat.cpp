#include <doctest.h>

#include <random>

#include "hypermon/cnf.hpp"
#include "hypermon/sat.hpp"
#include "../testgen.hpp"

using namespace hypermon;
using sat::lit;

namespace {

// Bitmask-based exhaustive satisfiability for small clause sets.
bool brute_cnf_sat(int nvars, const std::vector<std::vector<lit>>& clauses) {
  for (uint64_t bits = 0; bits < (uint64_t{1} << nvars); ++bits) {
    bool ok = true;
    for (const auto& cl : clauses) {
      bool any = false;
      for (lit l : cl) {
        bool v = (bits >> l.variable()) & 1;
        if (v != l.negated()) {
          any = true;
          break;
        }
      }
      if (!any) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("unit propagation finds the model") {
  sat::solver s;
  sat::var a = s.new_var(), b = s.new_var();
  s.add_clause({lit::make(a)});
  s.add_clause({lit::make(a, true), lit::make(b)});
  REQUIRE(s.solve() == sat::status::sat);
  CHECK(s.model_value(a));
  CHECK(s.model_value(b));
}

TEST_CASE("contradicting units are unsatisfiable and sticky") {
  sat::solver s;
  sat::var a = s.new_var();
  s.add_clause({lit::make(a)});
  CHECK(s.solve() == sat::status::sat);
  s.add_clause({lit::make(a, true)});
  CHECK(s.solve() == sat::status::unsat);
  sat::var b = s.new_var();
  s.add_clause({lit::make(b)});
  CHECK(s.solve() == sat::status::unsat);
  CHECK(s.unsat_locked());
}

TEST_CASE("empty system is satisfiable") {
  sat::solver s;
  CHECK(s.solve() == sat::status::sat);
}

TEST_CASE("deterministic models") {
  auto run = [] {
    sat::solver s;
    std::vector<sat::var> vs;
    for (int i = 0; i < 12; ++i) vs.push_back(s.new_var());
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick(0, 11), sign(0, 1), width(1, 3);
    for (int c = 0; c < 30; ++c) {
      std::vector<lit> cl;
      int w = width(rng);
      for (int k = 0; k < w; ++k)
        cl.push_back(lit::make(vs[static_cast<size_t>(pick(rng))],
                               sign(rng) == 1));
      s.add_clause(cl);
      s.solve();
    }
    std::vector<bool> model;
    if (s.solve() == sat::status::sat)
      for (int i = 0; i < 12; ++i) model.push_back(s.model_value(vs[i]));
    return model;
  };
  CHECK(run() == run());
}

TEST_CASE("random clause sets match exhaustive enumeration") {
  std::mt19937_64 rng(101);
  for (int round = 0; round < 300; ++round) {
    std::uniform_int_distribution<int> nv(1, 14), nc(1, 40), width(1, 4);
    int vars = nv(rng);
    int count = nc(rng);
    std::vector<std::vector<lit>> clauses;
    sat::solver s;
    for (int i = 0; i < vars; ++i) s.new_var();
    std::uniform_int_distribution<int> pick(0, vars - 1), sign(0, 1);
    for (int c = 0; c < count; ++c) {
      std::vector<lit> cl;
      int w = width(rng);
      for (int k = 0; k < w; ++k)
        cl.push_back(lit::make(pick(rng), sign(rng) == 1));
      clauses.push_back(cl);
      s.add_clause(cl);
    }
    bool expect = brute_cnf_sat(vars, clauses);
    REQUIRE((s.solve() == sat::status::sat) == expect);
  }
}

TEST_CASE("incremental solving equals solving from scratch") {
  std::mt19937_64 rng(103);
  for (int round = 0; round < 120; ++round) {
    std::uniform_int_distribution<int> nv(2, 12), batches(2, 8), width(1, 3);
    int vars = nv(rng);
    sat::solver inc;
    for (int i = 0; i < vars; ++i) inc.new_var();
    std::vector<std::vector<lit>> all;
    std::uniform_int_distribution<int> pick(0, vars - 1), sign(0, 1), sz(1, 6);
    int nb = batches(rng);
    for (int b = 0; b < nb; ++b) {
      int grow = sz(rng);
      for (int c = 0; c < grow; ++c) {
        std::vector<lit> cl;
        int w = width(rng);
        for (int k = 0; k < w; ++k)
          cl.push_back(lit::make(pick(rng), sign(rng) == 1));
        all.push_back(cl);
        inc.add_clause(cl);
      }
      sat::solver fresh;
      for (int i = 0; i < vars; ++i) fresh.new_var();
      for (const auto& cl : all) fresh.add_clause(cl);
      REQUIRE(inc.solve() == fresh.solve());
    }
  }
}

TEST_CASE("cnf encoding of units and implications") {
  formula_store fs;
  constraint_store cs;
  cnf_encoder enc(cs, fs);
  uint32_t a = fs.prop_id("a");
  uint32_t b = fs.prop_id("b");

  std::vector<cnf_clause> out;
  enc.assert_top(cs.conj({cs.prop_lit(a, 0), cs.prop_lit(b, 0, true)}), out);
  REQUIRE(out.size() == 2);  // two unit clauses
  CHECK(out[0].size() == 1);
  CHECK(out[1].size() == 1);

  out.clear();
  uint32_t v = cs.instance(polarity::strong,
                           fs.make_atom("a", trace_side::second), 1, 0);
  enc.assert_top(cs.impl(v, cs.disj({cs.prop_lit(a, 1), cs.prop_lit(b, 1)})),
                 out);
  REQUIRE(out.size() == 1);  // (!v | a | b)
  CHECK(out[0].size() == 3);
}

TEST_CASE("auxiliary variables are reused across conversions") {
  formula_store fs;
  constraint_store cs;
  cnf_encoder enc(cs, fs);
  uint32_t a = fs.prop_id("a");
  uint32_t b = fs.prop_id("b");
  cref mixed = cs.disj(
      {cs.prop_lit(a, 0), cs.conj({cs.prop_lit(b, 0), cs.prop_lit(a, 1)})});

  std::vector<cnf_clause> first, second;
  enc.assert_top(mixed, first);
  enc.assert_top(mixed, second);
  // the definition clauses of the nested conjunction are emitted once
  CHECK(second.size() < first.size());
  CHECK(second.size() == 1);
}

TEST_CASE("cnf conversion is equisatisfiable") {
  std::mt19937_64 rng(107);
  formula_store fs;
  for (int round = 0; round < 200; ++round) {
    constraint_store cs;
    // random constraint over a few props/positions and two placeholders
    std::function<cref(int)> gen = [&](int depth) -> cref {
      std::uniform_int_distribution<int> kind(0, 5);
      std::uniform_int_distribution<int> prop(0, 1);
      std::uniform_int_distribution<int> pos(0, 2);
      std::uniform_int_distribution<int> sign(0, 1);
      if (depth <= 0 || kind(rng) < 2) {
        uint32_t p = fs.prop_id(prop(rng) ? "a" : "b");
        return cs.prop_lit(p, static_cast<uint32_t>(pos(rng)), sign(rng));
      }
      int k = kind(rng);
      if (k < 4)
        return cs.conj({gen(depth - 1), gen(depth - 1)});
      return cs.disj({gen(depth - 1), gen(depth - 1)});
    };
    cref c = gen(4);
    bool expect = testgen::brute_sat(cs, c);

    cnf_encoder enc(cs, fs);
    std::vector<cnf_clause> clauses;
    enc.assert_top(c, clauses);
    sat::solver s;
    s.ensure_vars(enc.variable_count());
    for (const auto& cl : clauses) s.add_clause(cl);
    REQUIRE((s.solve() == sat::status::sat) == expect);
  }
}
