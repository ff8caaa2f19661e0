#include <doctest.h>

#include "hypermon/formula.hpp"
#include "hypermon/semantics.hpp"
#include "../testgen.hpp"

using namespace hypermon;

TEST_CASE("parse observational determinism") {
  formula_store fs;
  spec s = parse_spec(
      fs, "forall p1,p2. G((out_p1 <-> out_p2) W !(in_p1 <-> in_p2))");
  CHECK(s.var_first == "p1");
  CHECK(s.var_second == "p2");
  CHECK(s.alphabet == std::vector<std::string>{"in", "out"});

  formula out1 = fs.make_atom("out", trace_side::first);
  formula out2 = fs.make_atom("out", trace_side::second);
  formula in1 = fs.make_atom("in", trace_side::first);
  formula in2 = fs.make_atom("in", trace_side::second);
  formula expected = fs.make_unary(
      op::globally,
      fs.make_binary(op::weak_until, fs.make_binary(op::iff, out1, out2),
                     fs.make_unary(op::not_, fs.make_binary(op::iff, in1, in2))));
  CHECK(s.body == expected);
}

TEST_CASE("parse single atom") {
  formula_store fs;
  spec s = parse_spec(fs, "forall p1, p2. a_p1");
  CHECK(s.body == fs.make_atom("a", trace_side::first));
  CHECK(s.alphabet == std::vector<std::string>{"a"});
}

TEST_CASE("parse rejects non-two-quantifier prefixes") {
  formula_store fs;
  CHECK_THROWS_AS(parse_spec(fs, "forall p1. a_p1"), parse_error);
  CHECK_THROWS_AS(parse_spec(fs, "forall p1, p2, p3. a_p1"), parse_error);
  CHECK_THROWS_AS(parse_spec(fs, "forall p1, p1. a_p1"), parse_error);
  CHECK_THROWS_AS(parse_spec(fs, "a_p1"), parse_error);
}

TEST_CASE("parse rejects bad atoms and syntax") {
  formula_store fs;
  CHECK_THROWS_AS(parse_spec(fs, "forall p1,p2. a_p3"), parse_error);
  CHECK_THROWS_AS(parse_spec(fs, "forall p1,p2. foo"), parse_error);
  CHECK_THROWS_AS(parse_spec(fs, "forall p1,p2. (a_p1"), parse_error);
  CHECK_THROWS_AS(parse_spec(fs, "forall p1,p2. a_p1 b_p2"), parse_error);
  CHECK_THROWS_AS(parse_spec(fs, "forall p1,p2. a_p1 &"), parse_error);
  CHECK_THROWS_AS(parse_spec(fs, ""), parse_error);
}

TEST_CASE("parse error carries a position") {
  formula_store fs;
  try {
    parse_spec(fs, "forall p1,p2. a_p1 & %");
    CHECK(false);
  } catch (const parse_error& e) {
    CHECK(e.position == 21);
  }
}

TEST_CASE("operator precedence") {
  formula_store fs;
  formula a = fs.make_atom("a", trace_side::first);
  formula b = fs.make_atom("b", trace_side::first);
  formula c = fs.make_atom("c", trace_side::first);

  // unary > U > & > | > -> > <->
  CHECK(parse_spec(fs, "forall p1,p2. a_p1 U b_p1 & c_p1").body ==
        fs.make_binary(op::and_, fs.make_binary(op::until, a, b), c));
  CHECK(parse_spec(fs, "forall p1,p2. a_p1 & b_p1 | c_p1").body ==
        fs.make_binary(op::or_, fs.make_binary(op::and_, a, b), c));
  CHECK(parse_spec(fs, "forall p1,p2. a_p1 | b_p1 -> c_p1").body ==
        fs.make_binary(op::implies, fs.make_binary(op::or_, a, b), c));
  CHECK(parse_spec(fs, "forall p1,p2. a_p1 -> b_p1 <-> c_p1").body ==
        fs.make_binary(op::iff, fs.make_binary(op::implies, a, b), c));
  CHECK(parse_spec(fs, "forall p1,p2. X a_p1 U b_p1").body ==
        fs.make_binary(op::until, fs.make_unary(op::next, a), b));
  CHECK(parse_spec(fs, "forall p1,p2. !a_p1 & b_p1").body ==
        fs.make_binary(op::and_, fs.make_unary(op::not_, a), b));
  // right associativity
  CHECK(parse_spec(fs, "forall p1,p2. a_p1 U b_p1 U c_p1").body ==
        fs.make_binary(op::until, a, fs.make_binary(op::until, b, c)));
  CHECK(parse_spec(fs, "forall p1,p2. a_p1 -> b_p1 -> c_p1").body ==
        fs.make_binary(op::implies, a, fs.make_binary(op::implies, b, c)));
}

TEST_CASE("user-named trace variables print back") {
  formula_store fs;
  spec s = parse_spec(fs, "forall left, right. go_left & stop_right");
  CHECK(s.body == fs.make_binary(op::and_,
                                 fs.make_atom("go", trace_side::first),
                                 fs.make_atom("stop", trace_side::second)));
  CHECK(print_spec(fs, s) == "forall left, right. go_left & stop_right");
}

TEST_CASE("print/parse round trip on random specs") {
  formula_store fs;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    spec s = testgen::make_spec(fs, testgen::random_surface(fs, rng, 4));
    spec back = parse_spec(fs, print_spec(fs, s));
    REQUIRE(back.body == s.body);
  }
}

TEST_CASE("formula file comments are ignored") {
  formula_store fs;
  spec s = parse_spec(fs,
                      "# observational determinism\n"
                      "forall p1,p2. a_p1  # trailing note\n");
  CHECK(s.body == fs.make_atom("a", trace_side::first));
}

TEST_CASE("desugar identities") {
  formula_store fs;
  formula a1 = fs.make_atom("a", trace_side::first);
  formula b1 = fs.make_atom("b", trace_side::first);
  formula a2 = fs.make_atom("a", trace_side::second);

  CHECK(desugar(fs, fs.make_unary(op::globally, a1)) ==
        fs.make_binary(op::release, fs.constant(false), a1));
  CHECK(desugar(fs, fs.make_binary(op::weak_until, a1, b1)) ==
        fs.make_binary(op::release, b1, fs.make_binary(op::or_, a1, b1)));
  CHECK(desugar(fs, fs.make_unary(op::finally_, a2)) ==
        fs.make_binary(op::until, fs.constant(true), a2));
  CHECK(desugar(fs, fs.make_binary(op::implies, a1, b1)) ==
        fs.make_binary(op::or_, fs.make_unary(op::not_, a1), b1));
  CHECK(is_desugared(fs, desugar(fs, fs.make_binary(op::iff, a1, b1))));
}

TEST_CASE("negation normal form dualities") {
  formula_store fs;
  formula a1 = fs.make_atom("a", trace_side::first);
  formula b2 = fs.make_atom("b", trace_side::second);
  formula na1 = fs.make_unary(op::not_, a1);
  formula nb2 = fs.make_unary(op::not_, b2);

  CHECK(to_nnf(fs, fs.make_unary(op::not_, fs.make_binary(op::and_, a1, b2))) ==
        fs.make_binary(op::or_, na1, nb2));
  CHECK(to_nnf(fs, fs.make_unary(op::not_, fs.make_unary(op::next, a1))) ==
        fs.make_unary(op::weak_next, na1));
  CHECK(to_nnf(fs, fs.make_unary(
                       op::not_, fs.make_binary(op::until, a1, b2))) ==
        fs.make_binary(op::release, na1, nb2));
  CHECK(to_nnf(fs, fs.make_unary(op::not_, fs.make_unary(op::not_, a1))) == a1);
  CHECK(to_nnf(fs, fs.make_unary(op::not_, fs.constant(true))) ==
        fs.constant(false));
  CHECK(is_core_nnf(fs, to_nnf(fs, desugar(fs, fs.make_binary(
                                               op::iff, a1, b2)))));
}

TEST_CASE("symmetric closure swaps atom sides") {
  formula_store fs;
  formula a1 = fs.make_atom("a", trace_side::first);
  formula a2 = fs.make_atom("a", trace_side::second);
  formula b2 = fs.make_atom("b", trace_side::second);
  formula b1 = fs.make_atom("b", trace_side::first);

  CHECK(symmetric_closure(fs, a1) == fs.make_binary(op::and_, a1, a2));
  formula body = fs.make_binary(op::and_, a1, b2);
  CHECK(symmetric_closure(fs, body) ==
        fs.make_binary(op::and_, body, fs.make_binary(op::and_, a2, b1)));
  // swapping twice is the identity
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    formula f = testgen::random_surface(fs, rng, 4);
    CHECK(swap_sides(fs, swap_sides(fs, f)) == f);
  }
}

TEST_CASE("nnf preserves pair semantics") {
  formula_store fs;
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<size_t> len(1, 6);
  for (int i = 0; i < 400; ++i) {
    formula f = desugar(fs, testgen::random_surface(fs, rng, 4));
    size_t m = len(rng);
    trace t = testgen::random_trace(rng, m);
    trace u = testgen::random_trace(rng, m);
    CHECK(eval_pair(fs, to_nnf(fs, f), t, u) == eval_pair(fs, f, t, u));
  }
}

TEST_CASE("symmetric closure language (both directions)") {
  formula_store fs;
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<size_t> len(1, 6);
  for (int i = 0; i < 400; ++i) {
    formula f = testgen::random_core_nnf(fs, rng, 4);
    size_t m = len(rng);
    trace t = testgen::random_trace(rng, m);
    trace u = testgen::random_trace(rng, m);
    formula closed = symmetric_closure(fs, f);
    CHECK(eval_pair(fs, closed, t, u) ==
          (eval_pair(fs, f, t, u) && eval_pair(fs, f, u, t)));
  }
}
