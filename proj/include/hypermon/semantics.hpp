#pragma once

#include <span>

#include "hypermon/formula.hpp"
#include "hypermon/trace.hpp"
#include "hypermon/verdict.hpp"

namespace hypermon {

/// Finite-trace satisfaction of a core-NNF body over the pair
/// {first -> a, second -> b}. The pair is evaluated position-wise on the
/// zip of both traces truncated to min(|a|, |b|); strong next fails at the
/// last zipped position, weak next holds there.
bool eval_pair(const formula_store& fs, formula body, const trace& a,
               const trace& b);

/// eval_pair in both directions: the pair belongs to the language of the
/// universally quantified specification.
bool lang_member(const formula_store& fs, formula body, const trace& a,
                 const trace& b);

/// Partially evaluates a core-NNF body against the fixed trace t, yielding
/// a single-trace formula over side-free atoms. Performs no simplification;
/// the output structure follows the recursive definition exactly.
formula project(formula_store& fs, formula body, const trace& t);

/// Finite-trace LTL satisfaction for side-free formulas: strong next is
/// false at the last position, weak next true, until requires fulfillment
/// within the trace, release is weak at the trace end.
bool eval_finite(const formula_store& fs, formula f, const trace& t);

/// Brute-force reference monitor: a violation exists iff some ordered pair
/// of traces (including a trace with itself) falsifies the body. Blame is
/// derived by searching for the earliest prefix of the offending trace that
/// no bounded extension can repair.
///
/// The parallel variant distributes the pair evaluations with OpenMP and
/// returns the same verdict as the serial reference.
verdict oracle_monitor_serial(const formula_store& fs, formula core_body,
                              std::span<const trace> traces);
verdict oracle_monitor_parallel(const formula_store& fs, formula core_body,
                                std::span<const trace> traces);
verdict oracle_monitor(const formula_store& fs, formula core_body,
                       std::span<const trace> traces, bool parallel = true);

}  // namespace hypermon
