#pragma once

#include <cstddef>

namespace hypermon {

/// Outcome of a monitoring run. A violation blames the first trace and
/// event index at which the trace set became inconsistent with the
/// specification; the transition no-violation -> violation is one-way.
struct verdict {
  bool violation = false;
  size_t trace_index = 0;  // 0-based, valid when violation
  size_t event_index = 0;  // 0-based, valid when violation

  static verdict none() { return verdict{}; }
  static verdict at(size_t t, size_t e) { return verdict{true, t, e}; }

  friend bool operator==(const verdict&, const verdict&) = default;
};

}  // namespace hypermon
