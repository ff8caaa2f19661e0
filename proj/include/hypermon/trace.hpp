#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hypermon/formula.hpp"

namespace hypermon {

/// A finite set of atomic propositions observed at one position.
struct event {
  std::vector<std::string> props;  // sorted, unique

  event() = default;
  event(std::initializer_list<std::string> ps);
  explicit event(std::vector<std::string> ps);

  bool contains(std::string_view name) const;
  friend bool operator==(const event&, const event&) = default;
};

/// A nonempty finite sequence of events.
struct trace {
  std::vector<event> events;

  size_t size() const { return events.size(); }
  const event& operator[](size_t i) const { return events[i]; }
  friend bool operator==(const trace&, const trace&) = default;
};

/// Fixed, sorted set of proposition names the monitor encodes per position.
struct alphabet {
  std::vector<std::string> names;  // sorted, unique

  static alphabet from(std::vector<std::string> ns);
  int index_of(std::string_view name) const;  // -1 if absent
  size_t size() const { return names.size(); }
  bool contains(std::string_view name) const { return index_of(name) >= 0; }
};

/// Parses the plain-text trace format: one event per line as a
/// comma-separated proposition list, `-` for the empty event, blank lines
/// separating traces, `#` line comments. Throws parse_error on malformed
/// proposition names or when the text contains no trace.
std::vector<trace> parse_traces(std::string_view text);

/// Parses a single event line (used by the streaming front end).
/// Returns false for blank/comment lines without touching `out`.
bool parse_event_line(std::string_view line, event& out);

std::string format_event(const event& e);

}  // namespace hypermon
