#include "hypermon/trace.hpp"

#include <algorithm>
#include <cctype>

namespace hypermon {

namespace {

void normalize(std::vector<std::string>& ps) {
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
}

bool valid_prop_name(std::string_view s) {
  if (s.empty()) return false;
  if (!isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

event::event(std::initializer_list<std::string> ps) : props(ps) {
  normalize(props);
}

event::event(std::vector<std::string> ps) : props(std::move(ps)) {
  normalize(props);
}

bool event::contains(std::string_view name) const {
  return std::binary_search(props.begin(), props.end(), name,
                            [](std::string_view a, std::string_view b) {
                              return a < b;
                            });
}

alphabet alphabet::from(std::vector<std::string> ns) {
  normalize(ns);
  return alphabet{std::move(ns)};
}

int alphabet::index_of(std::string_view name) const {
  auto it = std::lower_bound(names.begin(), names.end(), name,
                             [](std::string_view a, std::string_view b) {
                               return a < b;
                             });
  if (it == names.end() || std::string_view(*it) != name) return -1;
  return static_cast<int>(it - names.begin());
}

bool parse_event_line(std::string_view line, event& out) {
  size_t hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  line = trim(line);
  if (line.empty()) return false;
  std::vector<std::string> props;
  if (line != "-") {
    size_t start = 0;
    while (start <= line.size()) {
      size_t comma = line.find(',', start);
      std::string_view item = comma == std::string_view::npos
                                  ? line.substr(start)
                                  : line.substr(start, comma - start);
      item = trim(item);
      if (!valid_prop_name(item))
        throw parse_error("malformed proposition name '" + std::string(item) +
                              "'",
                          start);
      props.emplace_back(item);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  out = event(std::move(props));
  return true;
}

std::vector<trace> parse_traces(std::string_view text) {
  std::vector<trace> traces;
  trace current;
  size_t pos = 0;
  auto flush = [&] {
    if (!current.events.empty()) {
      traces.push_back(std::move(current));
      current = trace{};
    }
  };
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = nl == std::string_view::npos
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    size_t hash = line.find('#');
    std::string_view content = trim(hash == std::string_view::npos
                                        ? line
                                        : line.substr(0, hash));
    if (content.empty()) {
      // Blank (or comment-only) line: trace separator.
      flush();
    } else {
      event e;
      parse_event_line(line, e);
      current.events.push_back(std::move(e));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  flush();
  if (traces.empty()) throw parse_error("no traces in input", 0);
  return traces;
}

std::string format_event(const event& e) {
  if (e.props.empty()) return "-";
  std::string out;
  for (size_t i = 0; i < e.props.size(); ++i) {
    if (i) out += ',';
    out += e.props[i];
  }
  return out;
}

}  // namespace hypermon
