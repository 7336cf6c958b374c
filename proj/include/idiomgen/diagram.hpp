#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "idiomgen/error.hpp"

namespace idiomgen {

enum class BoxKind { idiom, apply, nonterminal };

inline const char* to_string(BoxKind k) {
  switch (k) {
    case BoxKind::idiom: return "idiom";
    case BoxKind::apply: return "apply";
    case BoxKind::nonterminal: return "nonterminal";
  }
  return "?";
}

// Abstract types are opaque names compared nominally.
using AbstractType = std::string;

struct Signature {
  std::string label;
  std::vector<AbstractType> inputs;
  std::vector<AbstractType> outputs;
  bool effectful = false;
  BoxKind kind = BoxKind::idiom;

  bool same_ports(const Signature& other) const {
    return inputs == other.inputs && outputs == other.outputs;
  }
  friend bool operator==(const Signature&, const Signature&) = default;
};

struct Box {
  std::string id;
  Signature sig;
  friend bool operator==(const Box&, const Box&) = default;
};

// Endpoint of a wire. An empty box id addresses the diagram boundary:
// as a wire source it names a diagram input, as a target a diagram output.
struct Port {
  std::string box;
  std::size_t index = 0;

  bool on_boundary() const { return box.empty(); }
  friend auto operator<=>(const Port&, const Port&) = default;
};

struct Wire {
  Port source;
  Port target;
  friend auto operator<=>(const Wire&, const Wire&) = default;
};

inline std::string describe_source(const Port& p) {
  return p.on_boundary() ? "in" + std::to_string(p.index) : p.box + ".out" + std::to_string(p.index);
}
inline std::string describe_target(const Port& p) {
  return p.on_boundary() ? "out" + std::to_string(p.index) : p.box + ".in" + std::to_string(p.index);
}
inline std::string describe(const Wire& w) {
  return describe_source(w.source) + " -> " + describe_target(w.target);
}

// A wiring diagram of typed boxes plus the total order of its effectful
// boxes. With only idiom boxes it is an abstract implementation; with
// nonterminal boxes it is an abstract pattern.
struct Diagram {
  Signature boundary;
  std::vector<Box> boxes;
  std::vector<Wire> wires;
  std::vector<std::string> effect_order;

  const Box* find(std::string_view id) const {
    for (const auto& b : boxes)
      if (b.id == id) return &b;
    return nullptr;
  }
  bool contains(BoxKind kind) const {
    return std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) { return b.sig.kind == kind; });
  }
  bool is_abstract_implementation() const {
    return std::all_of(boxes.begin(), boxes.end(), [](const Box& b) { return b.sig.kind == BoxKind::idiom; });
  }
  bool is_abstract_pattern() const { return contains(BoxKind::nonterminal); }

  // The boundary counts as effectful iff some inner box is.
  bool derived_effectful() const {
    return std::any_of(boxes.begin(), boxes.end(), [](const Box& b) { return b.sig.effectful; });
  }

  // Wire feeding the given target port, if any.
  const Wire* source_of(const Port& target) const {
    for (const auto& w : wires)
      if (w.target == target) return &w;
    return nullptr;
  }

  friend bool operator==(const Diagram&, const Diagram&) = default;
};

struct Violation {
  std::string what;
  std::vector<std::string> ids;

  std::string str() const {
    std::string s = what;
    for (std::size_t i = 0; i < ids.size(); ++i) s += (i == 0 ? " " : ",") + ids[i];
    return s;
  }
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool mentions(std::string_view what) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.what == what; });
  }
  std::string str() const {
    if (ok()) return "ok";
    std::string s;
    for (const auto& v : violations) s += (s.empty() ? "" : "; ") + v.str();
    return s;
  }
};

namespace detail {

// Boxes indexed densely, with the data-edge and union (data + consecutive
// effect) successor lists. Only built for diagrams whose wires reference
// existing boxes.
struct Indexed {
  std::vector<std::string> ids;
  std::map<std::string, int, std::less<>> index;
  std::vector<std::set<int>> data_succ;
  std::vector<std::set<int>> union_succ;

  explicit Indexed(const Diagram& d, bool with_effects = true) {
    for (const auto& b : d.boxes) {
      index.emplace(b.id, static_cast<int>(ids.size()));
      ids.push_back(b.id);
    }
    data_succ.resize(ids.size());
    for (const auto& w : d.wires) {
      if (w.source.on_boundary() || w.target.on_boundary()) continue;
      auto s = index.find(w.source.box);
      auto t = index.find(w.target.box);
      if (s == index.end() || t == index.end()) continue;
      data_succ[s->second].insert(t->second);
    }
    union_succ = data_succ;
    if (with_effects) {
      for (std::size_t i = 0; i + 1 < d.effect_order.size(); ++i) {
        auto s = index.find(d.effect_order[i]);
        auto t = index.find(d.effect_order[i + 1]);
        if (s == index.end() || t == index.end()) continue;
        union_succ[s->second].insert(t->second);
      }
    }
  }

  int at(std::string_view id) const {
    auto it = index.find(id);
    if (it == index.end()) throw Error("unknown box id '" + std::string(id) + "'");
    return it->second;
  }
};

// Returns the nodes of some cycle, or an empty vector if the graph is acyclic.
inline std::vector<int> find_cycle(const std::vector<std::set<int>>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> color(n, 0), parent(n, -1);
  for (int root = 0; root < n; ++root) {
    if (color[root] != 0) continue;
    // Iterative DFS keeps deep chains off the call stack.
    std::vector<std::pair<int, std::set<int>::const_iterator>> stack;
    stack.emplace_back(root, succ[root].begin());
    color[root] = 1;
    while (!stack.empty()) {
      auto& [v, it] = stack.back();
      if (it == succ[v].end()) {
        color[v] = 2;
        stack.pop_back();
        continue;
      }
      int w = *it++;
      if (color[w] == 1) {
        std::vector<int> cycle{w};
        for (int u = v; u != w; u = parent[u]) cycle.push_back(u);
        std::reverse(cycle.begin() + 1, cycle.end());
        return cycle;
      }
      if (color[w] == 0) {
        color[w] = 1;
        parent[w] = v;
        stack.emplace_back(w, succ[w].begin());
      }
    }
  }
  return {};
}

inline std::vector<bool> reachable_from(const std::vector<std::set<int>>& succ, const std::vector<int>& roots) {
  std::vector<bool> seen(succ.size(), false);
  std::vector<int> todo;
  for (int r : roots)
    for (int s : succ[r])
      if (!seen[s]) seen[s] = true, todo.push_back(s);
  while (!todo.empty()) {
    int v = todo.back();
    todo.pop_back();
    for (int s : succ[v])
      if (!seen[s]) seen[s] = true, todo.push_back(s);
  }
  return seen;
}

inline std::vector<std::set<int>> reversed(const std::vector<std::set<int>>& succ) {
  std::vector<std::set<int>> pred(succ.size());
  for (std::size_t v = 0; v < succ.size(); ++v)
    for (int s : succ[v]) pred[s].insert(static_cast<int>(v));
  return pred;
}

inline bool reserved_id(std::string_view id) {
  for (std::string_view prefix : {"in", "out"}) {
    if (id.size() > prefix.size() && id.substr(0, prefix.size()) == prefix &&
        std::all_of(id.begin() + prefix.size(), id.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return true;
  }
  return false;
}

}  // namespace detail

inline ValidationReport validate(const Diagram& d) {
  ValidationReport report;
  auto add = [&](std::string what, std::vector<std::string> ids) {
    report.violations.push_back({std::move(what), std::move(ids)});
  };

  std::map<std::string, const Box*, std::less<>> by_id;
  for (const auto& b : d.boxes) {
    if (b.id.empty() || detail::reserved_id(b.id)) add("invalid box id", {b.id});
    if (b.sig.label.empty()) add("empty label", {b.id});
    if (!by_id.emplace(b.id, &b).second) add("duplicate box id", {b.id});
  }

  std::map<Port, int> incoming;
  bool wires_ok = true;
  for (const auto& w : d.wires) {
    std::optional<AbstractType> from, to;
    if (w.source.on_boundary()) {
      if (w.source.index < d.boundary.inputs.size()) from = d.boundary.inputs[w.source.index];
    } else if (auto it = by_id.find(w.source.box); it != by_id.end()) {
      if (w.source.index < it->second->sig.outputs.size()) from = it->second->sig.outputs[w.source.index];
    }
    if (w.target.on_boundary()) {
      if (w.target.index < d.boundary.outputs.size()) to = d.boundary.outputs[w.target.index];
    } else if (auto it = by_id.find(w.target.box); it != by_id.end()) {
      if (w.target.index < it->second->sig.inputs.size()) to = it->second->sig.inputs[w.target.index];
    }
    if (!from) add("dangling wire source", {describe(w)}), wires_ok = false;
    if (!to) add("dangling wire target", {describe(w)}), wires_ok = false;
    if (from && to && *from != *to) add("type mismatch", {describe(w)});
    if (to) ++incoming[w.target];
  }

  auto check_input = [&](const Port& p) {
    int n = incoming[p];
    if (n == 0) add("unconnected input", {describe_target(p)});
    if (n > 1) add("multiple sources", {describe_target(p)});
  };
  for (const auto& b : d.boxes)
    for (std::size_t i = 0; i < b.sig.inputs.size(); ++i) check_input({b.id, i});
  for (std::size_t i = 0; i < d.boundary.outputs.size(); ++i) check_input({"", i});

  bool effects_ok = true;
  std::set<std::string, std::less<>> seen_effects;
  for (const auto& id : d.effect_order) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      add("effect order names unknown box", {id}), effects_ok = false;
    } else if (!it->second->sig.effectful) {
      add("effect order names effect-free box", {id}), effects_ok = false;
    }
    if (!seen_effects.insert(id).second) add("effect order repeats box", {id}), effects_ok = false;
  }
  for (const auto& b : d.boxes)
    if (b.sig.effectful && !seen_effects.count(b.id)) add("effectful box missing from effect order", {b.id}), effects_ok = false;

  if (!wires_ok) return report;
  detail::Indexed g(d);
  auto to_ids = [&](const std::vector<int>& cycle) {
    std::vector<std::string> ids;
    for (int v : cycle) ids.push_back(g.ids[v]);
    return ids;
  };
  if (auto cycle = detail::find_cycle(g.data_succ); !cycle.empty()) {
    add("data cycle", to_ids(cycle));
  } else if (effects_ok) {
    if (auto mixed = detail::find_cycle(g.union_succ); !mixed.empty()) add("combined cycle", to_ids(mixed));
  }
  return report;
}

inline void require_valid(const Diagram& d, std::string_view what) {
  auto r = validate(d);
  if (!r.ok()) throw Error(std::string(what) + ": invalid diagram: " + r.str());
}

// x reaches y along data wires (reflexive).
inline bool data_reach(const Diagram& d, std::string_view x, std::string_view y) {
  detail::Indexed g(d, false);
  int from = g.at(x), to = g.at(y);
  if (from == to) return true;
  return detail::reachable_from(g.data_succ, {from})[to];
}

// x precedes or equals y in the effect order.
inline bool effect_reach(const Diagram& d, std::string_view x, std::string_view y) {
  auto pos = [&](std::string_view id) {
    auto it = std::find(d.effect_order.begin(), d.effect_order.end(), id);
    if (it == d.effect_order.end()) {
      if (!d.find(id)) throw Error("unknown box id '" + std::string(id) + "'");
      throw Error("box '" + std::string(id) + "' is not effectful");
    }
    return it - d.effect_order.begin();
  };
  return pos(x) <= pos(y);
}

// Topological orders of the union of data and effect edges, enumerated in
// lexicographic order of box ids. The first one is the canonical order.
inline std::vector<std::vector<std::string>> linearizations(
    const Diagram& d, std::size_t limit = std::numeric_limits<std::size_t>::max()) {
  require_valid(d, "linearizations");
  std::vector<std::vector<std::string>> result;
  if (limit == 0) return result;

  // Index boxes in id order so that trying candidates in index order yields
  // lexicographic output.
  Diagram sorted = d;
  std::sort(sorted.boxes.begin(), sorted.boxes.end(), [](const Box& a, const Box& b) { return a.id < b.id; });
  detail::Indexed g(sorted);
  const int n = static_cast<int>(g.ids.size());
  std::vector<int> indegree(n, 0);
  for (int v = 0; v < n; ++v)
    for (int s : g.union_succ[v]) ++indegree[s];

  std::vector<std::string> current;
  std::vector<bool> placed(n, false);
  std::function<void()> extend = [&]() {
    if (result.size() >= limit) return;
    if (static_cast<int>(current.size()) == n) {
      result.push_back(current);
      return;
    }
    for (int v = 0; v < n && result.size() < limit; ++v) {
      if (placed[v] || indegree[v] != 0) continue;
      placed[v] = true;
      current.push_back(g.ids[v]);
      for (int s : g.union_succ[v]) --indegree[s];
      extend();
      for (int s : g.union_succ[v]) ++indegree[s];
      current.pop_back();
      placed[v] = false;
    }
  };
  extend();
  return result;
}

inline std::vector<std::string> canonical_linearization(const Diagram& d) {
  return linearizations(d, 1).front();
}

}  // namespace idiomgen
