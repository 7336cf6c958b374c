#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idiomgen/diagram.hpp"

namespace idiomgen {

struct Substitution {
  Diagram diagram;
  // replacement box id -> id of the inserted box
  std::map<std::string, std::string> inserted;
};

namespace detail {

inline std::string fresh_box_id(const std::set<std::string>& taken, const std::string& base) {
  if (!taken.count(base)) return base;
  for (int k = 2;; ++k) {
    std::string candidate = base + "_" + std::to_string(k);
    if (!taken.count(candidate)) return candidate;
  }
}

// Inserts `block` into the effect order at the latest position for which the
// diagram validates. Returns false if no position works.
inline bool splice_effects_latest(Diagram& d, const std::vector<std::string>& block) {
  if (block.empty()) return true;
  auto base = d.effect_order;
  for (std::size_t pos = base.size() + 1; pos-- > 0;) {
    d.effect_order = base;
    d.effect_order.insert(d.effect_order.begin() + static_cast<std::ptrdiff_t>(pos), block.begin(), block.end());
    if (validate(d).ok()) return true;
  }
  d.effect_order = base;
  return false;
}

}  // namespace detail

// Replaces box `target` of `host` by the diagram `replacement`, whose
// boundary must carry the same port types as the target's signature.
inline Substitution substitute_detailed(const Diagram& host, const std::string& target, const Diagram& replacement) {
  const Box* victim = host.find(target);
  if (!victim) throw TransformError("substitute: unknown target box '" + target + "'");
  if (!victim->sig.same_ports(replacement.boundary))
    throw TransformError("substitute: boundary mismatch between '" + target + "' (" + victim->sig.label +
                         ") and replacement");

  Substitution out;
  std::set<std::string> taken;
  for (const auto& b : host.boxes)
    if (b.id != target) taken.insert(b.id);
  for (const auto& rb : replacement.boxes) {
    std::string id = detail::fresh_box_id(taken, target + "_" + rb.id);
    taken.insert(id);
    out.inserted[rb.id] = id;
  }

  Diagram& d = out.diagram;
  d.boundary = host.boundary;
  for (const auto& b : host.boxes) {
    if (b.id != target) {
      d.boxes.push_back(b);
      continue;
    }
    for (const auto& rb : replacement.boxes) d.boxes.push_back(Box{out.inserted.at(rb.id), rb.sig});
  }

  // Host source feeding each target input.
  std::vector<std::optional<Port>> feeding(victim->sig.inputs.size());
  for (const auto& w : host.wires)
    if (w.target.box == target && w.target.index < feeding.size()) feeding[w.target.index] = w.source;

  auto resolve = [&](const Port& replacement_source) -> Port {
    if (!replacement_source.on_boundary())
      return Port{out.inserted.at(replacement_source.box), replacement_source.index};
    const auto& src = feeding.at(replacement_source.index);
    if (!src) throw TransformError("substitute: target input " + std::to_string(replacement_source.index) + " is unconnected");
    return *src;
  };

  for (const auto& w : host.wires) {
    if (w.target.box == target) continue;
    if (w.source.box != target) {
      d.wires.push_back(w);
      continue;
    }
    const Wire* inner = replacement.source_of(Port{"", w.source.index});
    if (!inner) throw TransformError("substitute: replacement leaves output " + std::to_string(w.source.index) + " unconnected");
    d.wires.push_back(Wire{resolve(inner->source), w.target});
  }
  for (const auto& w : replacement.wires) {
    if (w.target.on_boundary()) continue;
    d.wires.push_back(Wire{resolve(w.source), Port{out.inserted.at(w.target.box), w.target.index}});
  }

  std::vector<std::string> block;
  for (const auto& id : replacement.effect_order) block.push_back(out.inserted.at(id));
  auto slot = std::find(host.effect_order.begin(), host.effect_order.end(), target);
  if (slot != host.effect_order.end()) {
    d.effect_order.assign(host.effect_order.begin(), slot);
    d.effect_order.insert(d.effect_order.end(), block.begin(), block.end());
    d.effect_order.insert(d.effect_order.end(), slot + 1, host.effect_order.end());
  } else {
    d.effect_order = host.effect_order;
    if (!detail::splice_effects_latest(d, block))
      throw TransformError("substitute: no effect-order position for the replacement's effects");
  }

  auto report = validate(d);
  if (!report.ok()) throw TransformError("substitute: result is invalid: " + report.str());
  return out;
}

inline Diagram substitute(const Diagram& host, const std::string& target, const Diagram& replacement) {
  return substitute_detailed(host, target, replacement).diagram;
}

// One occurrence of a pattern's boxes inside a host diagram.
struct Match {
  std::map<std::string, std::string> box_map;  // pattern box id -> host box id
  // Host source cut at the frontier for each pattern input (absent if the
  // pattern does not use that input).
  std::vector<std::optional<Port>> input_sources;
  // Host image port providing each pattern output.
  std::vector<Port> output_sources;

  std::set<std::string> image() const {
    std::set<std::string> s;
    for (const auto& [p, h] : box_map) s.insert(h);
    return s;
  }
  friend bool operator==(const Match&, const Match&) = default;
};

// Every occurrence of `pattern` in `host`: an injective, signature-preserving
// box map that preserves internal wiring in both directions, whose frontier
// wires are exactly the pattern's boundary wires, and which preserves the
// relative effect order. Enumerated in ascending order of host box ids.
inline std::vector<Match> find_matches(const Diagram& pattern, const Diagram& host) {
  std::vector<Match> matches;
  if (pattern.boxes.empty()) return matches;
  for (const auto& w : pattern.wires)
    if (w.source.on_boundary() && w.target.on_boundary()) return matches;  // pass-through wires never match

  std::vector<const Box*> pboxes;
  for (const auto& b : pattern.boxes) pboxes.push_back(&b);
  std::sort(pboxes.begin(), pboxes.end(), [](const Box* a, const Box* b) { return a->id < b->id; });
  std::vector<const Box*> hboxes;
  for (const auto& b : host.boxes) hboxes.push_back(&b);
  std::sort(hboxes.begin(), hboxes.end(), [](const Box* a, const Box* b) { return a->id < b->id; });

  std::set<Wire> host_wires(host.wires.begin(), host.wires.end());
  std::map<std::string, std::string> mapping;
  std::set<std::string> used;

  auto verify = [&]() -> std::optional<Match> {
    Match m;
    m.box_map = mapping;
    const auto& image = used;
    auto in_image = [&](const Port& p) { return !p.on_boundary() && image.count(p.box); };

    std::set<Wire> expected_internal;
    for (const auto& w : pattern.wires) {
      if (w.source.on_boundary() || w.target.on_boundary()) continue;
      Wire hw{Port{mapping.at(w.source.box), w.source.index}, Port{mapping.at(w.target.box), w.target.index}};
      if (!host_wires.count(hw)) return std::nullopt;
      expected_internal.insert(hw);
    }
    std::set<Port> exposed;
    m.output_sources.resize(pattern.boundary.outputs.size());
    for (const auto& w : pattern.wires) {
      if (!w.target.on_boundary()) continue;
      Port hp{mapping.at(w.source.box), w.source.index};
      m.output_sources[w.target.index] = hp;
      exposed.insert(hp);
    }
    m.input_sources.resize(pattern.boundary.inputs.size());
    for (const auto& w : pattern.wires) {
      if (!w.source.on_boundary() || w.target.on_boundary()) continue;
      const Wire* hw = host.source_of(Port{mapping.at(w.target.box), w.target.index});
      if (!hw || in_image(hw->source)) return std::nullopt;
      auto& slot = m.input_sources[w.source.index];
      if (slot && !(*slot == hw->source)) return std::nullopt;
      slot = hw->source;
    }
    for (const auto& w : host.wires) {
      bool s = in_image(w.source), t = in_image(w.target);
      if (s && t && !expected_internal.count(w)) return std::nullopt;
      if (s && !t && !exposed.count(w.source)) return std::nullopt;
    }
    std::vector<std::string> restricted, mapped;
    for (const auto& id : host.effect_order)
      if (image.count(id)) restricted.push_back(id);
    for (const auto& id : pattern.effect_order) mapped.push_back(mapping.at(id));
    if (restricted != mapped) return std::nullopt;
    return m;
  };

  std::function<void(std::size_t)> extend = [&](std::size_t i) {
    if (i == pboxes.size()) {
      if (auto m = verify()) matches.push_back(std::move(*m));
      return;
    }
    for (const Box* hb : hboxes) {
      if (used.count(hb->id) || !(hb->sig == pboxes[i]->sig)) continue;
      used.insert(hb->id);
      mapping[pboxes[i]->id] = hb->id;
      extend(i + 1);
      mapping.erase(pboxes[i]->id);
      used.erase(hb->id);
    }
  };
  extend(0);
  return matches;
}

// Collapsing the match image into one box creates no cycle: no host box
// outside the image lies on a data/effect path leaving and re-entering it.
inline bool mergeable(const Diagram& host, const Match& m) {
  detail::Indexed g(host);
  std::vector<int> image;
  for (const auto& id : m.image()) image.push_back(g.at(id));
  auto after = detail::reachable_from(g.union_succ, image);
  auto before = detail::reachable_from(detail::reversed(g.union_succ), image);
  std::set<int> inside(image.begin(), image.end());
  for (std::size_t v = 0; v < g.ids.size(); ++v)
    if (!inside.count(static_cast<int>(v)) && after[v] && before[v]) return false;
  return true;
}

// Replaces the image of `m` by one box with signature `merged`. The result
// is not validated; it is valid exactly when `m` is mergeable.
inline Diagram collapse(const Diagram& pattern, const Diagram& host, const Match& m, const Signature& merged) {
  if (!merged.same_ports(pattern.boundary)) throw TransformError("merge: pattern boundary does not match signature '" + merged.label + "'");
  for (std::size_t i = 0; i < m.input_sources.size(); ++i)
    if (!m.input_sources[i]) throw TransformError("merge: pattern input " + std::to_string(i) + " is unused");
  const auto image = m.image();

  std::string id;
  if (!m.output_sources.empty()) {
    id = m.output_sources.front().box;
  } else {
    id = m.box_map.at(pattern.boxes.front().id);
  }

  Diagram d;
  d.boundary = host.boundary;
  bool placed = false;
  for (const auto& b : host.boxes) {
    if (!image.count(b.id)) {
      d.boxes.push_back(b);
    } else if (!placed) {
      d.boxes.push_back(Box{id, merged});
      placed = true;
    }
  }
  for (const auto& w : host.wires) {
    bool s = image.count(w.source.box) && !w.source.on_boundary();
    bool t = image.count(w.target.box) && !w.target.on_boundary();
    if (!s && !t) {
      d.wires.push_back(w);
    } else if (s && !t) {
      auto it = std::find(m.output_sources.begin(), m.output_sources.end(), w.source);
      d.wires.push_back(Wire{Port{id, static_cast<std::size_t>(it - m.output_sources.begin())}, w.target});
    }
  }
  for (std::size_t i = 0; i < m.input_sources.size(); ++i) d.wires.push_back(Wire{*m.input_sources[i], Port{id, i}});

  // Quotient of the host order: image entries become the merged id and
  // adjacent repeats fold together. An outside effect between two image
  // effects leaves the id in the order twice, which validate rejects.
  bool image_effects = false;
  for (const auto& e : host.effect_order) {
    if (!image.count(e)) {
      d.effect_order.push_back(e);
      continue;
    }
    image_effects = true;
    if (merged.effectful && (d.effect_order.empty() || d.effect_order.back() != id)) d.effect_order.push_back(id);
  }
  if (image_effects && !merged.effectful)
    throw TransformError("merge: effect-free signature '" + merged.label + "' cannot absorb effectful boxes");
  if (!image_effects && merged.effectful) detail::splice_effects_latest(d, {id});
  return d;
}

// All diagrams obtained by merging one mergeable occurrence of `pattern`.
inline std::vector<Diagram> merge(const Diagram& pattern, const Signature& merged, const Diagram& host) {
  if (!merged.same_ports(pattern.boundary)) throw TransformError("merge: pattern boundary does not match signature '" + merged.label + "'");
  std::vector<Diagram> out;
  for (const auto& m : find_matches(pattern, host)) {
    if (!mergeable(host, m)) continue;
    Diagram d = collapse(pattern, host, m, merged);
    auto report = validate(d);
    if (!report.ok()) throw TransformError("merge: result is invalid: " + report.str());
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace idiomgen
