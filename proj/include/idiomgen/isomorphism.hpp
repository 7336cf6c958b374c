#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "idiomgen/diagram.hpp"

namespace idiomgen {

namespace detail {

inline std::string signature_key(const Signature& s) {
  std::string k = s.label + "|" + to_string(s.kind) + (s.effectful ? "|e|" : "|p|");
  for (const auto& t : s.inputs) k += t + ",";
  k += "->";
  for (const auto& t : s.outputs) k += t + ",";
  return k;
}

}  // namespace detail

// Cheap isomorphism invariant: boundary plus the sorted multiset of box
// signatures and the wire count.
inline std::string shape_key(const Diagram& d) {
  std::vector<std::string> keys;
  for (const auto& b : d.boxes) keys.push_back(detail::signature_key(b.sig));
  std::sort(keys.begin(), keys.end());
  Signature ports{"", d.boundary.inputs, d.boundary.outputs};
  std::string k = detail::signature_key(ports) + "#" + std::to_string(d.wires.size()) + "#";
  for (const auto& s : keys) k += s + ";";
  return k;
}

// Bijection on boxes preserving signatures, wires (including boundary
// connections) and the effect order. Box ids are irrelevant.
inline bool isomorphic(const Diagram& a, const Diagram& b) {
  if (!a.boundary.same_ports(b.boundary) || a.boxes.size() != b.boxes.size() || a.wires.size() != b.wires.size() ||
      a.effect_order.size() != b.effect_order.size())
    return false;
  if (shape_key(a) != shape_key(b)) return false;

  const std::size_t n = a.boxes.size();
  std::map<std::string, std::size_t> b_index;
  for (std::size_t i = 0; i < n; ++i) b_index[b.boxes[i].id] = i;

  std::set<Wire> b_wires(b.wires.begin(), b.wires.end());
  std::map<std::string, std::string> mapping;
  std::vector<bool> used(n, false);

  auto degree = [](const Diagram& d, const std::string& id) {
    std::pair<int, int> deg{0, 0};
    for (const auto& w : d.wires) {
      if (w.source.box == id) ++deg.first;
      if (w.target.box == id) ++deg.second;
    }
    return deg;
  };
  std::vector<std::pair<int, int>> a_deg(n), b_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    a_deg[i] = degree(a, a.boxes[i].id);
    b_deg[i] = degree(b, b.boxes[i].id);
  }

  auto full_check = [&]() {
    auto map_port = [&](const Port& p) { return p.on_boundary() ? p : Port{mapping.at(p.box), p.index}; };
    for (const auto& w : a.wires)
      if (!b_wires.count(Wire{map_port(w.source), map_port(w.target)})) return false;
    for (std::size_t i = 0; i < a.effect_order.size(); ++i)
      if (mapping.at(a.effect_order[i]) != b.effect_order[i]) return false;
    return true;
  };

  std::function<bool(std::size_t)> extend = [&](std::size_t i) {
    if (i == n) return full_check();
    const Box& box = a.boxes[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || !(b.boxes[j].sig == box.sig) || a_deg[i] != b_deg[j]) continue;
      used[j] = true;
      mapping[box.id] = b.boxes[j].id;
      if (extend(i + 1)) return true;
      used[j] = false;
    }
    mapping.erase(box.id);
    return false;
  };
  return extend(0);
}

// Insertion-ordered collection of diagrams, deduplicated up to isomorphism.
class IsoSet {
 public:
  bool insert(const Diagram& d) {
    auto& bucket = buckets_[shape_key(d)];
    for (std::size_t i : bucket)
      if (isomorphic(items_[i], d)) return false;
    bucket.push_back(items_.size());
    items_.push_back(d);
    return true;
  }
  bool contains(const Diagram& d) const {
    auto it = buckets_.find(shape_key(d));
    if (it == buckets_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](std::size_t i) { return isomorphic(items_[i], d); });
  }
  std::size_t size() const { return items_.size(); }
  const std::vector<Diagram>& items() const { return items_; }
  std::vector<Diagram> release() { return std::move(items_); }

 private:
  std::vector<Diagram> items_;
  std::map<std::string, std::vector<std::size_t>> buckets_;
};

}  // namespace idiomgen
