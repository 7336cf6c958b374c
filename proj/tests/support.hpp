#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <numeric>
#include <string>
#include <vector>

#include "idiomgen/diagram.hpp"
#include "idiomgen/dsl.hpp"
#include "idiomgen/random.hpp"

namespace testing_support {

using namespace idiomgen;

inline std::filesystem::path workspace_dir(const std::string& name) {
  return std::filesystem::path(IDIOMGEN_WORKSPACES) / name;
}

inline Workspace load(std::initializer_list<std::string> names) {
  std::vector<std::filesystem::path> paths;
  for (const auto& n : names) paths.push_back(workspace_dir(n));
  return parse_workspace(paths);
}

inline Signature sig(std::string label, std::vector<AbstractType> in, std::vector<AbstractType> out,
                     bool effectful = false, BoxKind kind = BoxKind::idiom) {
  return {std::move(label), std::move(in), std::move(out), effectful, kind};
}

inline Wire wire(std::string from, std::size_t out, std::string to, std::size_t in) {
  return {{std::move(from), out}, {std::move(to), in}};
}

// read -> read-list -> sum -> print, built by hand.
inline Diagram running_example() {
  Diagram d;
  d.boundary = sig("sum", {}, {}, true);
  d.boxes = {{"n", sig("read", {}, {"Int"}, true)},
             {"xs", sig("read-list", {"Int"}, {"[Int]"}, true)},
             {"r", sig("sum", {"[Int]"}, {"Int"})},
             {"p", sig("print", {"Int"}, {}, true)}};
  d.wires = {wire("n", 0, "xs", 0), wire("xs", 0, "r", 0), wire("r", 0, "p", 0)};
  d.effect_order = {"n", "xs", "p"};
  return d;
}

// Label determined by the signature, so equal labels mean equal signatures.
inline std::string label_for(const std::vector<AbstractType>& in, const std::vector<AbstractType>& out, bool eff) {
  std::string s = "f";
  for (const auto& t : in) s += t;
  s += "_";
  for (const auto& t : out) s += t;
  return s + (eff ? "!" : "");
}

inline Signature random_sig(Rng& rng, std::size_t max_in = 2) {
  static const std::vector<AbstractType> types{"A", "B"};
  std::vector<AbstractType> in, out;
  std::size_t n_in = pick(rng, max_in + 1), n_out = 1 + pick(rng, 2);
  for (std::size_t i = 0; i < n_in; ++i) in.push_back(types[pick(rng, 2)]);
  for (std::size_t i = 0; i < n_out; ++i) out.push_back(types[pick(rng, 2)]);
  bool eff = pick(rng, 2) == 0;
  return sig(label_for(in, out, eff), in, out, eff);
}

// Random valid diagram with `n` boxes. Boxes are created in a random
// topological order; each input is fed by an earlier output of the same
// type or by a fresh boundary input. Ids are shuffled so that id order and
// topological order disagree.
inline Diagram random_diagram(Rng& rng, std::size_t n) {
  Diagram d;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("b" + std::to_string(i));
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    Box b{ids[i], random_sig(rng)};
    for (std::size_t k = 0; k < b.sig.inputs.size(); ++k) {
      std::vector<Port> candidates;
      for (const auto& prev : d.boxes)
        for (std::size_t o = 0; o < prev.sig.outputs.size(); ++o)
          if (prev.sig.outputs[o] == b.sig.inputs[k]) candidates.push_back({prev.id, o});
      if (candidates.empty() || pick(rng, 4) == 0) {
        d.boundary.inputs.push_back(b.sig.inputs[k]);
        d.wires.push_back({{"", d.boundary.inputs.size() - 1}, {b.id, k}});
      } else {
        d.wires.push_back({candidates[pick(rng, candidates.size())], {b.id, k}});
      }
    }
    if (b.sig.effectful) d.effect_order.push_back(b.id);
    d.boxes.push_back(std::move(b));
  }
  for (const auto& b : d.boxes)
    for (std::size_t o = 0; o < b.sig.outputs.size(); ++o)
      if (pick(rng, 4) == 0) {
        d.boundary.outputs.push_back(b.sig.outputs[o]);
        d.wires.push_back({{b.id, o}, {"", d.boundary.outputs.size() - 1}});
      }
  d.boundary.label = "random";
  d.boundary.effectful = d.derived_effectful();
  std::shuffle(d.boxes.begin(), d.boxes.end(), rng);
  return d;
}

// A chain of 1..3 fresh boxes with the given boundary: the first consumes
// every input, the last produces every output. Effectful iff `boundary` is.
inline Diagram random_replacement(Rng& rng, const Signature& boundary, const std::string& prefix) {
  static const std::vector<AbstractType> types{"A", "B"};
  Diagram d;
  d.boundary = boundary;
  std::size_t k = 1 + pick(rng, 3);
  std::vector<bool> eff(k, false);
  if (boundary.effectful) {
    for (std::size_t i = 0; i < k; ++i) eff[i] = pick(rng, 2) == 0;
    eff[pick(rng, k)] = true;
  }
  std::vector<AbstractType> carried;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<AbstractType> in = i == 0 ? boundary.inputs : carried;
    std::vector<AbstractType> out = i + 1 == k ? boundary.outputs : std::vector<AbstractType>{types[pick(rng, 2)]};
    // Labels are prefixed so replacement boxes never look like host boxes.
    Box b{prefix + std::to_string(i), sig(prefix + label_for(in, out, eff[i]), in, out, eff[i])};
    for (std::size_t j = 0; j < in.size(); ++j)
      d.wires.push_back(i == 0 ? Wire{{"", j}, {b.id, j}} : Wire{{prefix + std::to_string(i - 1), j}, {b.id, j}});
    if (i + 1 == k)
      for (std::size_t j = 0; j < out.size(); ++j) d.wires.push_back({{b.id, j}, {"", j}});
    if (eff[i]) d.effect_order.push_back(b.id);
    carried = out;
    d.boxes.push_back(std::move(b));
  }
  return d;
}

// Pattern from the image of `ids` in `host`: one pattern input per distinct
// outside source, one output per image port used outside or on the boundary.
std::pair<Diagram, Signature> induced_pattern(const Diagram& host, const std::set<std::string>& ids) {
  Diagram p;
  std::map<Port, std::size_t> inputs, outputs;
  for (const auto& b : host.boxes)
    if (ids.count(b.id)) p.boxes.push_back(b);
  for (const auto& w : host.wires) {
    bool from_in = ids.count(w.source.box) > 0, to_in = ids.count(w.target.box) > 0;
    if (from_in && to_in) {
      p.wires.push_back(w);
    } else if (to_in) {
      auto [it, fresh] = inputs.emplace(w.source, inputs.size());
      if (fresh) p.boundary.inputs.push_back(host.find(w.target.box)->sig.inputs[w.target.index]);
      p.wires.push_back({{"", it->second}, w.target});
    } else if (from_in) {
      auto [it, fresh] = outputs.emplace(w.source, outputs.size());
      if (fresh) {
        p.boundary.outputs.push_back(host.find(w.source.box)->sig.outputs[w.source.index]);
        p.wires.push_back({w.source, {"", it->second}});
      }
    }
  }
  for (const auto& id : host.effect_order)
    if (ids.count(id)) p.effect_order.push_back(id);
  p.boundary.label = "merged";
  p.boundary.effectful = p.derived_effectful();
  return {p, p.boundary};
}


}  // namespace testing_support
