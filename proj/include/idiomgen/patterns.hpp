#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "idiomgen/diagram.hpp"
#include "idiomgen/isomorphism.hpp"
#include "idiomgen/random.hpp"
#include "idiomgen/transform.hpp"

namespace idiomgen {

struct RefinementRule {
  std::string nonterminal;
  Diagram body;
  friend bool operator==(const RefinementRule&, const RefinementRule&) = default;
};

// Grammar-like system: nonterminal boxes of `start` (and of rule bodies) are
// refined by substitution until only idiom boxes remain.
struct PatternGrammar {
  Diagram start;
  std::vector<RefinementRule> rules;
  friend bool operator==(const PatternGrammar&, const PatternGrammar&) = default;
};

struct Derivation {
  std::vector<Diagram> diagrams;
  // Exhaustive mode only: no derivation finished within the depth bound.
  bool unproductive = false;
};

inline void validate_grammar(const PatternGrammar& g) {
  std::map<std::string, Signature> nonterminals;
  auto collect = [&](const Diagram& d, const std::string& where) {
    auto r = validate(d);
    if (!r.ok()) throw Error("grammar " + where + " is invalid: " + r.str());
    if (d.contains(BoxKind::apply)) throw Error("grammar " + where + " contains Apply boxes");
    for (const auto& b : d.boxes)
      if (b.sig.kind == BoxKind::nonterminal) nonterminals.emplace(b.sig.label, b.sig);
  };
  collect(g.start, "start");
  for (const auto& rule : g.rules) collect(rule.body, "rule for '" + rule.nonterminal + "'");
  for (const auto& [label, sig] : nonterminals) {
    bool has_rule = false;
    for (const auto& rule : g.rules) {
      if (rule.nonterminal != label) continue;
      has_rule = true;
      if (!sig.same_ports(rule.body.boundary))
        throw Error("grammar rule for '" + label + "' has a mismatched boundary");
    }
    if (!has_rule) throw Error("grammar has no rule for nonterminal '" + label + "'");
  }
}

namespace detail {

struct DerivationState {
  Diagram diagram;
  std::map<std::string, std::size_t> depth;  // box id -> substitution nesting
};

inline const Box* leftmost_nonterminal(const Diagram& d) {
  const Box* best = nullptr;
  for (const auto& b : d.boxes)
    if (b.sig.kind == BoxKind::nonterminal && (!best || b.id < best->id)) best = &b;
  return best;
}

inline DerivationState refine(const DerivationState& s, const Box& nt, const RefinementRule& rule) {
  auto sub = substitute_detailed(s.diagram, nt.id, rule.body);
  DerivationState next{std::move(sub.diagram), s.depth};
  std::size_t d = next.depth.at(nt.id) + 1;
  next.depth.erase(nt.id);
  for (const auto& [from, to] : sub.inserted) next.depth[to] = d;
  return next;
}

inline DerivationState initial_state(const PatternGrammar& g) {
  DerivationState s{g.start, {}};
  for (const auto& b : g.start.boxes) s.depth[b.id] = 0;
  return s;
}

}  // namespace detail

// Derives abstract implementations. Nonterminals are refined leftmost
// (lowest box id) first; refinements that would nest deeper than max_depth
// are pruned. Random mode performs `draws` independent derivations, each
// retried from scratch up to `retry_budget` times.
inline Derivation derive(const PatternGrammar& g, const Mode& mode, std::size_t max_depth, std::size_t draws = 1,
                         std::size_t retry_budget = 1000) {
  validate_grammar(g);
  auto rules_for = [&](const std::string& label) {
    std::vector<const RefinementRule*> out;
    for (const auto& r : g.rules)
      if (r.nonterminal == label) out.push_back(&r);
    return out;
  };

  IsoSet results;
  if (const auto* r = std::get_if<Random>(&mode)) {
    Rng rng(r->seed);
    for (std::size_t k = 0; k < draws; ++k) {
      bool done = false;
      for (std::size_t attempt = 0; attempt < retry_budget && !done; ++attempt) {
        auto state = detail::initial_state(g);
        bool pruned = false;
        while (const Box* nt = detail::leftmost_nonterminal(state.diagram)) {
          auto options = rules_for(nt->sig.label);
          const auto* rule = options[pick(rng, options.size())];
          if (state.depth.at(nt->id) + 1 > max_depth) {
            pruned = true;
            break;
          }
          state = detail::refine(state, *nt, *rule);
        }
        if (!pruned) {
          results.insert(state.diagram);
          done = true;
        }
      }
      if (!done) throw Error("derive: retry budget exhausted");
    }
    return {results.release(), false};
  }

  std::function<void(const detail::DerivationState&)> expand = [&](const detail::DerivationState& state) {
    const Box* nt = detail::leftmost_nonterminal(state.diagram);
    if (!nt) {
      results.insert(state.diagram);
      return;
    }
    if (state.depth.at(nt->id) + 1 > max_depth) return;
    Box target = *nt;
    for (const auto* rule : rules_for(target.sig.label)) expand(detail::refine(state, target, *rule));
  };
  expand(detail::initial_state(g));
  Derivation out{results.release(), false};
  out.unproductive = out.diagrams.empty();
  return out;
}

}  // namespace idiomgen
