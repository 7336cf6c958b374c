#pragma once

#include <limits>
#include <string>
#include <vector>

#include "idiomgen/diagram.hpp"
#include "idiomgen/isomorphism.hpp"
#include "idiomgen/random.hpp"
#include "idiomgen/transform.hpp"

namespace idiomgen {

// A finer-grained diagram that may replace every box labelled base_label.
struct AlternativeImplementation {
  std::string base_label;
  Diagram body;
  friend bool operator==(const AlternativeImplementation&, const AlternativeImplementation&) = default;
};

// A pattern (usually containing Apply boxes) that collapses into one box.
struct MergeRule {
  std::string name;
  Diagram pattern;
  Signature result;
  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

struct RuleSet {
  std::vector<AlternativeImplementation> alternatives;
  std::vector<MergeRule> merge_rules;
  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

enum class MergeStrategy { deterministic, all };

inline void validate_rules(const RuleSet& rules) {
  for (const auto& alt : rules.alternatives) {
    if (alt.base_label.empty()) throw Error("alternative without base label");
    if (alt.body.contains(BoxKind::nonterminal)) throw Error("alternative for '" + alt.base_label + "' contains nonterminal boxes");
    auto r = validate(alt.body);
    if (!r.ok()) throw Error("alternative for '" + alt.base_label + "' is invalid: " + r.str());
  }
  for (const auto& rule : rules.merge_rules) {
    auto r = validate(rule.pattern);
    if (!r.ok()) throw Error("merge rule '" + rule.name + "' is invalid: " + r.str());
    if (!rule.result.same_ports(rule.pattern.boundary))
      throw Error("merge rule '" + rule.name + "': pattern boundary differs from '" + rule.result.label + "'");
    if (rule.result.effectful != rule.pattern.derived_effectful())
      throw Error("merge rule '" + rule.name + "': effect flag of '" + rule.result.label + "' disagrees with its pattern");
    if (rule.pattern.boxes.size() < 2)
      throw Error("merge rule '" + rule.name + "': pattern needs at least two boxes");
  }
}

namespace detail {

struct MergeStep {
  std::size_t rule;
  Diagram result;
};

inline std::vector<MergeStep> merge_steps(const Diagram& d, const std::vector<MergeRule>& rules, bool first_only) {
  std::vector<MergeStep> steps;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    for (auto& result : merge(rules[r].pattern, rules[r].result, d)) {
      if (result.boxes.size() >= d.boxes.size()) throw Error("merge rule '" + rules[r].name + "' did not shrink the diagram");
      steps.push_back({r, std::move(result)});
      if (first_only) return steps;
    }
  }
  return steps;
}

inline std::size_t default_budget(const Diagram& d) { return 10 * std::max<std::size_t>(d.boxes.size(), 1); }

}  // namespace detail

// Applies merge rules until none applies. `deterministic` always takes the
// first applicable rule and its first match; `all` returns every reachable
// fixpoint. A budget of 0 means ten merge steps per initial box.
inline std::vector<Diagram> apply_merge_fixpoint(const Diagram& d, const std::vector<MergeRule>& rules,
                                                 MergeStrategy strategy, std::size_t budget = 0) {
  require_valid(d, "apply_merge_fixpoint");
  if (budget == 0) budget = detail::default_budget(d);

  if (strategy == MergeStrategy::deterministic) {
    Diagram current = d;
    for (std::size_t step = 0;; ++step) {
      auto steps = detail::merge_steps(current, rules, true);
      if (steps.empty()) return {current};
      if (step >= budget) throw Error("merge fixpoint exceeded its step budget");
      current = std::move(steps.front().result);
    }
  }

  IsoSet fixpoints, seen;
  std::vector<Diagram> frontier{d};
  seen.insert(d);
  for (std::size_t depth = 0; !frontier.empty(); ++depth) {
    if (depth > budget) throw Error("merge fixpoint exceeded its step budget");
    std::vector<Diagram> next;
    for (const auto& state : frontier) {
      auto steps = detail::merge_steps(state, rules, false);
      if (steps.empty()) fixpoints.insert(state);
      for (auto& s : steps)
        if (seen.insert(s.result)) next.push_back(std::move(s.result));
    }
    frontier = std::move(next);
  }
  return fixpoints.release();
}

// Single random merge path to a fixpoint.
inline Diagram apply_merge_random(const Diagram& d, const std::vector<MergeRule>& rules, Rng& rng, std::size_t budget = 0) {
  if (budget == 0) budget = detail::default_budget(d);
  Diagram current = d;
  for (std::size_t step = 0;; ++step) {
    auto steps = detail::merge_steps(current, rules, false);
    if (steps.empty()) return current;
    if (step >= budget) throw Error("merge fixpoint exceeded its step budget");
    current = std::move(steps[pick(rng, steps.size())].result);
  }
}

namespace detail {

// Candidate replacements per box of `impl` (box ids in ascending order);
// option 0 keeps the box.
struct AssignmentSpace {
  std::vector<std::string> boxes;
  std::vector<std::vector<const AlternativeImplementation*>> options;

  AssignmentSpace(const Diagram& impl, const RuleSet& rules) {
    std::vector<const Box*> sorted;
    for (const auto& b : impl.boxes) sorted.push_back(&b);
    std::sort(sorted.begin(), sorted.end(), [](const Box* a, const Box* b) { return a->id < b->id; });
    for (const Box* b : sorted) {
      std::vector<const AlternativeImplementation*> opts{nullptr};
      for (const auto& alt : rules.alternatives)
        if (alt.base_label == b->sig.label && alt.body.boundary.same_ports(b->sig)) opts.push_back(&alt);
      boxes.push_back(b->id);
      options.push_back(std::move(opts));
    }
  }

  Diagram apply(const Diagram& impl, const std::vector<std::size_t>& choice) const {
    Diagram d = impl;
    for (std::size_t i = 0; i < boxes.size(); ++i)
      if (const auto* alt = options[i][choice[i]]) d = substitute(d, boxes[i], alt->body);
    return d;
  }

  // Advances an odometer; false once every assignment has been visited.
  bool next(std::vector<std::size_t>& choice) const {
    for (std::size_t i = boxes.size(); i-- > 0;) {
      if (++choice[i] < options[i].size()) return true;
      choice[i] = 0;
    }
    return false;
  }
};

}  // namespace detail

// Intent-preserving data-flow variants: stage one substitutes alternatives,
// stage two merges to a fixpoint; results still holding Apply boxes are
// dropped. The input itself is always the first result.
inline std::vector<Diagram> explore_variants(const Diagram& impl, const RuleSet& rules, const Mode& mode,
                                             std::size_t limit = std::numeric_limits<std::size_t>::max()) {
  require_valid(impl, "explore_variants");
  if (!impl.is_abstract_implementation())
    throw Error("explore_variants: input must contain only idiom boxes");
  validate_rules(rules);

  IsoSet results;
  if (limit == 0) return {};
  results.insert(impl);
  detail::AssignmentSpace space(impl, rules);
  auto keep = [&](const Diagram& d) {
    if (results.size() < limit && !d.contains(BoxKind::apply)) results.insert(d);
  };

  if (const auto* r = std::get_if<Random>(&mode)) {
    Rng rng(r->seed);
    std::size_t draws = limit == std::numeric_limits<std::size_t>::max() ? 64 : 8 * limit;
    for (std::size_t k = 0; k < draws && results.size() < limit; ++k) {
      std::vector<std::size_t> choice;
      for (const auto& opts : space.options) choice.push_back(pick(rng, opts.size()));
      keep(apply_merge_random(space.apply(impl, choice), rules.merge_rules, rng));
    }
    return results.release();
  }

  std::vector<std::size_t> choice(space.boxes.size(), 0);
  do {
    for (const auto& d : apply_merge_fixpoint(space.apply(impl, choice), rules.merge_rules, MergeStrategy::all)) keep(d);
  } while (results.size() < limit && space.next(choice));
  return results.release();
}

}  // namespace idiomgen
