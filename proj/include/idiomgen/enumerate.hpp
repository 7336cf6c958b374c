#pragma once

#include <cctype>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "idiomgen/diagram.hpp"
#include "idiomgen/instantiate.hpp"
#include "idiomgen/random.hpp"
#include "idiomgen/variants.hpp"

namespace idiomgen {

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

struct GenerationOptions {
  Mode mode = Exhaustive{};
  std::size_t limit = kUnlimited;
  bool all_orders = false;  // vary the linearization as well
  std::size_t draws = 0;    // random mode; 0 means `limit`, or 16 when unlimited
};

struct Artifact {
  std::string text;
  std::size_t variant = 0;
  std::vector<std::string> order;
  Choice choice;
};

struct Enumeration {
  std::vector<Artifact> artifacts;
  std::vector<Diagram> variants;
  std::vector<std::string> warnings;
};

// Collapses whitespace runs to one space and trims the ends.
inline std::string normalize_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

// First label of `d` that the library cannot realize, if any.
inline std::optional<std::string> missing_label(const Diagram& d, const IdiomLibrary& lib) {
  for (const auto& b : d.boxes)
    if (!lib.find(b.sig.label)) return b.sig.label;
  return std::nullopt;
}

// Variants times linearizations times idiom choices, deduplicated on the
// whitespace-normalized text. Variants the library cannot realize are
// skipped with a warning; the implementation itself must be realizable.
// Random mode splits its seed into one stream for variant exploration and
// one for the draws.
inline Enumeration enumerate_artifacts(const Diagram& impl, const RuleSet& rules, const IdiomLibrary& lib,
                                       const GenerationOptions& options = {}) {
  Enumeration out;
  const auto* random = std::get_if<Random>(&options.mode);
  Mode variant_mode = Exhaustive{};
  if (random) variant_mode = Random{split_seed(random->seed, 0)};
  auto variants = explore_variants(impl, rules, variant_mode);

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (auto label = missing_label(variants[i], lib)) {
      if (i == 0)
        throw InstantiationError("library '" + lib.name + "' has no " + to_string(lib.kind) + " idiom for '" +
                                 *label + "'");
      out.warnings.push_back("variant " + std::to_string(i) + " skipped: no " + to_string(lib.kind) +
                             " idiom for '" + *label + "'");
      continue;
    }
    usable.push_back(i);
  }
  out.variants = std::move(variants);
  if (options.limit == 0) return out;

  std::set<std::string> seen;
  auto emit = [&](std::size_t v, const std::vector<std::string>& order, const Choice& choice) {
    auto text = instantiate_text(out.variants[v], lib, choice, order);
    if (seen.insert(normalize_whitespace(text)).second) out.artifacts.push_back({std::move(text), v, order, choice});
    return out.artifacts.size() < options.limit;
  };
  auto sorted_ids = [](const Diagram& d) {
    std::vector<std::string> ids;
    for (const auto& b : d.boxes) ids.push_back(b.id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  if (random) {
    Rng rng(split_seed(random->seed, 1));
    std::size_t draws = options.draws ? options.draws : (options.limit == kUnlimited ? 16 : options.limit);
    for (std::size_t k = 0; k < draws; ++k) {
      std::size_t v = usable[pick(rng, usable.size())];
      const Diagram& d = out.variants[v];
      std::vector<std::string> order;
      if (options.all_orders) {
        auto orders = linearizations(d);
        order = orders[pick(rng, orders.size())];
      } else {
        order = canonical_linearization(d);
      }
      Choice choice;
      for (const auto& id : sorted_ids(d)) choice[id] = pick(rng, lib.find(d.find(id)->sig.label)->size());
      if (!emit(v, order, choice)) break;
    }
    return out;
  }

  for (std::size_t v : usable) {
    const Diagram& d = out.variants[v];
    auto orders = options.all_orders ? linearizations(d) : std::vector<std::vector<std::string>>{canonical_linearization(d)};
    auto ids = sorted_ids(d);
    std::vector<std::size_t> sizes;
    for (const auto& id : ids) sizes.push_back(lib.find(d.find(id)->sig.label)->size());
    for (const auto& order : orders) {
      std::vector<std::size_t> digits(ids.size(), 0);
      while (true) {
        Choice choice;
        for (std::size_t i = 0; i < ids.size(); ++i) choice[ids[i]] = digits[i];
        if (!emit(v, order, choice)) return out;
        std::size_t i = ids.size();
        while (i-- > 0 && ++digits[i] == sizes[i]) digits[i] = 0;
        if (i == static_cast<std::size_t>(-1)) break;
      }
    }
  }
  return out;
}

}  // namespace idiomgen
