#pragma once

#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idiomgen/enumerate.hpp"
#include "idiomgen/program/eval.hpp"
#include "idiomgen/program/parse.hpp"
#include "idiomgen/random.hpp"
#include "idiomgen/spec/eval.hpp"
#include "idiomgen/spec/syntax.hpp"
#include "idiomgen/trace.hpp"
#include "json.hpp"

namespace idiomgen {

struct NamedProgram {
  std::string id;
  program::Program program;
};

struct NamedSpec {
  std::string id;
  spec::ExprPtr spec;
};

// One comparison between two artifacts over all samples.
struct PairCheck {
  std::string first;
  std::string second;
  std::size_t compared = 0;  // samples on which both traces were admissible
  std::optional<std::vector<long long>> counterexample;
  Trace first_trace;
  Trace second_trace;

  bool ok() const { return !counterexample; }
};

struct CoherenceOptions {
  std::uint64_t seed = 0;
  std::size_t samples = 100;
  // Applied to every trace before comparison.
  std::function<Trace(Trace)> normalize = [](Trace t) { return t; };
};

struct CoherenceReport {
  std::size_t programs = 0;
  std::size_t specs = 0;
  std::size_t prose = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<PairCheck> checks;
  std::vector<std::string> warnings;

  bool coherent() const {
    for (const auto& c : checks)
      if (!c.ok()) return false;
    return true;
  }
  std::size_t violations() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += !c.ok();
    return n;
  }

  static std::string sampler_description() {
    return "stdin is drawn on demand while the first spec runs (or the first program when there is no spec): "
           "reads into Nat variables, reads whose variable bounds a loop, and a program's first read draw from 0..5; "
           "other reads draw from -10..10. Samples a spec rejects are skipped for that spec.";
  }

  std::string text() const {
    std::string s = "coherence: " + std::string(coherent() ? "coherent" : "INCOHERENT") + "\n";
    s += "programs: " + std::to_string(programs) + "\n";
    s += "specs: " + std::to_string(specs) + "\n";
    s += "prose: " + std::to_string(prose) + " (not checkable)\n";
    s += "samples: " + std::to_string(samples) + " seed: " + std::to_string(seed) + "\n";
    s += "sampler: " + sampler_description() + "\n";
    s += "checks: " + std::to_string(checks.size()) + " violations: " + std::to_string(violations()) + "\n";
    for (const auto& w : warnings) s += "warning: " + w + "\n";
    for (const auto& c : checks) {
      if (c.ok()) continue;
      std::string in;
      for (std::size_t i = 0; i < c.counterexample->size(); ++i) in += (i ? "," : "") + std::to_string((*c.counterexample)[i]);
      s += "violation: " + c.first + " vs " + c.second + " on stdin [" + in + "]\n";
      s += "  " + c.first + ": " + c.first_trace.str() + "\n";
      s += "  " + c.second + ": " + c.second_trace.str() + "\n";
    }
    return s;
  }

  nlohmann::json json() const {
    auto trace_json = [](const Trace& t) {
      const char* status = t.status == Trace::Status::ok ? "ok" : t.status == Trace::Status::error ? "error" : "rejected";
      return nlohmann::json{{"inputs", t.inputs}, {"outputs", t.outputs}, {"status", status}, {"message", t.message}};
    };
    nlohmann::json j;
    j["coherent"] = coherent();
    j["programs"] = programs;
    j["specs"] = specs;
    j["prose"] = {{"count", prose}, {"verdict", "not checkable"}};
    j["samples"] = samples;
    j["seed"] = seed;
    j["sampler"] = sampler_description();
    j["warnings"] = warnings;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      nlohmann::json r{{"artifacts", {c.first, c.second}}, {"verdict", c.ok() ? "pass" : "fail"}, {"compared", c.compared}};
      if (!c.ok()) {
        r["counterexample"] = {{"stdin", *c.counterexample},
                               {"traces", {trace_json(c.first_trace), trace_json(c.second_trace)}}};
      }
      j["checks"].push_back(std::move(r));
    }
    return j;
  }
};

namespace detail {

// Variables whose current value appears in a loop's branch condition.
inline std::set<std::string> loop_bounds(const spec::Expr& e) {
  std::set<std::string> out;
  std::function<void(const spec::Term&)> term = [&](const spec::Term& t) {
    if (const auto* c = std::get_if<spec::Current>(&t.node)) out.insert(c->var);
    else if (const auto* call = std::get_if<spec::Call>(&t.node))
      for (const auto& a : call->args) term(*a);
    else if (const auto* b = std::get_if<spec::BinaryTerm>(&t.node)) term(*b->lhs), term(*b->rhs);
  };
  std::function<void(const spec::Expr&, bool)> walk = [&](const spec::Expr& x, bool loop) {
    if (const auto* b = std::get_if<spec::Branch>(&x.node)) {
      if (loop) term(*b->cond);
      walk(*b->then_branch, loop);
      walk(*b->else_branch, loop);
    } else if (const auto* l = std::get_if<spec::Loop>(&x.node)) {
      walk(*l->body, true);
    } else if (const auto* s = std::get_if<spec::Seq>(&x.node)) {
      for (const auto& i : s->items) walk(*i, loop);
    }
  };
  walk(e, false);
  return out;
}

inline std::vector<long long> draw_stdin(const std::vector<NamedProgram>& programs, const std::vector<NamedSpec>& specs,
                                         Rng& rng) {
  if (!specs.empty()) {
    const auto& s = *specs.front().spec;
    auto bounds = loop_bounds(s);
    auto on_demand = [&](const spec::Read& r, std::size_t) -> std::optional<long long> {
      bool count = r.set == spec::ValueSet::nat || bounds.count(r.var);
      return count ? pick_between(rng, 0, 5) : pick_between(rng, -10, 10);
    };
    return spec::run_spec(s, on_demand).inputs;
  }
  if (programs.empty()) return {};
  auto feed = [&](std::size_t i) -> std::optional<long long> {
    return i == 0 ? pick_between(rng, 0, 5) : pick_between(rng, -10, 10);
  };
  return program::run_program(programs.front().program, {}, program::kDefaultStepBudget, feed).inputs;
}

}  // namespace detail

// Samples stdins and compares every unordered pair of artifacts: programs
// with programs, programs with specs, specs with specs. Each pair keeps the
// first counterexample.
inline CoherenceReport check_artifacts(const std::vector<NamedProgram>& programs, const std::vector<NamedSpec>& specs,
                                       const CoherenceOptions& options) {
  CoherenceReport report;
  report.programs = programs.size();
  report.specs = specs.size();
  report.samples = options.samples;
  report.seed = options.seed;

  struct Subject {
    std::string id;
    bool is_spec;
    std::size_t index;
  };
  std::vector<Subject> subjects;
  for (std::size_t i = 0; i < programs.size(); ++i) subjects.push_back({programs[i].id, false, i});
  for (std::size_t i = 0; i < specs.size(); ++i) subjects.push_back({specs[i].id, true, i});
  for (std::size_t a = 0; a < subjects.size(); ++a)
    for (std::size_t b = a + 1; b < subjects.size(); ++b) {
      PairCheck check;
      check.first = subjects[a].id;
      check.second = subjects[b].id;
      report.checks.push_back(std::move(check));
    }

  Rng rng(split_seed(options.seed, 2));
  std::vector<Trace> traces(subjects.size());
  for (std::size_t k = 0; k < options.samples; ++k) {
    auto stdin_values = detail::draw_stdin(programs, specs, rng);
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      const auto& s = subjects[i];
      traces[i] = options.normalize(s.is_spec ? spec::run_spec(*specs[s.index].spec, stdin_values)
                                              : program::run_program(programs[s.index].program, stdin_values));
    }
    std::size_t c = 0;
    for (std::size_t a = 0; a < subjects.size(); ++a) {
      for (std::size_t b = a + 1; b < subjects.size(); ++b, ++c) {
        auto& check = report.checks[c];
        bool rejected = (subjects[a].is_spec && traces[a].status == Trace::Status::rejected) ||
                        (subjects[b].is_spec && traces[b].status == Trace::Status::rejected);
        if (rejected) continue;
        ++check.compared;
        if (check.counterexample || traces[a] == traces[b]) continue;
        check.counterexample = stdin_values;
        check.first_trace = traces[a];
        check.second_trace = traces[b];
      }
    }
  }
  return report;
}

struct CoherenceInput {
  const IdiomLibrary* programs = nullptr;
  const IdiomLibrary* specs = nullptr;
  const IdiomLibrary* prose = nullptr;
};

// Generates every program and spec for the intent and checks them against
// each other. Prose is counted but not checked.
inline CoherenceReport check_coherence(const Diagram& impl, const RuleSet& rules, const CoherenceInput& libs,
                                       const CoherenceOptions& options) {
  std::vector<NamedProgram> programs;
  std::vector<NamedSpec> specs;
  std::vector<std::string> warnings;
  auto id = [](const char* kind, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%03zu", kind, i);
    return std::string(buf);
  };
  if (libs.programs) {
    auto e = enumerate_artifacts(impl, rules, *libs.programs);
    warnings.insert(warnings.end(), e.warnings.begin(), e.warnings.end());
    for (std::size_t i = 0; i < e.artifacts.size(); ++i)
      programs.push_back({id("program", i), program::parse_program(e.artifacts[i].text)});
  }
  if (libs.specs) {
    auto e = enumerate_artifacts(impl, rules, *libs.specs);
    warnings.insert(warnings.end(), e.warnings.begin(), e.warnings.end());
    for (std::size_t i = 0; i < e.artifacts.size(); ++i) {
      auto s = spec::parse_spec(e.artifacts[i].text);
      for (const auto& p : spec::check_spec(*s)) warnings.push_back(id("spec", i) + ": " + p);
      specs.push_back({id("spec", i), s});
    }
  }
  auto report = check_artifacts(programs, specs, options);
  report.warnings = std::move(warnings);
  if (libs.prose) report.prose = enumerate_artifacts(impl, rules, *libs.prose).artifacts.size();
  return report;
}

}  // namespace idiomgen
