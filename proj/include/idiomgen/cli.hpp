#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "idiomgen/coherence.hpp"
#include "idiomgen/dsl.hpp"
#include "idiomgen/enumerate.hpp"
#include "idiomgen/kinds.hpp"
#include "idiomgen/patterns.hpp"
#include "idiomgen/variants.hpp"

namespace idiomgen {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

class UsageError : public Error {
 public:
  using Error::Error;
};

inline std::string numbered(const std::string& stem, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%03zu", i);
  return stem + buf;
}

inline std::string render_impl(const std::string& name, const Diagram& d) {
  std::string head = "impl " + name;
  if (!d.boundary.inputs.empty() || !d.boundary.outputs.empty())
    head += " : (" + render_types(d.boundary.inputs) + ") -> (" + render_types(d.boundary.outputs) + ")";
  return head + " " + render_body(d, "") + "\n";
}

struct Intent {
  const Diagram* impl;
  RuleSet rules;
};

inline Intent find_intent(const Workspace& ws, const std::string& name) {
  auto d = ws.diagrams.find(name);
  if (d == ws.diagrams.end()) throw UsageError("no implementation named '" + name + "' in the workspace");
  auto r = ws.rule_sets.find(name);
  return {&d->second, r == ws.rule_sets.end() ? RuleSet{} : r->second};
}

inline const IdiomLibrary& find_library(const Workspace& ws, const std::string& name, ArtifactKind kind) {
  const auto* lib = ws.library(name, kind);
  if (!lib) throw UsageError(std::string("no ") + to_string(kind) + " library named '" + name + "'");
  return *lib;
}

inline std::optional<ArtifactKind> kind_option(const std::string& s) { return parse_kind(s); }

}  // namespace detail

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generate programs, specifications and prose from abstract implementations."};
  app.require_subcommand(1);
  std::vector<std::string> workspace_paths{"."};
  app.add_option("-w,--workspace", workspace_paths, "workspace directories or .idioms files")->capture_default_str();
  std::string library = "default";
  app.add_option("--library", library, "concrete idiom library name")->capture_default_str();

  std::string intent, kind_name = "program", mode_name = "exhaustive", out_dir, grammar_name, report_path;
  std::optional<std::uint64_t> seed;
  std::size_t limit = kUnlimited, samples = 100, max_depth = 3, draws = 0;
  bool all_orders = false, plain_text = false;

  auto* generate = app.add_subcommand("generate", "write artifacts as numbered files");
  generate->add_option("--intent", intent)->required();
  generate->add_option("--kind", kind_name)->check(CLI::IsMember({"program", "spec", "prose"}))->capture_default_str();
  generate->add_option("--mode", mode_name)->check(CLI::IsMember({"exhaustive", "random"}))->capture_default_str();
  generate->add_option("--seed", seed);
  generate->add_option("--limit", limit);
  generate->add_option("--draws", draws, "random mode: number of draws (default: limit, or 16)");
  generate->add_option("--out", out_dir, "output directory; without it artifacts go to stdout");
  generate->add_flag("--all-orders", all_orders, "also vary the statement order");
  generate->add_flag("--text", plain_text, "write prose as .txt instead of .md");

  auto* count = app.add_subcommand("count", "print the number of distinct artifacts");
  count->add_option("--intent", intent)->required();
  count->add_option("--kind", kind_name)->check(CLI::IsMember({"program", "spec", "prose"}))->capture_default_str();
  count->add_flag("--all-orders", all_orders, "also vary the statement order");

  auto* variants = app.add_subcommand("variants", "list data-flow variants");
  variants->add_option("--intent", intent)->required();
  variants->add_option("--seed", seed, "explore randomly with this seed");

  auto* derive_cmd = app.add_subcommand("derive", "derive implementations from a grammar");
  derive_cmd->add_option("--grammar", grammar_name)->required();
  derive_cmd->add_option("--max-depth", max_depth)->capture_default_str();
  derive_cmd->add_option("--seed", seed, "derive randomly with this seed");
  derive_cmd->add_option("--draws", draws, "random mode: number of derivations (default 1)");

  auto* check = app.add_subcommand("check", "check coherence of generated programs and specifications");
  check->add_option("--intent", intent)->required();
  check->add_option("--samples", samples)->capture_default_str();
  check->add_option("--seed", seed, "sampler seed (default 0)");
  check->add_option("--report", report_path, "also write a JSON report here");

  std::vector<std::string> argv_store{"idiomgen"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Workspace ws;
    {
      std::vector<std::filesystem::path> paths(workspace_paths.begin(), workspace_paths.end());
      for (const auto& p : paths)
        if (!std::filesystem::exists(p)) throw detail::UsageError("no such workspace path: " + p.string());
      ws = parse_workspace(paths);
    }

    if (generate->parsed() || count->parsed()) {
      auto kind = *detail::kind_option(kind_name);
      auto in = detail::find_intent(ws, intent);
      GenerationOptions options;
      options.all_orders = all_orders;
      if (generate->parsed()) {
        options.limit = limit;
        options.draws = draws;
        if (mode_name == "random") {
          if (!seed) throw detail::UsageError("--mode random requires --seed");
          options.mode = Random{*seed};
        }
      }
      auto e = enumerate_artifacts(*in.impl, in.rules, detail::find_library(ws, library, kind), options);
      for (const auto& w : e.warnings) err << "warning: " << w << "\n";
      if (count->parsed()) {
        out << e.artifacts.size() << "\n";
        return kExitOk;
      }
      std::string ext = kind == ArtifactKind::prose && plain_text ? ".txt" : file_extension(kind);
      if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
      for (std::size_t i = 0; i < e.artifacts.size(); ++i) {
        auto file = detail::numbered(to_string(kind), i) + ext;
        auto text = e.artifacts[i].text;
        if (text.empty() || text.back() != '\n') text += '\n';
        if (out_dir.empty()) {
          out << "== " << file << "\n" << text;
          continue;
        }
        std::ofstream f(std::filesystem::path(out_dir) / file, std::ios::binary);
        if (!(f << text)) throw Error("cannot write " + (std::filesystem::path(out_dir) / file).string());
      }
      out << e.artifacts.size() << "\n";
      return kExitOk;
    }

    if (variants->parsed()) {
      auto in = detail::find_intent(ws, intent);
      Mode mode = Exhaustive{};
      if (seed) mode = Random{*seed};
      auto vs = explore_variants(*in.impl, in.rules, mode);
      for (std::size_t i = 0; i < vs.size(); ++i) out << detail::render_impl(detail::numbered(intent, i), vs[i]);
      out << vs.size() << "\n";
      return kExitOk;
    }

    if (derive_cmd->parsed()) {
      auto g = ws.grammars.find(grammar_name);
      if (g == ws.grammars.end()) throw detail::UsageError("no grammar named '" + grammar_name + "'");
      Mode mode = Exhaustive{};
      if (seed) mode = Random{*seed};
      auto d = derive(g->second, mode, max_depth, draws ? draws : 1);
      if (d.unproductive) err << "warning: grammar derived nothing within depth " << max_depth << "\n";
      for (std::size_t i = 0; i < d.diagrams.size(); ++i)
        out << detail::render_impl(detail::numbered(grammar_name, i), d.diagrams[i]);
      out << d.diagrams.size() << "\n";
      return kExitOk;
    }

    // check
    auto in = detail::find_intent(ws, intent);
    CoherenceInput libs{ws.library(library, ArtifactKind::program), ws.library(library, ArtifactKind::spec),
                        ws.library(library, ArtifactKind::prose)};
    if (!libs.programs && !libs.specs) throw detail::UsageError("no program or spec library named '" + library + "'");
    CoherenceOptions options;
    options.samples = samples;
    options.seed = seed.value_or(0);
    auto report = check_coherence(*in.impl, in.rules, libs, options);
    out << report.text();
    if (!report_path.empty()) {
      std::ofstream f(report_path, std::ios::binary);
      if (!(f << report.json().dump(2) << "\n")) throw Error("cannot write " + report_path);
    }
    return report.coherent() ? kExitOk : kExitFailure;
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace idiomgen
