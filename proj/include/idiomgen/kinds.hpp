#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idiomgen/error.hpp"
#include "idiomgen/program/parse.hpp"
#include "idiomgen/program/print.hpp"
#include "idiomgen/prose.hpp"
#include "idiomgen/spec/ast.hpp"
#include "idiomgen/spec/syntax.hpp"

namespace idiomgen {

enum class ArtifactKind { program, spec, prose };

inline const char* to_string(ArtifactKind k) {
  switch (k) {
    case ArtifactKind::program: return "program";
    case ArtifactKind::spec: return "spec";
    case ArtifactKind::prose: return "prose";
  }
  return "?";
}

inline std::optional<ArtifactKind> parse_kind(std::string_view s) {
  if (s == "program") return ArtifactKind::program;
  if (s == "spec") return ArtifactKind::spec;
  if (s == "prose") return ArtifactKind::prose;
  return std::nullopt;
}

inline const char* file_extension(ArtifactKind k) {
  switch (k) {
    case ArtifactKind::program: return ".hs";
    case ArtifactKind::spec: return ".spec";
    case ArtifactKind::prose: return ".md";
  }
  return ".txt";
}

// Each kind supplies its fragment monoid (identity, combine), a reader for
// expanded template text, a renderer for the final artifact, and how a
// value is embedded into a surrounding template.

struct ProgramKind {
  using Fragment = std::vector<program::Stmt>;
  static constexpr ArtifactKind kind = ArtifactKind::program;

  static Fragment identity() { return {}; }
  static Fragment combine(Fragment a, const Fragment& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  static Fragment parse(std::string_view text) { return program::parse_statements(text); }
  static std::string render(const Fragment& f) { return program::render_program(program::Program{f}); }
  static std::string embed(const std::string& value) {
    try {
      auto e = program::parse_expression(value);
      if (program::detail::precedence(*e) >= 11) return value;
    } catch (const ParseError&) {
    }
    return "(" + value + ")";
  }
};

struct SpecKind {
  using Fragment = spec::ExprPtr;
  static constexpr ArtifactKind kind = ArtifactKind::spec;

  static Fragment identity() { return spec::nop(); }
  static Fragment combine(const Fragment& a, const Fragment& b) { return spec::sequence(a, b); }
  static Fragment parse(std::string_view text) { return spec::parse_spec(text, "<fragment>"); }
  static std::string render(const Fragment& f) { return spec::render_spec(*f); }
  static std::string embed(const std::string& value) {
    try {
      auto t = spec::parse_term(value);
      if (spec::detail::term_precedence(*t) >= 4) return value;
    } catch (const ParseError&) {
      return value;
    }
    return "(" + value + ")";
  }
};

struct ProseKind {
  using Fragment = prose::Sentences;
  static constexpr ArtifactKind kind = ArtifactKind::prose;

  static Fragment identity() { return {}; }
  static Fragment combine(Fragment a, const Fragment& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  static Fragment parse(std::string_view text) { return prose::split_sentences(text); }
  static std::string render(const Fragment& f) { return prose::render_prose(f); }
  static std::string embed(const std::string& value) { return value; }
};

// Calls f with the traits type for a runtime kind.
template <class F>
decltype(auto) with_kind(ArtifactKind k, F&& f) {
  switch (k) {
    case ArtifactKind::program: return f(ProgramKind{});
    case ArtifactKind::spec: return f(SpecKind{});
    case ArtifactKind::prose: break;
  }
  return f(ProseKind{});
}

}  // namespace idiomgen
