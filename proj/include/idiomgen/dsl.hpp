#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "idiomgen/diagram.hpp"
#include "idiomgen/error.hpp"
#include "idiomgen/instantiate.hpp"
#include "idiomgen/kinds.hpp"
#include "idiomgen/patterns.hpp"
#include "idiomgen/variants.hpp"

// Block-structured text format for `.idioms` files:
//
//   library NAME;
//   type Int, [Int];
//   idiom LABEL : (Int) -> ([Int]) effect;      also `apply`, `nonterminal`
//   impl NAME [: (types) -> (types)] { BODY }
//   rules NAME { alt LABEL { BODY }  merge NAME : pattern { BODY } => LABEL; }
//   grammar NAME { start [: sig] { BODY }  rule LABEL { BODY } }
//   concrete program|spec|prose LABEL #K {
//     inputs a, b; fresh go, i; bind xs;
//     emits """...""";
//     silent "...", partial(s, x) "...";
//   }
//
// BODY: `box ID = LABEL;`, `wire ID.outK -> ID.inK;` (`inK` / `outK` alone
// name the boundary), `effects ID, ...;` (default: effectful boxes in
// declaration order). Comments start with `//`.
namespace idiomgen {

struct Workspace {
  std::set<AbstractType> types;
  std::map<std::string, Signature> signatures;  // by label
  std::map<std::string, Diagram> diagrams;
  std::map<std::string, RuleSet> rule_sets;
  std::map<std::string, PatternGrammar> grammars;
  std::map<std::pair<std::string, ArtifactKind>, IdiomLibrary> libraries;

  const IdiomLibrary* library(const std::string& name, ArtifactKind kind) const {
    auto it = libraries.find({name, kind});
    return it == libraries.end() ? nullptr : &it->second;
  }
  friend bool operator==(const Workspace&, const Workspace&) = default;
};

inline std::string normalize_type(std::string_view t) {
  std::string s;
  for (char c : t)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  return s;
}

namespace detail {

// Removes the common indentation of non-blank lines, a blank first line and
// a blank last line.
inline std::string dedent(std::string_view raw) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    auto end = raw.find('\n', start);
    lines.emplace_back(raw.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  auto blank = [](const std::string& l) { return l.find_first_not_of(" \t\r") == std::string::npos; };
  if (!lines.empty() && blank(lines.front())) lines.erase(lines.begin());
  if (!lines.empty() && blank(lines.back())) lines.pop_back();
  std::size_t common = std::string::npos;
  for (const auto& l : lines)
    if (!blank(l)) common = std::min(common, l.find_first_not_of(' '));
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string l = blank(lines[i]) ? "" : lines[i].substr(common == std::string::npos ? 0 : common);
    while (!l.empty() && (l.back() == ' ' || l.back() == '\r')) l.pop_back();
    out += (i ? "\n" : "") + l;
  }
  return out;
}

struct Located {
  int line = 0;
  int column = 0;
};

class WorkspaceParser {
 public:
  WorkspaceParser(std::string_view text, std::string file, Workspace& ws) : text_(text), file_(std::move(file)), ws_(ws) {}

  void parse() {
    while (true) {
      skip();
      if (pos_ >= text_.size()) break;
      declaration();
    }
  }

 private:
  std::string_view text_;
  std::string file_;
  Workspace& ws_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  std::string library_ = "default";

  [[noreturn]] void fail(const std::string& message, Located at) const { throw ParseError(file_, at.line, at.column, message); }
  [[noreturn]] void fail(const std::string& message) const { fail(message, here()); }
  Located here() const { return {line_, column_}; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_++] == '\n') ++line_, column_ = 1;
      else ++column_;
    }
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (text_.substr(pos_, 2) == "//") {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  bool peek(std::string_view s) {
    skip();
    return text_.substr(pos_, s.size()) == s;
  }
  bool accept(std::string_view s) {
    if (!peek(s)) return false;
    advance(s.size());
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }

  static bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

  // Identifiers and labels: letters, digits, '_' and '-' (but not '->').
  std::string word(const char* what = "identifier") {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && word_char(text_[pos_]) &&
           !(text_[pos_] == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>'))
      advance();
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(text_.substr(start, pos_ - start));
  }

  bool peek_word(std::string_view w) {
    skip();
    if (text_.substr(pos_, w.size()) != w) return false;
    std::size_t after = pos_ + w.size();
    return after >= text_.size() || !word_char(text_[after]);
  }
  bool accept_word(std::string_view w) {
    if (!peek_word(w)) return false;
    advance(w.size());
    return true;
  }

  std::size_t number() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    if (start == pos_) fail("expected a number");
    return std::stoul(std::string(text_.substr(start, pos_ - start)));
  }

  // A type runs to the next top-level ',' or ')' or ';'.
  AbstractType type_name() {
    skip();
    Located at = here();
    std::size_t start = pos_;
    int depth = 0;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == '[') ++depth;
      if (c == ')' || c == ']') {
        if (depth == 0) break;
        --depth;
      }
      if ((c == ',' || c == ';') && depth == 0) break;
      advance();
    }
    auto t = normalize_type(text_.substr(start, pos_ - start));
    if (t.empty()) fail("expected a type", at);
    return t;
  }

  AbstractType known_type() {
    Located at = here();
    auto t = type_name();
    if (!ws_.types.count(t)) fail("unknown type '" + t + "'", at);
    return t;
  }

  std::vector<AbstractType> type_list() {
    expect("(");
    std::vector<AbstractType> out;
    if (accept(")")) return out;
    do out.push_back(known_type());
    while (accept(","));
    expect(")");
    return out;
  }

  std::string string_literal() {
    skip();
    if (text_.substr(pos_, 3) == "\"\"\"") {
      advance(3);
      auto end = text_.find("\"\"\"", pos_);
      if (end == std::string_view::npos) fail("unterminated \"\"\" string");
      auto raw = text_.substr(pos_, end - pos_);
      advance(end - pos_ + 3);
      return dedent(raw);
    }
    if (pos_ >= text_.size() || text_[pos_] != '"') fail("expected a string");
    advance();
    std::string s;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string");
      char c = text_[pos_];
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated string");
        char e = text_[pos_];
        advance();
        s += e == 'n' ? '\n' : e;
        continue;
      }
      s += c;
    }
    return s;
  }

  std::vector<std::string> word_list() {
    std::vector<std::string> out;
    if (peek(";") || peek(")")) return out;
    do out.push_back(word());
    while (accept(","));
    return out;
  }

  void declaration() {
    Located at = here();
    if (accept_word("library")) {
      library_ = word("library name");
      expect(";");
    } else if (accept_word("type")) {
      do ws_.types.insert(type_name());
      while (accept(","));
      expect(";");
    } else if (peek_word("idiom") || peek_word("apply") || peek_word("nonterminal")) {
      signature_declaration();
    } else if (accept_word("impl")) {
      auto name = word("implementation name");
      if (ws_.diagrams.count(name)) fail("duplicate implementation '" + name + "'", at);
      Signature boundary{name, {}, {}, false, BoxKind::idiom};
      if (accept(":")) {
        boundary.inputs = type_list();
        expect("->");
        boundary.outputs = type_list();
      }
      auto d = body(boundary, "implementation '" + name + "'", at);
      if (!d.is_abstract_implementation()) fail("implementation '" + name + "' may only use plain idioms", at);
      ws_.diagrams[name] = std::move(d);
    } else if (accept_word("rules")) {
      rules(at);
    } else if (accept_word("grammar")) {
      grammar(at);
    } else if (accept_word("concrete")) {
      concrete(at);
    } else {
      fail("expected a declaration");
    }
  }

  void signature_declaration() {
    Located at = here();
    BoxKind kind = accept_word("apply") ? BoxKind::apply : accept_word("nonterminal") ? BoxKind::nonterminal : BoxKind::idiom;
    if (kind == BoxKind::idiom) accept_word("idiom");
    auto label = word("label");
    if (ws_.signatures.count(label)) fail("duplicate idiom '" + label + "'", at);
    expect(":");
    Signature sig{label, type_list(), {}, false, kind};
    expect("->");
    sig.outputs = type_list();
    sig.effectful = accept_word("effect") || kind == BoxKind::nonterminal;
    expect(";");
    ws_.signatures[label] = std::move(sig);
  }

  const Signature& signature(const std::string& label, Located at) const {
    auto it = ws_.signatures.find(label);
    if (it == ws_.signatures.end()) fail("unknown idiom '" + label + "'", at);
    return it->second;
  }

  Port source_port(const std::string& first) {
    if (accept(".")) {
      auto p = word("port");
      if (p.rfind("out", 0) != 0 || p.size() == 3) fail("expected outK");
      return {first, std::stoul(p.substr(3))};
    }
    if (first.rfind("in", 0) == 0 && first.size() > 2 &&
        std::all_of(first.begin() + 2, first.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return {"", std::stoul(first.substr(2))};
    fail("expected ID.outK or inK");
  }

  Port target_port(const std::string& first) {
    if (accept(".")) {
      auto p = word("port");
      if (p.rfind("in", 0) != 0 || p.size() == 2) fail("expected inK");
      return {first, std::stoul(p.substr(2))};
    }
    if (first.rfind("out", 0) == 0 && first.size() > 3 &&
        std::all_of(first.begin() + 3, first.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return {"", std::stoul(first.substr(3))};
    fail("expected ID.inK or outK");
  }

  // Parses `{ box ...; wire ...; effects ...; }` and validates the result.
  Diagram body(Signature boundary, const std::string& what, Located block_at) {
    Diagram d;
    std::vector<std::pair<Wire, Located>> wires;
    bool explicit_effects = false;
    expect("{");
    while (!accept("}")) {
      Located at = here();
      if (accept_word("box")) {
        auto id = word("box id");
        expect("=");
        Located label_at = here();
        auto label = word("label");
        expect(";");
        if (d.find(id)) fail("duplicate box id '" + id + "'", at);
        d.boxes.push_back({id, signature(label, label_at)});
      } else if (accept_word("wire")) {
        auto src = source_port(word("wire source"));
        expect("->");
        auto dst = target_port(word("wire target"));
        expect(";");
        wires.push_back({{src, dst}, at});
      } else if (accept_word("effects")) {
        if (explicit_effects) fail("effects listed twice", at);
        explicit_effects = true;
        d.effect_order = word_list();
        expect(";");
      } else {
        fail("expected box, wire, effects or '}'");
      }
    }
    if (!explicit_effects)
      for (const auto& b : d.boxes)
        if (b.sig.effectful) d.effect_order.push_back(b.id);
    boundary.effectful = d.derived_effectful();
    boundary.kind = BoxKind::idiom;
    d.boundary = std::move(boundary);

    // Wire typing is reported at the wire itself.
    for (const auto& [w, at] : wires) {
      auto port_type = [&](const Port& p, bool source) -> std::optional<AbstractType> {
        const auto& list = p.on_boundary() ? (source ? d.boundary.inputs : d.boundary.outputs) : std::vector<AbstractType>{};
        if (p.on_boundary()) return p.index < list.size() ? std::optional(list[p.index]) : std::nullopt;
        const Box* b = d.find(p.box);
        if (!b) fail("unknown box '" + p.box + "'", at);
        const auto& ports = source ? b->sig.outputs : b->sig.inputs;
        return p.index < ports.size() ? std::optional(ports[p.index]) : std::nullopt;
      };
      auto from = port_type(w.source, true);
      auto to = port_type(w.target, false);
      if (!from) fail("no such port " + describe_source(w.source), at);
      if (!to) fail("no such port " + describe_target(w.target), at);
      if (*from != *to) fail("type mismatch: " + describe(w) + " connects " + *from + " to " + *to, at);
      d.wires.push_back(w);
    }
    auto report = validate(d);
    if (!report.ok()) fail(what + ": " + report.str(), block_at);
    return d;
  }

  void rules(Located at) {
    auto name = word("rule set name");
    if (ws_.rule_sets.count(name)) fail("duplicate rule set '" + name + "'", at);
    RuleSet rs;
    expect("{");
    while (!accept("}")) {
      Located item_at = here();
      if (accept_word("alt")) {
        auto label = word("label");
        const auto& base = signature(label, item_at);
        auto d = body(Signature{label, base.inputs, base.outputs}, "alternative for '" + label + "'", item_at);
        rs.alternatives.push_back({label, std::move(d)});
      } else if (accept_word("merge")) {
        auto rule_name = word("merge rule name");
        expect(":");
        if (!accept_word("pattern")) fail("expected 'pattern'");
        auto save = std::make_tuple(pos_, line_, column_);
        // The boundary comes from the result idiom named after the body.
        int depth = 0;
        skip();
        do {
          if (pos_ >= text_.size()) fail("unterminated pattern");
          if (text_[pos_] == '{') ++depth;
          if (text_[pos_] == '}') --depth;
          advance();
        } while (depth > 0);
        expect("=>");
        Located result_at = here();
        auto result_label = word("label");
        const auto& result = signature(result_label, result_at);
        std::tie(pos_, line_, column_) = save;
        auto pattern = body(Signature{result_label, result.inputs, result.outputs}, "merge rule '" + rule_name + "'",
                            item_at);
        expect("=>");
        word("label");
        expect(";");
        rs.merge_rules.push_back({rule_name, std::move(pattern), result});
      } else {
        fail("expected alt, merge or '}'");
      }
    }
    try {
      validate_rules(rs);
    } catch (const Error& e) {
      fail(e.what(), at);
    }
    ws_.rule_sets[name] = std::move(rs);
  }

  void grammar(Located at) {
    auto name = word("grammar name");
    if (ws_.grammars.count(name)) fail("duplicate grammar '" + name + "'", at);
    PatternGrammar g;
    expect("{");
    Located start_at = here();
    if (!accept_word("start")) fail("expected 'start'");
    Signature boundary{name, {}, {}, false, BoxKind::idiom};
    if (accept(":")) {
      boundary.inputs = type_list();
      expect("->");
      boundary.outputs = type_list();
    }
    g.start = body(boundary, "grammar start", start_at);
    while (!accept("}")) {
      Located rule_at = here();
      if (!accept_word("rule")) fail("expected rule or '}'");
      auto label = word("label");
      const auto& nt = signature(label, rule_at);
      if (nt.kind != BoxKind::nonterminal) fail("'" + label + "' is not a nonterminal", rule_at);
      g.rules.push_back({label, body(Signature{label, nt.inputs, nt.outputs}, "rule for '" + label + "'", rule_at)});
    }
    try {
      validate_grammar(g);
    } catch (const Error& e) {
      fail(e.what(), at);
    }
    ws_.grammars[name] = std::move(g);
  }

  void concrete(Located at) {
    auto kind_word = word("artifact kind");
    auto kind = parse_kind(kind_word);
    if (!kind) fail("unknown artifact kind '" + kind_word + "'", at);
    Located label_at = here();
    auto label = word("label");
    const auto& sig = signature(label, label_at);
    if (sig.kind != BoxKind::idiom) fail("concrete idioms realize plain idioms only", label_at);
    expect("#");
    Located index_at = here();
    auto index = number();
    ConcreteIdiom idiom;
    idiom.label = label;
    expect("{");
    while (!accept("}")) {
      if (accept_word("inputs")) idiom.inputs = word_list();
      else if (accept_word("fresh")) idiom.fresh = word_list();
      else if (accept_word("bind")) idiom.bind = word_list();
      else if (accept_word("emits")) idiom.emits = string_literal();
      else if (accept_word("silent")) {
        do {
          OutputTemplate out;
          if (accept_word("partial")) {
            expect("(");
            out.holes = word_list();
            expect(")");
            if (out.holes.empty()) fail("a partial output needs holes");
          }
          out.text = string_literal();
          idiom.outputs.push_back(std::move(out));
        } while (accept(","));
      } else {
        fail("expected inputs, fresh, bind, emits, silent or '}'");
      }
      expect(";");
    }
    auto problems = check_idiom(idiom, sig);
    if (!problems.empty()) fail(problems.front(), at);
    auto& lib = ws_.libraries[{library_, *kind}];
    lib.name = library_;
    lib.kind = *kind;
    auto& list = lib.entries[label];
    if (index != list.size())
      fail("expected index #" + std::to_string(list.size()) + " for the next " + kind_word + " idiom of '" + label + "'",
           index_at);
    list.push_back(std::move(idiom));
  }
};

inline std::vector<std::filesystem::path> expand_paths(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::filesystem::path> files;
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> found;
      for (const auto& entry : std::filesystem::directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".idioms") found.push_back(entry.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

}  // namespace detail

// Parses DSL text into `ws`. On error `ws` is left untouched.
inline void parse_workspace_text(Workspace& ws, std::string_view text, const std::string& file = "<input>") {
  Workspace copy = ws;
  detail::WorkspaceParser(text, file, copy).parse();
  ws = std::move(copy);
}

// Loads files in order (directories contribute their *.idioms files in
// name order). All or nothing.
inline Workspace parse_workspace(const std::vector<std::filesystem::path>& paths) {
  Workspace ws;
  for (const auto& file : detail::expand_paths(paths)) {
    std::ifstream in(file);
    if (!in) throw ParseError(file.string(), 0, 0, "cannot read file");
    std::stringstream buf;
    buf << in.rdbuf();
    detail::WorkspaceParser(buf.str(), file.string(), ws).parse();
  }
  return ws;
}

namespace detail {

inline std::string render_types(const std::vector<AbstractType>& ts) {
  std::string s = "(";
  for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + ts[i];
  return s + ")";
}

inline std::string quote(const std::string& s, const std::string& indent) {
  if (s.find('\n') != std::string::npos || s.find('"') != std::string::npos) {
    std::string out = "\"\"\"\n";
    std::size_t start = 0;
    while (true) {
      auto end = s.find('\n', start);
      auto line = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
      out += (line.empty() ? "" : indent + "  " + line) + "\n";
      if (end == std::string::npos) break;
      start = end + 1;
    }
    return out + indent + "\"\"\"";
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '\\') out += "\\\\";
    else out += c;
  }
  return out + "\"";
}

inline std::string render_body(const Diagram& d, const std::string& indent) {
  std::string s = "{\n";
  for (const auto& b : d.boxes) s += indent + "  box " + b.id + " = " + b.sig.label + ";\n";
  for (const auto& w : d.wires) s += indent + "  wire " + describe(w) + ";\n";
  s += indent + "  effects";
  for (std::size_t i = 0; i < d.effect_order.size(); ++i) s += (i ? ", " : " ") + d.effect_order[i];
  return s + ";\n" + indent + "}";
}

}  // namespace detail

// Renders a workspace back to DSL text, one library per file section.
inline std::string render_workspace(const Workspace& ws) {
  std::string s;
  if (!ws.types.empty()) {
    s += "type";
    std::size_t i = 0;
    for (const auto& t : ws.types) s += (i++ ? ", " : " ") + t;
    s += ";\n\n";
  }
  for (const auto& [label, sig] : ws.signatures) {
    s += std::string(to_string(sig.kind)) + " " + label + " : " + detail::render_types(sig.inputs) + " -> " +
         detail::render_types(sig.outputs) + (sig.effectful && sig.kind != BoxKind::nonterminal ? " effect" : "") + ";\n";
  }
  for (const auto& [name, d] : ws.diagrams)
    s += "\nimpl " + name + " : " + detail::render_types(d.boundary.inputs) + " -> " +
         detail::render_types(d.boundary.outputs) + " " + detail::render_body(d, "") + "\n";
  for (const auto& [name, rs] : ws.rule_sets) {
    s += "\nrules " + name + " {\n";
    for (const auto& alt : rs.alternatives) s += "  alt " + alt.base_label + " " + detail::render_body(alt.body, "  ") + "\n";
    for (const auto& m : rs.merge_rules)
      s += "  merge " + m.name + " : pattern " + detail::render_body(m.pattern, "  ") + " => " + m.result.label + ";\n";
    s += "}\n";
  }
  for (const auto& [name, g] : ws.grammars) {
    s += "\ngrammar " + name + " {\n  start : " + detail::render_types(g.start.boundary.inputs) + " -> " +
         detail::render_types(g.start.boundary.outputs) + " " + detail::render_body(g.start, "  ") + "\n";
    for (const auto& r : g.rules) s += "  rule " + r.nonterminal + " " + detail::render_body(r.body, "  ") + "\n";
    s += "}\n";
  }
  for (const auto& [key, lib] : ws.libraries) {
    s += "\nlibrary " + key.first + ";\n";
    for (const auto& [label, list] : lib.entries) {
      for (std::size_t k = 0; k < list.size(); ++k) {
        const auto& idiom = list[k];
        s += "concrete " + std::string(to_string(key.second)) + " " + label + " #" + std::to_string(k) + " {\n";
        auto names = [&](const char* kw, const std::vector<std::string>& v) {
          if (v.empty()) return;
          s += std::string("  ") + kw;
          for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : " ") + v[i];
          s += ";\n";
        };
        names("inputs", idiom.inputs);
        names("fresh", idiom.fresh);
        names("bind", idiom.bind);
        if (!idiom.emits.empty()) s += "  emits " + detail::quote(idiom.emits, "  ") + ";\n";
        if (!idiom.outputs.empty()) {
          s += "  silent ";
          for (std::size_t i = 0; i < idiom.outputs.size(); ++i) {
            const auto& o = idiom.outputs[i];
            if (i) s += ", ";
            if (!o.holes.empty()) {
              s += "partial(";
              for (std::size_t h = 0; h < o.holes.size(); ++h) s += (h ? ", " : "") + o.holes[h];
              s += ") ";
            }
            s += detail::quote(o.text, "  ");
          }
          s += ";\n";
        }
        s += "}\n";
      }
    }
  }
  return s;
}

}  // namespace idiomgen
