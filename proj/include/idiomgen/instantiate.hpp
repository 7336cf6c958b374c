#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "idiomgen/diagram.hpp"
#include "idiomgen/error.hpp"
#include "idiomgen/kinds.hpp"

// Concrete idioms are text templates. Inside a template:
//   {name}        an input value, or a fresh or bound name
//   {name(a, b)}  an input applied to arguments: a partial input has its
//                 holes filled positionally, a complete one is applied
//   {?h}          hole h of a partial output (only in partial outputs)
//   {{ and }}     literal braces
namespace idiomgen {

// A value travelling along a wire. Non-empty `holes` make it partial; the
// text then contains a `{?h}` marker per hole.
struct Value {
  std::string text;
  std::vector<std::string> holes;

  bool partial() const { return !holes.empty(); }
  friend bool operator==(const Value&, const Value&) = default;
};

struct OutputTemplate {
  std::string text;
  std::vector<std::string> holes;  // non-empty for partial outputs
  friend bool operator==(const OutputTemplate&, const OutputTemplate&) = default;
};

struct ConcreteIdiom {
  std::string label;
  std::vector<std::string> inputs;  // one role name per input port
  std::vector<std::string> fresh;   // names drawn from the supply
  std::vector<std::string> bind;    // names derived from the box id
  std::string emits;                // visible fragment; empty is the identity
  std::vector<OutputTemplate> outputs;
  friend bool operator==(const ConcreteIdiom&, const ConcreteIdiom&) = default;
};

struct IdiomLibrary {
  std::string name;
  ArtifactKind kind = ArtifactKind::program;
  std::map<std::string, std::vector<ConcreteIdiom>> entries;

  const std::vector<ConcreteIdiom>* find(const std::string& label) const {
    auto it = entries.find(label);
    return it == entries.end() || it->second.empty() ? nullptr : &it->second;
  }
  friend bool operator==(const IdiomLibrary&, const IdiomLibrary&) = default;
};

// Issues x, x1, x2, ... per base name, never repeating a name.
class NameSupply {
 public:
  std::string fresh(const std::string& base) {
    std::string b = base.empty() ? "v" : base;
    for (std::size_t k = counters_[b];; ++k) {
      std::string name = k == 0 ? b : b + std::to_string(k);
      if (used_.insert(name).second) {
        counters_[b] = k + 1;
        return name;
      }
    }
  }
  void reserve(const std::string& name) { used_.insert(name); }
  const std::set<std::string>& used() const { return used_; }

 private:
  std::map<std::string, std::size_t> counters_;
  std::set<std::string> used_;
};

// Base for names bound after a box: the id up to its first '_', reduced to
// alphanumerics with a lowercase first letter.
inline std::string name_base(std::string_view box_id) {
  auto head = box_id.substr(0, box_id.find('_'));
  std::string s;
  for (char c : head)
    if (std::isalnum(static_cast<unsigned char>(c))) s += c;
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return "v";
  s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

namespace detail {

struct Piece {
  enum class Kind { text, ref, apply, hole } kind;
  std::string text;               // literal text, or the referenced name
  std::vector<std::string> args;  // apply arguments
};

inline bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

inline std::vector<Piece> scan_template(std::string_view t) {
  std::vector<Piece> out;
  std::string literal;
  auto flush = [&] {
    if (!literal.empty()) out.push_back({Piece::Kind::text, literal, {}}), literal.clear();
  };
  auto bad = [&](const std::string& why) { return InstantiationError("template '" + std::string(t) + "': " + why); };
  auto read_name = [&](std::size_t& i) {
    while (i < t.size() && t[i] == ' ') ++i;
    std::size_t start = i;
    while (i < t.size() && name_char(t[i])) ++i;
    if (start == i) throw bad("expected a name");
    std::string name(t.substr(start, i - start));
    while (i < t.size() && t[i] == ' ') ++i;
    return name;
  };
  for (std::size_t i = 0; i < t.size();) {
    char c = t[i];
    if (c == '}') {
      if (i + 1 < t.size() && t[i + 1] == '}') {
        literal += '}', i += 2;
        continue;
      }
      throw bad("unmatched '}'");
    }
    if (c != '{') {
      literal += c, ++i;
      continue;
    }
    if (i + 1 < t.size() && t[i + 1] == '{') {
      literal += '{', i += 2;
      continue;
    }
    flush();
    ++i;
    Piece p{Piece::Kind::ref, "", {}};
    if (i < t.size() && t[i] == '?') {
      ++i;
      p.kind = Piece::Kind::hole;
    }
    p.text = read_name(i);
    if (p.kind == Piece::Kind::ref && i < t.size() && t[i] == '(') {
      p.kind = Piece::Kind::apply;
      ++i;
      while (true) {
        p.args.push_back(read_name(i));
        if (i < t.size() && t[i] == ',') {
          ++i;
          continue;
        }
        if (i < t.size() && t[i] == ')') {
          ++i;
          break;
        }
        throw bad("expected ',' or ')'");
      }
      while (i < t.size() && t[i] == ' ') ++i;
    }
    if (i >= t.size() || t[i] != '}') throw bad("expected '}'");
    ++i;
    out.push_back(std::move(p));
  }
  flush();
  return out;
}

inline std::string hole_marker(const std::string& h) { return "{?" + h + "}"; }

// Replaces each hole marker of a partial value by the matching argument.
inline std::string fill_holes(const Value& v, const std::vector<std::string>& args) {
  std::string s = v.text;
  for (std::size_t k = 0; k < v.holes.size(); ++k) {
    auto marker = hole_marker(v.holes[k]);
    for (std::size_t pos = s.find(marker); pos != std::string::npos; pos = s.find(marker, pos + args[k].size()))
      s.replace(pos, marker.size(), args[k]);
  }
  return s;
}

inline bool has_hole_marker(std::string_view s) { return s.find("{?") != std::string_view::npos; }

}  // namespace detail

// Static checks of one idiom against its abstract signature: port counts,
// name resolution, and hole placement.
inline std::vector<std::string> check_idiom(const ConcreteIdiom& idiom, const Signature& sig) {
  std::vector<std::string> problems;
  if (idiom.inputs.size() != sig.inputs.size())
    problems.push_back("idiom '" + idiom.label + "' has " + std::to_string(idiom.inputs.size()) + " inputs, expected " +
                       std::to_string(sig.inputs.size()));
  if (idiom.outputs.size() != sig.outputs.size())
    problems.push_back("idiom '" + idiom.label + "' has " + std::to_string(idiom.outputs.size()) +
                       " outputs, expected " + std::to_string(sig.outputs.size()));
  std::set<std::string> names;
  for (const auto* list : {&idiom.inputs, &idiom.fresh, &idiom.bind})
    for (const auto& n : *list)
      if (!names.insert(n).second) problems.push_back("idiom '" + idiom.label + "' declares '" + n + "' twice");
  std::set<std::string> inputs(idiom.inputs.begin(), idiom.inputs.end());

  auto check = [&](const std::string& text, const std::vector<std::string>& holes, const std::string& where) {
    std::vector<detail::Piece> pieces;
    try {
      pieces = detail::scan_template(text);
    } catch (const InstantiationError& e) {
      problems.push_back(e.what());
      return;
    }
    for (const auto& p : pieces) {
      if (p.kind == detail::Piece::Kind::hole) {
        if (std::find(holes.begin(), holes.end(), p.text) == holes.end())
          problems.push_back(where + " of '" + idiom.label + "' uses undeclared hole '" + p.text + "'");
      } else if (p.kind == detail::Piece::Kind::ref) {
        if (!names.count(p.text)) problems.push_back(where + " of '" + idiom.label + "' uses unknown name '" + p.text + "'");
      } else if (p.kind == detail::Piece::Kind::apply) {
        if (!inputs.count(p.text))
          problems.push_back(where + " of '" + idiom.label + "' applies '" + p.text + "', which is not an input");
        for (const auto& a : p.args)
          if (!names.count(a)) problems.push_back(where + " of '" + idiom.label + "' uses unknown name '" + a + "'");
      }
    }
  };
  check(idiom.emits, {}, "visible fragment");
  for (std::size_t i = 0; i < idiom.outputs.size(); ++i)
    check(idiom.outputs[i].text, idiom.outputs[i].holes, "output " + std::to_string(i));
  return problems;
}

template <class Kind>
struct Instance {
  typename Kind::Fragment fragment;
  std::vector<Value> outputs;  // values reaching the diagram outputs
};

using Choice = std::map<std::string, std::size_t>;

namespace detail {

// Expands one template. Partial inputs may only be applied; `allow_holes`
// admits {?h} markers (partial outputs).
template <class Kind>
std::string expand(const std::vector<Piece>& pieces, const std::map<std::string, Value>& inputs,
                   const std::map<std::string, std::string>& names, bool allow_holes, const std::string& where) {
  auto resolve_arg = [&](const std::string& a) -> std::string {
    if (auto n = names.find(a); n != names.end()) return n->second;
    auto v = inputs.find(a);
    if (v == inputs.end()) throw InstantiationError(where + ": unknown name '" + a + "'");
    if (v->second.partial()) throw InstantiationError(where + ": partial value '" + a + "' used as an argument");
    return Kind::embed(v->second.text);
  };
  std::string out;
  for (const auto& p : pieces) {
    switch (p.kind) {
      case Piece::Kind::text: out += p.text; break;
      case Piece::Kind::hole:
        if (!allow_holes) throw InstantiationError(where + ": hole '" + p.text + "' outside a partial output");
        out += hole_marker(p.text);
        break;
      case Piece::Kind::ref: {
        if (auto n = names.find(p.text); n != names.end()) {
          out += n->second;
          break;
        }
        auto v = inputs.find(p.text);
        if (v == inputs.end()) throw InstantiationError(where + ": unknown name '" + p.text + "'");
        if (v->second.partial())
          throw InstantiationError(where + ": partial value '" + p.text + "' reaches a visible position");
        out += Kind::embed(v->second.text);
        break;
      }
      case Piece::Kind::apply: {
        auto v = inputs.find(p.text);
        if (v == inputs.end()) throw InstantiationError(where + ": '" + p.text + "' is not an input");
        std::vector<std::string> args;
        for (const auto& a : p.args) args.push_back(resolve_arg(a));
        if (v->second.partial()) {
          if (args.size() != v->second.holes.size())
            throw InstantiationError(where + ": '" + p.text + "' has " + std::to_string(v->second.holes.size()) +
                                     " holes but " + std::to_string(args.size()) + " arguments");
          out += Kind::embed(fill_holes(v->second, args));
        } else {
          std::string applied = Kind::embed(v->second.text);
          for (const auto& a : args) applied += " " + a;
          out += Kind::embed(applied);
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

// Instantiates an abstract implementation: visits boxes in `order`, feeds
// each chosen concrete idiom the values on its input wires, and folds the
// visible fragments with the kind's monoid. Boxes missing from `choice` use
// idiom 0.
template <class Kind>
Instance<Kind> instantiate(const Diagram& impl, const IdiomLibrary& lib, const Choice& choice,
                           const std::vector<std::string>& order, const std::vector<Value>& inputs = {},
                           NameSupply names = {}) {
  if (lib.kind != Kind::kind)
    throw InstantiationError("library '" + lib.name + "' is for " + to_string(lib.kind) + " artifacts");
  if (!impl.is_abstract_implementation())
    throw InstantiationError("only diagrams of plain idioms can be instantiated");
  if (order.size() != impl.boxes.size()) throw InstantiationError("order does not cover every box");
  if (inputs.size() != impl.boundary.inputs.size())
    throw InstantiationError("expected " + std::to_string(impl.boundary.inputs.size()) + " diagram inputs");

  std::map<std::string, const ConcreteIdiom*> chosen;
  for (const auto& id : order) {
    const Box* box = impl.find(id);
    if (!box || chosen.count(id)) throw InstantiationError("order is not a permutation of the boxes");
    const auto* options = lib.find(box->sig.label);
    if (!options)
      throw InstantiationError("no " + std::string(to_string(lib.kind)) + " idiom for '" + box->sig.label + "'");
    auto it = choice.find(id);
    std::size_t k = it == choice.end() ? 0 : it->second;
    if (k >= options->size())
      throw InstantiationError("choice " + std::to_string(k) + " out of range for '" + box->sig.label + "'");
    chosen[id] = &(*options)[k];
  }

  // Bound names are reserved up front so fresh names never take them.
  std::map<std::string, std::map<std::string, std::string>> box_names;
  for (const auto& id : order) {
    const auto& idiom = *chosen[id];
    for (std::size_t i = 0; i < idiom.bind.size(); ++i)
      box_names[id][idiom.bind[i]] = names.fresh(i == 0 ? name_base(id) : idiom.bind[i]);
  }

  std::map<Port, Value> produced;
  auto value_at = [&](const Port& source) -> const Value& {
    if (source.on_boundary()) return inputs.at(source.index);
    auto it = produced.find(source);
    if (it == produced.end()) throw InstantiationError("order visits a consumer before " + describe_source(source));
    return it->second;
  };

  auto fragment = Kind::identity();
  for (const auto& id : order) {
    const Box& box = *impl.find(id);
    const auto& idiom = *chosen[id];
    std::string where = "box '" + id + "' (" + idiom.label + ")";
    if (idiom.inputs.size() != box.sig.inputs.size() || idiom.outputs.size() != box.sig.outputs.size())
      throw InstantiationError(where + ": idiom does not match the signature");

    std::map<std::string, Value> in;
    for (std::size_t i = 0; i < idiom.inputs.size(); ++i) {
      const Wire* w = impl.source_of({id, i});
      if (!w) throw InstantiationError(where + ": input " + std::to_string(i) + " is not connected");
      in[idiom.inputs[i]] = value_at(w->source);
    }
    auto& local = box_names[id];
    for (const auto& f : idiom.fresh) local[f] = names.fresh(f);

    if (!idiom.emits.empty()) {
      auto text = detail::expand<Kind>(detail::scan_template(idiom.emits), in, local, false, where);
      try {
        fragment = Kind::combine(std::move(fragment), Kind::parse(text));
      } catch (const ParseError& e) {
        throw InstantiationError(where + ": fragment does not parse: " + e.what() + "\n" + text);
      }
    }
    for (std::size_t k = 0; k < idiom.outputs.size(); ++k) {
      const auto& out = idiom.outputs[k];
      auto pieces = detail::scan_template(out.text);
      // A bare reference to a partial input forwards it unchanged.
      if (pieces.size() == 1 && pieces[0].kind == detail::Piece::Kind::ref && in.count(pieces[0].text) &&
          out.holes.empty()) {
        produced[{id, k}] = in[pieces[0].text];
        continue;
      }
      Value v{detail::expand<Kind>(pieces, in, local, !out.holes.empty(), where), out.holes};
      produced[{id, k}] = std::move(v);
    }
  }

  Instance<Kind> result{std::move(fragment), {}};
  for (std::size_t i = 0; i < impl.boundary.outputs.size(); ++i) {
    const Wire* w = impl.source_of({"", i});
    if (!w) throw InstantiationError("diagram output " + std::to_string(i) + " is not connected");
    const Value& v = value_at(w->source);
    if (v.partial()) throw InstantiationError("partial value reaches diagram output " + std::to_string(i));
    result.outputs.push_back(v);
  }
  return result;
}

// Instantiates and renders; the rendered artifact contains no hole markers.
inline std::string instantiate_text(const Diagram& impl, const IdiomLibrary& lib, const Choice& choice,
                                    const std::vector<std::string>& order) {
  return with_kind(lib.kind, [&](auto k) {
    using Kind = decltype(k);
    auto text = Kind::render(instantiate<Kind>(impl, lib, choice, order).fragment);
    if (detail::has_hole_marker(text)) throw InstantiationError("unfilled hole in artifact");
    return text;
  });
}

}  // namespace idiomgen
