#pragma once

#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "idiomgen/program/ast.hpp"

namespace idiomgen::program {

namespace detail {

inline int precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) return n.value < 0 ? 6 : 11;
        else if constexpr (std::is_same_v<T, App>) return 10;
        else if constexpr (std::is_same_v<T, Binary>) {
          switch (n.op) {
            case BinOp::add: case BinOp::sub: return 6;
            case BinOp::mul: return 7;
            case BinOp::append: return 5;
            case BinOp::compose: return 9;
            default: return 4;
          }
        } else if constexpr (std::is_same_v<T, Lambda> || std::is_same_v<T, If> || std::is_same_v<T, Do>) return 0;
        else return 11;
      },
      e.node);
}

inline bool simple_operand(const Expr& e) {
  if (const auto* i = std::get_if<IntLit>(&e.node)) return i->value >= 0;
  return std::holds_alternative<Var>(e.node);
}

inline std::string render_expr(const Expr& e, int context = 0);
inline void render_stmts(const std::vector<Stmt>& stmts, int indent, std::vector<std::string>& out);

inline std::string render_inline_do(const Do& d) {
  std::vector<std::string> lines;
  render_stmts(d.stmts, 0, lines);
  std::string s = "do { ";
  for (std::size_t i = 0; i < lines.size(); ++i) s += (i ? "; " : "") + lines[i];
  return s + " }";
}

inline std::string render_raw(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) return std::to_string(n.value);
        else if constexpr (std::is_same_v<T, Unit>) return "()";
        else if constexpr (std::is_same_v<T, Var>) return n.name;
        else if constexpr (std::is_same_v<T, ListLit>) {
          std::string s = "[";
          for (std::size_t i = 0; i < n.items.size(); ++i) s += (i ? ", " : "") + render_expr(*n.items[i]);
          return s + "]";
        } else if constexpr (std::is_same_v<T, App>) {
          return render_expr(*n.fn, 10) + " " + render_expr(*n.arg, 11);
        } else if constexpr (std::is_same_v<T, Binary>) {
          int p = precedence(e);
          bool right = n.op == BinOp::append || n.op == BinOp::compose;
          bool none = p == 4;
          std::string l = render_expr(*n.lhs, right || none ? p + 1 : p);
          std::string r = render_expr(*n.rhs, right ? p : p + 1);
          bool tight = (n.op == BinOp::add || n.op == BinOp::sub || n.op == BinOp::mul) && simple_operand(*n.lhs) &&
                       simple_operand(*n.rhs);
          return tight ? l + symbol(n.op) + r : l + " " + symbol(n.op) + " " + r;
        } else if constexpr (std::is_same_v<T, Section>) {
          int p = n.op == BinOp::mul ? 7 : n.op == BinOp::append ? 5 : (n.op == BinOp::add || n.op == BinOp::sub) ? 6 : 4;
          if (n.left) return "(" + render_expr(*n.left, p + 1) + " " + symbol(n.op) + ")";
          if (n.right) return std::string("(") + symbol(n.op) + " " + render_expr(*n.right, p + 1) + ")";
          return std::string("(") + symbol(n.op) + ")";
        } else if constexpr (std::is_same_v<T, Lambda>) {
          std::string s = "\\";
          for (std::size_t i = 0; i < n.params.size(); ++i) s += (i ? " " : "") + n.params[i];
          return s + " -> " + render_expr(*n.body);
        } else if constexpr (std::is_same_v<T, If>) {
          return "if " + render_expr(*n.cond) + " then " + render_expr(*n.then_branch) + " else " +
                 render_expr(*n.else_branch);
        } else {
          return render_inline_do(n);
        }
      },
      e.node);
}

inline std::string render_expr(const Expr& e, int context) {
  std::string s = render_raw(e);
  return precedence(e) < context ? "(" + s + ")" : s;
}

inline std::string render_pattern(const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::var: return p.name;
    case Pattern::Kind::empty_list: return "[]";
    case Pattern::Kind::integer: return p.value < 0 ? "(" + std::to_string(p.value) + ")" : std::to_string(p.value);
  }
  return "?";
}

// Emits `prefix rhs`, laying a trailing do-block out on the following lines.
inline void render_rhs(const std::string& prefix, const Expr& e, int indent, std::vector<std::string>& out) {
  if (const auto* d = std::get_if<Do>(&e.node)) {
    out.push_back(std::string(indent, ' ') + prefix + "do");
    render_stmts(d->stmts, indent + 2, out);
    return;
  }
  out.push_back(std::string(indent, ' ') + prefix + render_expr(e));
}

inline void render_def(const std::string& lead, const FunDef& def, int indent, std::vector<std::string>& out) {
  for (const auto& c : def.clauses) {
    std::string head = lead + def.name;
    for (const auto& p : c.params) head += " " + render_pattern(p);
    if (c.body) {
      render_rhs(head + " = ", *c.body, indent, out);
      continue;
    }
    out.push_back(std::string(indent, ' ') + head);
    int guard_indent = indent + static_cast<int>(lead.size()) + 2;
    for (const auto& g : c.guards) render_rhs("| " + render_expr(*g.cond) + " = ", *g.body, guard_indent, out);
  }
}

inline void render_stmts(const std::vector<Stmt>& stmts, int indent, std::vector<std::string>& out) {
  for (const auto& stmt : stmts) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Bind>) {
            render_rhs(s.name + " <- ", *s.expr, indent, out);
          } else if constexpr (std::is_same_v<T, LetOne>) {
            bool one_line = s.def.clauses.size() == 1 && s.def.clauses.front().body;
            if (one_line) {
              render_def("let ", s.def, indent, out);
            } else {
              out.push_back(std::string(indent, ' ') + "let");
              render_def("", s.def, indent + 2, out);
            }
          } else if constexpr (std::is_same_v<T, LetBlock>) {
            out.push_back(std::string(indent, ' ') + "let");
            for (const auto& def : s.defs) render_def("", def, indent + 2, out);
          } else {
            // A single compound argument is passed with `$`.
            const auto* app = std::get_if<App>(&s.expr->node);
            if (app && !std::holds_alternative<App>(app->fn->node) && precedence(*app->arg) < 11) {
              render_rhs(render_expr(*app->fn, 10) + " $ ", *app->arg, indent, out);
            } else {
              render_rhs("", *s.expr, indent, out);
            }
          }
        },
        stmt.node);
  }
}

}  // namespace detail

inline std::vector<std::string> render_statements(const std::vector<Stmt>& stmts, int indent = 0) {
  std::vector<std::string> lines;
  detail::render_stmts(stmts, indent, lines);
  return lines;
}

// Haskell-flavored layout: `main = do`, two-space indentation, one
// statement per line.
inline std::string render_program(const Program& p) {
  std::string out = "main = do\n";
  if (p.stmts.empty()) return out + "  pure ()";
  auto lines = render_statements(p.stmts, 2);
  for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? "\n" : "") + lines[i];
  return out;
}

}  // namespace idiomgen::program
