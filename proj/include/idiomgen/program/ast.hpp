#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace idiomgen::program {

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { add, sub, mul, append, eq, ne, lt, le, gt, ge, compose };

inline const char* symbol(BinOp op) {
  switch (op) {
    case BinOp::add: return "+";
    case BinOp::sub: return "-";
    case BinOp::mul: return "*";
    case BinOp::append: return "++";
    case BinOp::eq: return "==";
    case BinOp::ne: return "/=";
    case BinOp::lt: return "<";
    case BinOp::le: return "<=";
    case BinOp::gt: return ">";
    case BinOp::ge: return ">=";
    case BinOp::compose: return ".";
  }
  return "?";
}

struct IntLit { long long value; };
struct Unit {};
struct Var { std::string name; };
struct ListLit { std::vector<ExprPtr> items; };
struct App { ExprPtr fn; ExprPtr arg; };
struct Binary { BinOp op; ExprPtr lhs; ExprPtr rhs; };
// (+), (== y), (y ==)
struct Section { BinOp op; ExprPtr left; ExprPtr right; };
struct Lambda { std::vector<std::string> params; ExprPtr body; };
struct If { ExprPtr cond; ExprPtr then_branch; ExprPtr else_branch; };
struct Do { std::vector<Stmt> stmts; };

struct Expr {
  std::variant<IntLit, Unit, Var, ListLit, App, Binary, Section, Lambda, If, Do> node;
};

// Clause parameter: a variable, an integer literal or the empty list.
struct Pattern {
  enum class Kind { var, integer, empty_list } kind = Kind::var;
  std::string name;
  long long value = 0;
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct Guard {
  ExprPtr cond;
  ExprPtr body;
};

struct Clause {
  std::vector<Pattern> params;
  ExprPtr body;               // set when the clause is unguarded
  std::vector<Guard> guards;  // otherwise
};

struct FunDef {
  std::string name;
  std::vector<Clause> clauses;
};

// x <- e
struct Bind { std::string name; ExprPtr expr; };
// let f a b = e   (single line, possibly without parameters)
struct LetOne { FunDef def; };
// let
//   f ... (one or more local definitions)
struct LetBlock { std::vector<FunDef> defs; };
struct ExprStmt { ExprPtr expr; };

struct Stmt {
  std::variant<Bind, LetOne, LetBlock, ExprStmt> node;
};

// Body of `main = do`.
struct Program {
  std::vector<Stmt> stmts;
};

inline ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }

}  // namespace idiomgen::program
