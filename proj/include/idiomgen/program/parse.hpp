#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idiomgen/error.hpp"
#include "idiomgen/program/ast.hpp"

namespace idiomgen::program {

// Reader for the layout-sensitive Haskell subset used by program idioms.
// Expressions are line-local except for a trailing `do`, whose block is the
// following run of more-indented lines.
class Parser {
 public:
  explicit Parser(std::string_view text, std::string source = "<program>") : source_(std::move(source)) {
    tokenize(text);
  }

  // A full program: `main = do` followed by its block.
  Program program() {
    if (lines_.empty()) throw error("expected 'main = do'");
    const auto& head = lines_.front().toks;
    if (head.size() != 3 || head[0].text != "main" || head[1].text != "=" || head[2].text != "do")
      throw error("expected 'main = do'");
    line_ = 1;
    Program p;
    if (line_ < lines_.size()) {
      int indent = lines_[line_].indent;
      if (indent == 0) throw error("program body must be indented");
      p.stmts = block(indent);
    }
    if (line_ < lines_.size()) throw error("unexpected dedent");
    return p;
  }

  // A run of statements at the indentation of the first line.
  std::vector<Stmt> fragment() {
    if (lines_.empty()) return {};
    auto stmts = block(lines_.front().indent);
    if (line_ < lines_.size()) throw error("unexpected dedent");
    return stmts;
  }

  // A single expression; a trailing `do` may pull in following lines.
  ExprPtr expression() {
    if (lines_.empty()) throw error("expected an expression");
    auto e = expr_to_eol(lines_.front().indent);
    if (line_ < lines_.size()) throw error("unexpected input after expression");
    return e;
  }

 private:
  struct Token {
    enum class Kind { ident, integer, op, punct, keyword } kind;
    std::string text;
    int column;
  };
  struct Line {
    int number;
    int indent;
    std::vector<Token> toks;
  };

  std::string source_;
  std::vector<Line> lines_;
  std::size_t line_ = 0;
  std::size_t tok_ = 0;

  static bool is_op_char(char c) { return std::string_view("+-*=/<>.$|&:!").find(c) != std::string_view::npos; }
  static bool is_keyword(std::string_view s) {
    return s == "let" || s == "do" || s == "if" || s == "then" || s == "else" || s == "in" || s == "where";
  }

  ParseError error(const std::string& message) const {
    int line = 0, column = 0;
    if (line_ < lines_.size()) {
      line = lines_[line_].number;
      const auto& toks = lines_[line_].toks;
      column = tok_ < toks.size() ? toks[tok_].column : (toks.empty() ? 1 : toks.back().column);
    } else if (!lines_.empty()) {
      line = lines_.back().number;
    }
    return ParseError(source_, line, column, message);
  }

  void tokenize(std::string_view text) {
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(start, end - start);
      ++number;
      start = end + 1;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      Line line{number, 0, {}};
      std::size_t i = 0;
      while (i < raw.size() && raw[i] == ' ') ++i;
      if (i < raw.size() && raw[i] == '\t') throw ParseError(source_, number, static_cast<int>(i + 1), "tabs are not allowed");
      line.indent = static_cast<int>(i);
      while (i < raw.size()) {
        char c = raw[i];
        int column = static_cast<int>(i + 1);
        if (c == ' ') {
          ++i;
        } else if (c == '-' && i + 1 < raw.size() && raw[i + 1] == '-') {
          break;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
          std::size_t j = i;
          while (j < raw.size() && (std::isalnum(static_cast<unsigned char>(raw[j])) || raw[j] == '_' || raw[j] == '\''))
            ++j;
          std::string word(raw.substr(i, j - i));
          line.toks.push_back({is_keyword(word) ? Token::Kind::keyword : Token::Kind::ident, word, column});
          i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
          std::size_t j = i;
          while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) ++j;
          line.toks.push_back({Token::Kind::integer, std::string(raw.substr(i, j - i)), column});
          i = j;
        } else if (is_op_char(c)) {
          std::size_t j = i;
          while (j < raw.size() && is_op_char(raw[j])) ++j;
          line.toks.push_back({Token::Kind::op, std::string(raw.substr(i, j - i)), column});
          i = j;
        } else if (std::string_view("()[],\\").find(c) != std::string_view::npos) {
          line.toks.push_back({Token::Kind::punct, std::string(1, c), column});
          ++i;
        } else {
          throw ParseError(source_, number, column, std::string("unexpected character '") + c + "'");
        }
      }
      if (!line.toks.empty()) lines_.push_back(std::move(line));
      if (end == text.size()) break;
    }
  }

  const std::vector<Token>& toks() const { return lines_[line_].toks; }
  const Token* peek(std::size_t ahead = 0) const {
    if (line_ >= lines_.size()) return nullptr;
    return tok_ + ahead < toks().size() ? &toks()[tok_ + ahead] : nullptr;
  }
  bool peek_is(std::string_view text, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t && t->kind != Token::Kind::integer && t->text == text;
  }
  bool at_eol() const { return peek() == nullptr; }
  Token next() {
    const Token* t = peek();
    if (!t) throw error("unexpected end of line");
    ++tok_;
    return *t;
  }
  void expect(std::string_view text) {
    if (!peek_is(text)) throw error("expected '" + std::string(text) + "'");
    ++tok_;
  }
  std::string ident() {
    const Token* t = peek();
    if (!t || t->kind != Token::Kind::ident) throw error("expected identifier");
    ++tok_;
    return t->text;
  }
  void end_line() {
    if (!at_eol()) throw error("unexpected '" + peek()->text + "'");
    ++line_;
    tok_ = 0;
  }

  std::vector<Stmt> block(int indent) {
    std::vector<Stmt> stmts;
    while (line_ < lines_.size() && lines_[line_].indent >= indent) {
      if (lines_[line_].indent > indent) throw error("unexpected indentation");
      stmts.push_back(statement());
    }
    return stmts;
  }

  Stmt statement() {
    tok_ = 0;
    int indent = lines_[line_].indent;
    if (peek_is("let")) {
      next();
      if (at_eol()) {
        end_line();
        if (line_ >= lines_.size() || lines_[line_].indent <= indent) throw error("empty let block");
        return Stmt{LetBlock{definitions(lines_[line_].indent)}};
      }
      FunDef def;
      def.name = ident();
      def.clauses.push_back(clause(indent));
      return Stmt{LetOne{std::move(def)}};
    }
    const Token* first = peek();
    if (first && first->kind == Token::Kind::ident && peek_is("<-", 1)) {
      std::string name = ident();
      next();
      ExprPtr e = expr_to_eol(indent);
      return Stmt{Bind{std::move(name), std::move(e)}};
    }
    return Stmt{ExprStmt{expr_to_eol(indent)}};
  }

  std::vector<FunDef> definitions(int indent) {
    std::vector<FunDef> defs;
    while (line_ < lines_.size() && lines_[line_].indent >= indent) {
      if (lines_[line_].indent > indent) throw error("unexpected indentation");
      tok_ = 0;
      std::string name = ident();
      Clause c = clause(indent);
      if (defs.empty() || defs.back().name != name) defs.push_back(FunDef{name, {}});
      defs.back().clauses.push_back(std::move(c));
    }
    for (const auto& d : defs)
      for (const auto& c : d.clauses)
        if (c.params.size() != d.clauses.front().params.size())
          throw error("clauses of '" + d.name + "' differ in arity");
    return defs;
  }

  // Parameters, then `= body` or guard lines. Cursor is after the name.
  Clause clause(int indent) {
    Clause c;
    while (!at_eol() && !peek_is("=")) c.params.push_back(pattern());
    if (peek_is("=")) {
      next();
      c.body = expr_to_eol(indent);
      return c;
    }
    end_line();
    if (line_ >= lines_.size() || lines_[line_].indent <= indent) throw error("expected '=' or guards");
    int guard_indent = lines_[line_].indent;
    while (line_ < lines_.size() && lines_[line_].indent == guard_indent) {
      tok_ = 0;
      expect("|");
      ExprPtr cond = expr(0);
      expect("=");
      ExprPtr body = expr_to_eol(guard_indent);
      c.guards.push_back({std::move(cond), std::move(body)});
    }
    return c;
  }

  Pattern pattern() {
    Pattern p;
    const Token* t = peek();
    if (!t) throw error("expected pattern");
    if (t->kind == Token::Kind::ident) {
      p.name = next().text;
    } else if (t->kind == Token::Kind::integer) {
      p.kind = Pattern::Kind::integer;
      p.value = std::stoll(next().text);
    } else if (peek_is("[") && peek_is("]", 1)) {
      next();
      next();
      p.kind = Pattern::Kind::empty_list;
    } else if (peek_is("(") && peek_is("-", 1)) {
      next();
      next();
      p.kind = Pattern::Kind::integer;
      p.value = -std::stoll(next().text);
      expect(")");
    } else {
      throw error("unsupported pattern '" + t->text + "'");
    }
    return p;
  }

  // Parses an expression that ends the current line; a trailing `do` pulls
  // in the following indented block. `indent` is the indentation of the
  // line that owns the expression.
  ExprPtr expr_to_eol(int indent) {
    owner_indent_ = indent;
    ExprPtr e = expr(0);
    if (!pending_do_) end_line();
    pending_do_ = false;
    return e;
  }

  int owner_indent_ = 0;
  bool pending_do_ = false;

  static std::optional<std::pair<BinOp, int>> binop(std::string_view s) {
    if (s == "+") return std::pair{BinOp::add, 6};
    if (s == "-") return std::pair{BinOp::sub, 6};
    if (s == "*") return std::pair{BinOp::mul, 7};
    if (s == "++") return std::pair{BinOp::append, 5};
    if (s == "==") return std::pair{BinOp::eq, 4};
    if (s == "/=") return std::pair{BinOp::ne, 4};
    if (s == "<") return std::pair{BinOp::lt, 4};
    if (s == "<=") return std::pair{BinOp::le, 4};
    if (s == ">") return std::pair{BinOp::gt, 4};
    if (s == ">=") return std::pair{BinOp::ge, 4};
    if (s == ".") return std::pair{BinOp::compose, 9};
    return std::nullopt;
  }
  static bool right_assoc(BinOp op) { return op == BinOp::append || op == BinOp::compose; }
  static bool non_assoc(int prec) { return prec == 4; }

  ExprPtr expr(int min_prec) {
    ExprPtr lhs = application();
    while (!pending_do_) {
      const Token* t = peek();
      if (!t || t->kind != Token::Kind::op) break;
      if (t->text == "$") {
        if (min_prec > 0) break;
        next();
        lhs = make(App{lhs, expr(0)});
        continue;
      }
      auto op = binop(t->text);
      if (!op || op->second < min_prec) break;
      next();
      int next_prec = right_assoc(op->first) ? op->second : op->second + 1;
      ExprPtr rhs = expr(next_prec);
      lhs = make(Binary{op->first, lhs, rhs});
      if (non_assoc(op->second)) {
        const Token* u = peek();
        if (u && u->kind == Token::Kind::op) {
          auto again = binop(u->text);
          if (again && again->second == op->second) throw error("comparison operators are non-associative");
        }
      }
    }
    return lhs;
  }

  bool starts_argument() const {
    const Token* t = peek();
    if (!t || pending_do_) return false;
    if (t->kind == Token::Kind::ident || t->kind == Token::Kind::integer) return true;
    return t->kind == Token::Kind::punct && (t->text == "(" || t->text == "[");
  }

  ExprPtr application() {
    ExprPtr f = atom();
    while (starts_argument()) f = make(App{f, atom()});
    return f;
  }

  ExprPtr atom() {
    const Token* t = peek();
    if (!t) throw error("expected expression");
    switch (t->kind) {
      case Token::Kind::integer: return make(IntLit{std::stoll(next().text)});
      case Token::Kind::ident: return make(Var{next().text});
      default: break;
    }
    if (t->text == "-" && peek(1) && peek(1)->kind == Token::Kind::integer) {
      next();
      return make(IntLit{-std::stoll(next().text)});
    }
    if (t->text == "(") return parenthesized();
    if (t->text == "[") {
      next();
      ListLit list;
      if (!peek_is("]")) {
        list.items.push_back(expr(0));
        while (peek_is(",")) {
          next();
          list.items.push_back(expr(0));
        }
      }
      expect("]");
      return make(std::move(list));
    }
    if (t->text == "\\") {
      next();
      Lambda lam;
      while (!peek_is("->")) lam.params.push_back(ident());
      if (lam.params.empty()) throw error("lambda without parameters");
      expect("->");
      lam.body = expr(0);
      return make(std::move(lam));
    }
    if (t->text == "if") {
      next();
      If e;
      e.cond = expr(0);
      expect("then");
      e.then_branch = expr(0);
      expect("else");
      e.else_branch = expr(0);
      return make(std::move(e));
    }
    if (t->text == "do") {
      next();
      if (!at_eol()) throw error("'do' must end the line");
      int indent = owner_indent_;
      ++line_;
      tok_ = 0;
      if (line_ >= lines_.size() || lines_[line_].indent <= indent) throw error("empty do block");
      Do d{block(lines_[line_].indent)};
      pending_do_ = true;
      return make(std::move(d));
    }
    throw error("unexpected '" + t->text + "'");
  }

  ExprPtr parenthesized() {
    expect("(");
    if (peek_is(")")) {
      next();
      return make(Unit{});
    }
    const Token* t = peek();
    if (t->kind == Token::Kind::op && !(t->text == "-" && peek(1) && peek(1)->kind == Token::Kind::integer)) {
      auto op = binop(t->text);
      if (!op) throw error("unknown operator '" + t->text + "'");
      next();
      if (peek_is(")")) {
        next();
        return make(Section{op->first, nullptr, nullptr});
      }
      ExprPtr right = expr(op->second + 1);
      expect(")");
      return make(Section{op->first, nullptr, right});
    }
    ExprPtr inner = expr(0);
    if (peek_is(")")) {
      next();
      return inner;
    }
    const Token* u = peek();
    if (u && u->kind == Token::Kind::op && peek_is(")", 1)) {
      auto op = binop(u->text);
      if (!op) throw error("unknown operator '" + u->text + "'");
      next();
      next();
      return make(Section{op->first, inner, nullptr});
    }
    throw error("expected ')'");
  }
};

inline Program parse_program(std::string_view text) { return Parser(text).program(); }
inline std::vector<Stmt> parse_statements(std::string_view text) { return Parser(text, "<fragment>").fragment(); }
inline ExprPtr parse_expression(std::string_view text) { return Parser(text, "<expression>").expression(); }

}  // namespace idiomgen::program
