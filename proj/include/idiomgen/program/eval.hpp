#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "idiomgen/error.hpp"
#include "idiomgen/program/ast.hpp"
#include "idiomgen/trace.hpp"

namespace idiomgen::program {

class Machine;
struct Value;

struct Function {
  std::string name;
  std::size_t arity;
  std::vector<Value> applied;
  std::function<Value(Machine&, const std::vector<Value>&)> call;
};

// A deferred IO computation.
struct Action {
  std::function<Value(Machine&)> run;
};

struct UnitValue {
  friend bool operator==(UnitValue, UnitValue) { return true; }
};

struct Value {
  std::variant<long long, bool, UnitValue, std::vector<Value>, std::shared_ptr<const Function>,
               std::shared_ptr<const Action>>
      v;
};

// Raised for runtime failures; run_program turns it into an error trace.
class RuntimeError : public LanguageError {
 public:
  using LanguageError::LanguageError;
};

inline std::string show(const Value& value) {
  if (const auto* i = std::get_if<long long>(&value.v)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&value.v)) return *b ? "True" : "False";
  if (std::holds_alternative<UnitValue>(value.v)) return "()";
  if (const auto* l = std::get_if<std::vector<Value>>(&value.v)) {
    std::string s = "[";
    for (std::size_t i = 0; i < l->size(); ++i) s += (i ? "," : "") + show((*l)[i]);
    return s + "]";
  }
  return "<function>";
}

inline bool equal_values(const Value& a, const Value& b) {
  if (a.v.index() != b.v.index()) throw RuntimeError("comparison of values of different types");
  if (const auto* l = std::get_if<std::vector<Value>>(&a.v)) {
    const auto& r = std::get<std::vector<Value>>(b.v);
    if (l->size() != r.size()) return false;
    for (std::size_t i = 0; i < l->size(); ++i)
      if (!equal_values((*l)[i], r[i])) return false;
    return true;
  }
  if (const auto* i = std::get_if<long long>(&a.v)) return *i == std::get<long long>(b.v);
  if (const auto* x = std::get_if<bool>(&a.v)) return *x == std::get<bool>(b.v);
  if (std::holds_alternative<UnitValue>(a.v)) return true;
  throw RuntimeError("functions cannot be compared");
}

// Supplies further input once the fixed stdin runs out; returns nothing to
// signal exhaustion. The argument is the 0-based read index.
using InputFeed = std::function<std::optional<long long>(std::size_t)>;

class Machine {
 public:
  Machine(std::vector<long long> stdin_values, std::size_t step_budget, InputFeed feed = {})
      : stdin_(std::move(stdin_values)), budget_(step_budget), feed_(std::move(feed)) {}

  long long read() {
    tick();
    if (pos_ >= stdin_.size() && feed_) {
      if (auto v = feed_(pos_)) stdin_.push_back(*v);
    }
    if (pos_ >= stdin_.size()) throw RuntimeError("stdin exhausted at read " + std::to_string(pos_ + 1));
    trace_.inputs.push_back(stdin_[pos_]);
    return stdin_[pos_++];
  }
  void write(std::string s) {
    tick();
    trace_.outputs.push_back(std::move(s));
  }
  void tick() {
    if (++steps_ > budget_) throw RuntimeError("step budget exceeded");
  }
  Trace& trace() { return trace_; }

 private:
  std::vector<long long> stdin_;
  std::size_t pos_ = 0;
  std::size_t steps_ = 0;
  std::size_t budget_;
  InputFeed feed_;
  Trace trace_;
};

namespace detail {

struct Scope;
using ScopePtr = std::shared_ptr<const Scope>;

// Persistent environment frame. Local function definitions are stored as
// syntax and closed over on lookup so frames never reference themselves.
struct Scope {
  std::map<std::string, Value> values;
  std::map<std::string, const FunDef*> defs;
  ScopePtr parent;
};

inline Value make_function(std::string name, std::size_t arity,
                           std::function<Value(Machine&, const std::vector<Value>&)> call) {
  return Value{std::make_shared<const Function>(Function{std::move(name), arity, {}, std::move(call)})};
}
inline Value make_action(std::function<Value(Machine&)> run) {
  return Value{std::make_shared<const Action>(Action{std::move(run)})};
}

inline long long as_int(const Value& v) {
  if (const auto* i = std::get_if<long long>(&v.v)) return *i;
  throw RuntimeError("arithmetic on non-integer");
}
inline bool as_bool(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v.v)) return *b;
  throw RuntimeError("condition is not a boolean");
}
inline const std::vector<Value>& as_list(const Value& v) {
  if (const auto* l = std::get_if<std::vector<Value>>(&v.v)) return *l;
  throw RuntimeError("expected a list");
}

inline Value apply(Machine& m, const Value& f, const Value& arg) {
  const auto* fn = std::get_if<std::shared_ptr<const Function>>(&f.v);
  if (!fn) throw RuntimeError("application of a non-function");
  m.tick();
  Function next = **fn;
  next.applied.push_back(arg);
  if (next.applied.size() < next.arity) return Value{std::make_shared<const Function>(std::move(next))};
  return next.call(m, next.applied);
}

inline Value run(Machine& m, const Value& v) {
  const auto* a = std::get_if<std::shared_ptr<const Action>>(&v.v);
  if (!a) throw RuntimeError("expected an IO action");
  return (*a)->run(m);
}

inline Value binary(BinOp op, const Value& l, const Value& r) {
  switch (op) {
    case BinOp::add: return Value{as_int(l) + as_int(r)};
    case BinOp::sub: return Value{as_int(l) - as_int(r)};
    case BinOp::mul: return Value{as_int(l) * as_int(r)};
    case BinOp::append: {
      auto out = as_list(l);
      const auto& tail = as_list(r);
      out.insert(out.end(), tail.begin(), tail.end());
      return Value{std::move(out)};
    }
    case BinOp::eq: return Value{equal_values(l, r)};
    case BinOp::ne: return Value{!equal_values(l, r)};
    case BinOp::lt: return Value{as_int(l) < as_int(r)};
    case BinOp::le: return Value{as_int(l) <= as_int(r)};
    case BinOp::gt: return Value{as_int(l) > as_int(r)};
    case BinOp::ge: return Value{as_int(l) >= as_int(r)};
    case BinOp::compose: break;
  }
  throw RuntimeError("unsupported operator");
}

inline Value operator_function(BinOp op) {
  if (op == BinOp::compose)
    return make_function(".", 3, [](Machine& m, const std::vector<Value>& a) { return apply(m, a[0], apply(m, a[1], a[2])); });
  return make_function(symbol(op), 2, [op](Machine&, const std::vector<Value>& a) { return binary(op, a[0], a[1]); });
}

inline const std::map<std::string, Value>& builtins() {
  static const std::map<std::string, Value> table = [] {
    std::map<std::string, Value> t;
    t["readLn"] = make_action([](Machine& m) { return Value{m.read()}; });
    t["print"] = make_function("print", 1, [](Machine&, const std::vector<Value>& a) {
      Value v = a[0];
      return make_action([v](Machine& m) {
        m.write(show(v));
        return Value{UnitValue{}};
      });
    });
    auto pure = make_function("pure", 1, [](Machine&, const std::vector<Value>& a) {
      Value v = a[0];
      return make_action([v](Machine&) { return v; });
    });
    t["pure"] = pure;
    t["return"] = pure;
    t["replicateM"] = make_function("replicateM", 2, [](Machine&, const std::vector<Value>& a) {
      long long n = as_int(a[0]);
      Value act = a[1];
      return make_action([n, act](Machine& m) {
        std::vector<Value> out;
        for (long long i = 0; i < n; ++i) out.push_back(run(m, act));
        return Value{std::move(out)};
      });
    });
    t["mapM_"] = make_function("mapM_", 2, [](Machine&, const std::vector<Value>& a) {
      Value f = a[0];
      auto xs = as_list(a[1]);
      return make_action([f, xs](Machine& m) {
        for (const auto& x : xs) run(m, apply(m, f, x));
        return Value{UnitValue{}};
      });
    });
    t["sum"] = make_function("sum", 1, [](Machine&, const std::vector<Value>& a) {
      long long s = 0;
      for (const auto& x : as_list(a[0])) s += as_int(x);
      return Value{s};
    });
    t["product"] = make_function("product", 1, [](Machine&, const std::vector<Value>& a) {
      long long s = 1;
      for (const auto& x : as_list(a[0])) s *= as_int(x);
      return Value{s};
    });
    t["length"] = make_function("length", 1, [](Machine&, const std::vector<Value>& a) {
      return Value{static_cast<long long>(as_list(a[0]).size())};
    });
    t["reverse"] = make_function("reverse", 1, [](Machine&, const std::vector<Value>& a) {
      auto xs = as_list(a[0]);
      return Value{std::vector<Value>(xs.rbegin(), xs.rend())};
    });
    t["filter"] = make_function("filter", 2, [](Machine& m, const std::vector<Value>& a) {
      std::vector<Value> out;
      for (const auto& x : as_list(a[1]))
        if (as_bool(apply(m, a[0], x))) out.push_back(x);
      return Value{std::move(out)};
    });
    t["map"] = make_function("map", 2, [](Machine& m, const std::vector<Value>& a) {
      std::vector<Value> out;
      for (const auto& x : as_list(a[1])) out.push_back(apply(m, a[0], x));
      return Value{std::move(out)};
    });
    t["foldr"] = make_function("foldr", 3, [](Machine& m, const std::vector<Value>& a) {
      Value acc = a[1];
      const auto& xs = as_list(a[2]);
      for (auto it = xs.rbegin(); it != xs.rend(); ++it) acc = apply(m, apply(m, a[0], *it), acc);
      return acc;
    });
    t["foldl"] = make_function("foldl", 3, [](Machine& m, const std::vector<Value>& a) {
      Value acc = a[1];
      for (const auto& x : as_list(a[2])) acc = apply(m, apply(m, a[0], acc), x);
      return acc;
    });
    t["negate"] = make_function("negate", 1, [](Machine&, const std::vector<Value>& a) { return Value{-as_int(a[0])}; });
    t["not"] = make_function("not", 1, [](Machine&, const std::vector<Value>& a) { return Value{!as_bool(a[0])}; });
    t["max"] = make_function("max", 2, [](Machine&, const std::vector<Value>& a) {
      return Value{std::max(as_int(a[0]), as_int(a[1]))};
    });
    t["min"] = make_function("min", 2, [](Machine&, const std::vector<Value>& a) {
      return Value{std::min(as_int(a[0]), as_int(a[1]))};
    });
    t["otherwise"] = Value{true};
    t["True"] = Value{true};
    t["False"] = Value{false};
    return t;
  }();
  return table;
}

Value eval(Machine& m, const Expr& e, const ScopePtr& env);
Value run_block(Machine& m, const std::vector<Stmt>& stmts, ScopePtr env);

inline Value call_definition(Machine& m, const FunDef& def, const ScopePtr& env, const std::vector<Value>& args) {
  for (const auto& clause : def.clauses) {
    auto frame = std::make_shared<Scope>();
    frame->parent = env;
    bool matched = true;
    for (std::size_t i = 0; i < clause.params.size() && matched; ++i) {
      const auto& p = clause.params[i];
      switch (p.kind) {
        case Pattern::Kind::var: frame->values[p.name] = args[i]; break;
        case Pattern::Kind::integer: matched = as_int(args[i]) == p.value; break;
        case Pattern::Kind::empty_list: matched = as_list(args[i]).empty(); break;
      }
    }
    if (!matched) continue;
    ScopePtr scope = frame;
    if (clause.body) return eval(m, *clause.body, scope);
    for (const auto& g : clause.guards)
      if (as_bool(eval(m, *g.cond, scope))) return eval(m, *g.body, scope);
  }
  throw RuntimeError("non-exhaustive definition of '" + def.name + "'");
}

inline Value definition_value(Machine& m, const FunDef& def, const ScopePtr& env) {
  std::size_t arity = def.clauses.front().params.size();
  if (arity == 0) return call_definition(m, def, env, {});
  const FunDef* d = &def;
  return make_function(def.name, arity, [d, env](Machine& mm, const std::vector<Value>& a) {
    return call_definition(mm, *d, env, a);
  });
}

inline Value lookup(Machine& m, const std::string& name, const ScopePtr& env) {
  for (const Scope* s = env.get(); s; s = s->parent.get()) {
    if (auto it = s->values.find(name); it != s->values.end()) return it->second;
    if (auto it = s->defs.find(name); it != s->defs.end()) {
      // Rebuild the defining frame pointer so the closure can recurse.
      ScopePtr owner;
      for (ScopePtr p = env; p; p = p->parent)
        if (p.get() == s) owner = p;
      return definition_value(m, *it->second, owner);
    }
  }
  if (auto it = builtins().find(name); it != builtins().end()) return it->second;
  throw RuntimeError("unbound variable '" + name + "'");
}

inline Value eval(Machine& m, const Expr& e, const ScopePtr& env) {
  m.tick();
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) return Value{n.value};
        else if constexpr (std::is_same_v<T, Unit>) return Value{UnitValue{}};
        else if constexpr (std::is_same_v<T, Var>) return lookup(m, n.name, env);
        else if constexpr (std::is_same_v<T, ListLit>) {
          std::vector<Value> items;
          for (const auto& item : n.items) items.push_back(eval(m, *item, env));
          return Value{std::move(items)};
        } else if constexpr (std::is_same_v<T, App>) {
          Value f = eval(m, *n.fn, env);
          return apply(m, f, eval(m, *n.arg, env));
        } else if constexpr (std::is_same_v<T, Binary>) {
          Value l = eval(m, *n.lhs, env);
          Value r = eval(m, *n.rhs, env);
          if (n.op == BinOp::compose) return apply(m, apply(m, operator_function(n.op), l), r);
          return binary(n.op, l, r);
        } else if constexpr (std::is_same_v<T, Section>) {
          Value f = operator_function(n.op);
          if (n.left) return apply(m, f, eval(m, *n.left, env));
          if (n.right) {
            Value r = eval(m, *n.right, env);
            return make_function("section", 1, [f, r](Machine& mm, const std::vector<Value>& a) {
              return apply(mm, apply(mm, f, a[0]), r);
            });
          }
          return f;
        } else if constexpr (std::is_same_v<T, Lambda>) {
          const Lambda* lam = &n;
          ScopePtr captured = env;
          return make_function("lambda", n.params.size(), [lam, captured](Machine& mm, const std::vector<Value>& a) {
            auto frame = std::make_shared<Scope>();
            frame->parent = captured;
            for (std::size_t i = 0; i < lam->params.size(); ++i) frame->values[lam->params[i]] = a[i];
            return eval(mm, *lam->body, frame);
          });
        } else if constexpr (std::is_same_v<T, If>) {
          return as_bool(eval(m, *n.cond, env)) ? eval(m, *n.then_branch, env) : eval(m, *n.else_branch, env);
        } else {
          const Do* d = &n;
          ScopePtr captured = env;
          return make_action([d, captured](Machine& mm) { return run_block(mm, d->stmts, captured); });
        }
      },
      e.node);
}

inline Value run_block(Machine& m, const std::vector<Stmt>& stmts, ScopePtr env) {
  Value last{UnitValue{}};
  for (const auto& stmt : stmts) {
    last = Value{UnitValue{}};
    if (const auto* b = std::get_if<Bind>(&stmt.node)) {
      Value v = run(m, eval(m, *b->expr, env));
      auto frame = std::make_shared<Scope>();
      frame->parent = env;
      frame->values[b->name] = std::move(v);
      env = frame;
    } else if (const auto* one = std::get_if<LetOne>(&stmt.node)) {
      auto frame = std::make_shared<Scope>();
      frame->parent = env;
      if (one->def.clauses.front().params.empty()) {
        frame->values[one->def.name] = call_definition(m, one->def, env, {});
      } else {
        frame->defs[one->def.name] = &one->def;
      }
      env = frame;
    } else if (const auto* block = std::get_if<LetBlock>(&stmt.node)) {
      auto frame = std::make_shared<Scope>();
      frame->parent = env;
      for (const auto& def : block->defs) frame->defs[def.name] = &def;
      env = frame;
    } else {
      last = run(m, eval(m, *std::get<ExprStmt>(stmt.node).expr, env));
    }
  }
  return last;
}

}  // namespace detail

inline constexpr std::size_t kDefaultStepBudget = 1'000'000;

// Runs a program against a fixed stdin. Runtime failures end the trace with
// status `error`.
inline Trace run_program(const Program& p, const std::vector<long long>& stdin_values,
                         std::size_t step_budget = kDefaultStepBudget, InputFeed feed = {}) {
  Machine m(stdin_values, step_budget, std::move(feed));
  try {
    detail::run_block(m, p.stmts, nullptr);
  } catch (const RuntimeError& e) {
    m.trace().status = Trace::Status::error;
    m.trace().message = e.what();
  }
  return m.trace();
}

// Variables referenced but not bound, and binders that rebind a name that
// is still in scope.
inline std::vector<std::string> check_scopes(const Program& p) {
  std::vector<std::string> problems;
  std::vector<std::set<std::string>> scopes{{}};
  auto bound = [&](const std::string& n) {
    for (const auto& s : scopes)
      if (s.count(n)) return true;
    return false;
  };
  auto bind = [&](const std::string& n) {
    if (bound(n)) problems.push_back("rebinds '" + n + "'");
    scopes.back().insert(n);
  };

  std::function<void(const Expr&)> expr;
  std::function<void(const std::vector<Stmt>&)> block;
  auto def = [&](const FunDef& d) {
    for (const auto& c : d.clauses) {
      scopes.emplace_back();
      for (const auto& pat : c.params)
        if (pat.kind == Pattern::Kind::var) bind(pat.name);
      if (c.body) expr(*c.body);
      for (const auto& g : c.guards) expr(*g.cond), expr(*g.body);
      scopes.pop_back();
    }
  };
  expr = [&](const Expr& e) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Var>) {
            if (!bound(n.name) && !detail::builtins().count(n.name)) problems.push_back("unbound '" + n.name + "'");
          } else if constexpr (std::is_same_v<T, ListLit>) {
            for (const auto& i : n.items) expr(*i);
          } else if constexpr (std::is_same_v<T, App>) {
            expr(*n.fn), expr(*n.arg);
          } else if constexpr (std::is_same_v<T, Binary>) {
            expr(*n.lhs), expr(*n.rhs);
          } else if constexpr (std::is_same_v<T, Section>) {
            if (n.left) expr(*n.left);
            if (n.right) expr(*n.right);
          } else if constexpr (std::is_same_v<T, Lambda>) {
            scopes.emplace_back();
            for (const auto& p : n.params) bind(p);
            expr(*n.body);
            scopes.pop_back();
          } else if constexpr (std::is_same_v<T, If>) {
            expr(*n.cond), expr(*n.then_branch), expr(*n.else_branch);
          } else if constexpr (std::is_same_v<T, Do>) {
            block(n.stmts);
          }
        },
        e.node);
  };
  block = [&](const std::vector<Stmt>& stmts) {
    scopes.emplace_back();
    for (const auto& stmt : stmts) {
      if (const auto* b = std::get_if<Bind>(&stmt.node)) {
        expr(*b->expr);
        bind(b->name);
      } else if (const auto* one = std::get_if<LetOne>(&stmt.node)) {
        bool function = !one->def.clauses.front().params.empty();
        if (function) bind(one->def.name);
        def(one->def);
        if (!function) bind(one->def.name);
      } else if (const auto* lb = std::get_if<LetBlock>(&stmt.node)) {
        for (const auto& d : lb->defs) bind(d.name);
        for (const auto& d : lb->defs) def(d);
      } else {
        expr(*std::get<ExprStmt>(stmt.node).expr);
      }
    }
    scopes.pop_back();
  };
  block(p.stmts);
  return problems;
}

}  // namespace idiomgen::program
