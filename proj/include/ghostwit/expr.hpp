#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ghostwit {

// Unbounded program integers. Division and modulo truncate toward zero.
using Value = boost::multiprecision::cpp_int;

enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp { Neg, Not };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Literal {
  Value value;
};

// An identifier. Whether it denotes a local, a program global, or a ghost is
// decided by the context the expression is used in (action payloads only ever
// mention locals; witness invariants and ghost initializers may mention
// globals and are lowered before execution).
struct VarRef {
  std::string name;
};

// Placeholder for the single global a GlobalRead action reads; it stands for
// the value of that global in the pre-state of the read.
struct GlobalArg {};

struct Unary {
  UnOp op;
  ExprPtr arg;
};

struct Binary {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Expr {
  std::variant<Literal, VarRef, GlobalArg, Unary, Binary> node;
};

ExprPtr make_literal(Value v);
ExprPtr make_var(std::string name);
ExprPtr make_global_arg();
ExprPtr make_unary(UnOp op, ExprPtr arg);
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
// Implication sugar: lowers a ==> b to !(a) || (b) right away.
ExprPtr make_implies(ExprPtr a, ExprPtr b);

// Raised when evaluation hits division or modulo by zero. Carries the
// rendering of the offending subexpression.
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Environment for evaluation: total over the locals that occur (missing names
// read as 0, matching the all-zeros initial local state).
using Env = std::map<std::string, Value>;

// Evaluates e under the local environment; `global` supplies the value the
// GlobalArg placeholder stands for (may be null when e contains none).
// Boolean operators treat 0 as false and anything else as true and produce
// 0 or 1. Throws EvalError on division/modulo by zero.
Value eval(const Expr& e, const Env& env, const Value* global = nullptr);

// Renders e in C syntax with minimal parentheses; deterministic, so string
// equality of renderings is the canonical structural equality on expressions.
std::string render_expr(const Expr& e);
std::string render_expr(const ExprPtr& e);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Substitutes vars[name] for VarRef(name) and, if global_arg is non-null,
// global_arg for the GlobalArg placeholder. Unmapped nodes are shared.
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& vars,
                   const ExprPtr& global_arg = nullptr);

// Collects the distinct VarRef names in first-occurrence order.
std::vector<std::string> referenced_vars(const ExprPtr& e);

bool contains_global_arg(const ExprPtr& e);

}  // namespace ghostwit
