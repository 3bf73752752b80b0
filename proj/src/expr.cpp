#include "ghostwit/expr.hpp"

#include <functional>

namespace ghostwit {

ExprPtr make_literal(Value v) {
  return std::make_shared<const Expr>(Expr{Literal{std::move(v)}});
}

ExprPtr make_var(std::string name) {
  return std::make_shared<const Expr>(Expr{VarRef{std::move(name)}});
}

ExprPtr make_global_arg() { return std::make_shared<const Expr>(Expr{GlobalArg{}}); }

ExprPtr make_unary(UnOp op, ExprPtr arg) {
  return std::make_shared<const Expr>(Expr{Unary{op, std::move(arg)}});
}

ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}

ExprPtr make_implies(ExprPtr a, ExprPtr b) {
  return make_binary(BinOp::Or, make_unary(UnOp::Not, std::move(a)), std::move(b));
}

namespace {

bool truthy(const Value& v) { return v != 0; }

// C-style truncated division: quotient rounds toward zero, remainder takes
// the dividend's sign. cpp_int's operator/ already truncates toward zero.
Value div_trunc(const Value& a, const Value& b) { return a / b; }
Value mod_trunc(const Value& a, const Value& b) { return a % b; }

}  // namespace

Value eval(const Expr& e, const Env& env, const Value* global) {
  struct V {
    const Env& env;
    const Value* global;

    Value operator()(const Literal& l) const { return l.value; }

    Value operator()(const VarRef& v) const {
      auto it = env.find(v.name);
      return it == env.end() ? Value(0) : it->second;
    }

    Value operator()(const GlobalArg&) const {
      if (!global) throw EvalError("global placeholder outside a global read");
      return *global;
    }

    Value operator()(const Unary& u) const {
      Value a = std::visit(*this, u.arg->node);
      switch (u.op) {
        case UnOp::Neg: return -a;
        case UnOp::Not: return truthy(a) ? 0 : 1;
      }
      throw std::logic_error("unary op");
    }

    Value operator()(const Binary& b) const {
      // Short-circuit the boolean connectives so guarded divisions like
      // y != 0 && x / y > 0 do not fault.
      if (b.op == BinOp::And) {
        Value l = std::visit(*this, b.lhs->node);
        if (!truthy(l)) return 0;
        return truthy(std::visit(*this, b.rhs->node)) ? 1 : 0;
      }
      if (b.op == BinOp::Or) {
        Value l = std::visit(*this, b.lhs->node);
        if (truthy(l)) return 1;
        return truthy(std::visit(*this, b.rhs->node)) ? 1 : 0;
      }
      Value l = std::visit(*this, b.lhs->node);
      Value r = std::visit(*this, b.rhs->node);
      switch (b.op) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Div:
          if (r == 0) throw EvalError("division by zero in " + render_expr(Expr{b}));
          return div_trunc(l, r);
        case BinOp::Mod:
          if (r == 0) throw EvalError("modulo by zero in " + render_expr(Expr{b}));
          return mod_trunc(l, r);
        case BinOp::Eq: return l == r ? 1 : 0;
        case BinOp::Ne: return l != r ? 1 : 0;
        case BinOp::Lt: return l < r ? 1 : 0;
        case BinOp::Le: return l <= r ? 1 : 0;
        case BinOp::Gt: return l > r ? 1 : 0;
        case BinOp::Ge: return l >= r ? 1 : 0;
        case BinOp::And:
        case BinOp::Or: break;
      }
      throw std::logic_error("binary op");
    }
  };
  return std::visit(V{env, global}, e.node);
}

namespace {

// Precedence levels, higher binds tighter. Mirrors C.
int prec(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne: return 3;
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod: return 6;
  }
  return 0;
}

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

// All binary operators here associate left to right, so the right operand
// needs parentheses at equal precedence (a - (b - c)) while the left does not.
void render(const Expr& e, int parent_prec, bool right_side, std::string& out) {
  struct V {
    int parent_prec;
    bool right_side;
    std::string& out;

    void operator()(const Literal& l) const { out += l.value.str(); }
    void operator()(const VarRef& v) const { out += v.name; }
    void operator()(const GlobalArg&) const { out += "$G"; }

    void operator()(const Unary& u) const {
      out += u.op == UnOp::Neg ? "-" : "!";
      // Unary binds tighter than any binary operator; parenthesize any
      // non-atomic operand. Negative literals count as non-atomic since
      // !-1 and -(-1) would reparse as nested unaries.
      bool atom = std::holds_alternative<VarRef>(u.arg->node) ||
                  std::holds_alternative<GlobalArg>(u.arg->node) ||
                  (std::holds_alternative<Literal>(u.arg->node) &&
                   std::get<Literal>(u.arg->node).value >= 0);
      if (atom) {
        render(*u.arg, 100, false, out);
      } else {
        out += '(';
        render(*u.arg, 0, false, out);
        out += ')';
      }
    }

    void operator()(const Binary& b) const {
      int p = prec(b.op);
      bool need = p < parent_prec || (p == parent_prec && right_side);
      if (need) out += '(';
      render(*b.lhs, p, false, out);
      out += ' ';
      out += op_text(b.op);
      out += ' ';
      render(*b.rhs, p, true, out);
      if (need) out += ')';
    }
  };
  std::visit(V{parent_prec, right_side, out}, e.node);
}

}  // namespace

std::string render_expr(const Expr& e) {
  std::string out;
  render(e, 0, false, out);
  return out;
}

std::string render_expr(const ExprPtr& e) { return render_expr(*e); }

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return render_expr(a) == render_expr(b);
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& vars,
                   const ExprPtr& global_arg) {
  struct V {
    const std::map<std::string, ExprPtr>& vars;
    const ExprPtr& global_arg;

    ExprPtr visit(const ExprPtr& e) const {
      if (auto* v = std::get_if<VarRef>(&e->node)) {
        auto it = vars.find(v->name);
        return it == vars.end() ? e : it->second;
      }
      if (std::holds_alternative<GlobalArg>(e->node)) {
        return global_arg ? global_arg : e;
      }
      if (auto* u = std::get_if<Unary>(&e->node)) {
        ExprPtr a = visit(u->arg);
        return a == u->arg ? e : make_unary(u->op, a);
      }
      if (auto* b = std::get_if<Binary>(&e->node)) {
        ExprPtr l = visit(b->lhs);
        ExprPtr r = visit(b->rhs);
        return (l == b->lhs && r == b->rhs) ? e : make_binary(b->op, l, r);
      }
      return e;
    }
  };
  return V{vars, global_arg}.visit(e);
}

std::vector<std::string> referenced_vars(const ExprPtr& e) {
  std::vector<std::string> out;
  std::function<void(const ExprPtr&)> go = [&](const ExprPtr& e) {
    if (auto* v = std::get_if<VarRef>(&e->node)) {
      for (const auto& n : out)
        if (n == v->name) return;
      out.push_back(v->name);
    } else if (auto* u = std::get_if<Unary>(&e->node)) {
      go(u->arg);
    } else if (auto* b = std::get_if<Binary>(&e->node)) {
      go(b->lhs);
      go(b->rhs);
    }
  };
  go(e);
  return out;
}

bool contains_global_arg(const ExprPtr& e) {
  if (std::holds_alternative<GlobalArg>(e->node)) return true;
  if (auto* u = std::get_if<Unary>(&e->node)) return contains_global_arg(u->arg);
  if (auto* b = std::get_if<Binary>(&e->node))
    return contains_global_arg(b->lhs) || contains_global_arg(b->rhs);
  return false;
}

}  // namespace ghostwit
