#include <doctest.h>

#include <random>

#include "ghostwit/expr.hpp"
#include "ghostwit/parser.hpp"
#include "ghostwit/program.hpp"

using namespace ghostwit;

TEST_CASE("eval arithmetic and comparison") {
  Env env{{"x", 41}};
  CHECK(eval(*parse_expr_text("x + 1"), env) == 42);
  CHECK(eval(*parse_expr_text("x * 2 - 2"), env) == 80);
  CHECK(eval(*parse_expr_text("x == 41"), env) == 1);
  CHECK(eval(*parse_expr_text("x != 41"), env) == 0);
  CHECK(eval(*parse_expr_text("x < 41 || x <= 41"), env) == 1);
  CHECK(eval(*parse_expr_text("-x"), env) == -41);
  CHECK(eval(*parse_expr_text("!x"), env) == 0);
  CHECK(eval(*parse_expr_text("!0"), env) == 1);
  // unassigned locals read as 0
  CHECK(eval(*parse_expr_text("y + 1"), env) == 1);
}

TEST_CASE("eval global placeholder") {
  Value g = 0;
  ExprPtr e = make_binary(BinOp::Eq, make_global_arg(), make_literal(0));
  CHECK(eval(*e, Env{}, &g) == 1);
  g = 47;
  CHECK(eval(*e, Env{}, &g) == 0);
}

TEST_CASE("division truncates toward zero, faults on zero divisor") {
  Env env{{"x", -7}, {"y", 2}};
  CHECK(eval(*parse_expr_text("x / y"), env) == -3);
  CHECK(eval(*parse_expr_text("x % y"), env) == -1);
  CHECK(eval(*parse_expr_text("7 / 2"), env) == 3);
  CHECK(eval(*parse_expr_text("7 % 2"), env) == 1);
  env["y"] = 0;
  CHECK_THROWS_AS(eval(*parse_expr_text("x / y"), env), EvalError);
  CHECK_THROWS_AS(eval(*parse_expr_text("x % y"), env), EvalError);
  // short-circuiting protects guarded divisions
  CHECK(eval(*parse_expr_text("y != 0 && x / y > 0"), env) == 0);
  CHECK(eval(*parse_expr_text("y == 0 || x / y > 0"), env) == 1);
}

TEST_CASE("values are unbounded") {
  Env env{{"x", Value("123456789012345678901234567890")}};
  CHECK(eval(*parse_expr_text("x * x"), env) ==
        Value("15241578753238836750495351562536198787501905199875019052100"));
}

TEST_CASE("implication desugars to disjunction") {
  ExprPtr e = parse_expr_text("a == 1 ==> b == 2");
  CHECK(render_expr(e) == "!(a == 1) || b == 2");
  // right associative
  ExprPtr f = parse_expr_text("a ==> b ==> c");
  CHECK(render_expr(f) == "!a || (!b || c)");
  Env env{{"a", 0}};
  CHECK(eval(*parse_expr_text("a == 1 ==> 1 / 0 > 0"), env) == 1);
}

TEST_CASE("rendering uses minimal parentheses and reparses") {
  const char* samples[] = {
      "(a + b) * c",   "a + b * c",     "a - (b - c)",     "a - b - c",
      "!(a && b) || c", "a && (b || c)", "-(a + 1)",        "-a + 1",
      "a < b == c",     "(a + b) % 2",   "a * (b + c) * d", "!(a == b)",
  };
  for (const char* s : samples) {
    ExprPtr e = parse_expr_text(s);
    ExprPtr again = parse_expr_text(render_expr(e));
    CHECK(render_expr(again) == render_expr(e));
  }
}

namespace {

ExprPtr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
  switch (pick(rng)) {
    case 0: return make_literal(Value(static_cast<int>(rng() % 7) - 3));
    case 1: {
      static const char* names[] = {"a", "b", "c"};
      return make_var(names[rng() % 3]);
    }
    case 2:
      return make_unary(rng() % 2 ? UnOp::Not : UnOp::Neg, random_expr(rng, depth - 1));
    default: {
      static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div,
                                  BinOp::Mod, BinOp::Eq,  BinOp::Ne,  BinOp::Lt,
                                  BinOp::Le,  BinOp::Gt,  BinOp::Ge,  BinOp::And,
                                  BinOp::Or};
      return make_binary(ops[rng() % 13], random_expr(rng, depth - 1),
                         random_expr(rng, depth - 1));
    }
  }
}

}  // namespace

TEST_CASE("random expressions round-trip through text") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    ExprPtr e = random_expr(rng, 4);
    std::string text = render_expr(e);
    ExprPtr back = parse_expr_text(text);
    CHECK(render_expr(back) == text);
    CHECK(expr_equal(e, back));
  }
}

TEST_CASE("substitute maps names and the placeholder") {
  ExprPtr e = parse_expr_text("x + y * x");
  ExprPtr out = substitute(e, {{"x", make_var("used")}});
  CHECK(render_expr(out) == "used + y * used");
  ExprPtr r = substitute(make_binary(BinOp::Add, make_global_arg(), make_var("k")), {},
                         make_var("g"));
  CHECK(render_expr(r) == "g + k");
}

TEST_CASE("referenced vars in first-occurrence order") {
  auto vars = referenced_vars(parse_expr_text("b + a * b + c"));
  REQUIRE(vars.size() == 3);
  CHECK(vars[0] == "b");
  CHECK(vars[1] == "a");
  CHECK(vars[2] == "c");
}

TEST_CASE("thread ids") {
  ThreadId root;
  CHECK(root.str() == "e");
  ThreadId c0 = child_thread_id(root, 0);
  CHECK(c0.path == std::vector<std::uint32_t>{0});
  CHECK(c0.str() == "e.0");
  ThreadId c00 = child_thread_id(c0, 0);
  CHECK(c00.path == (std::vector<std::uint32_t>{0, 0}));
  CHECK(c00.str() == "e.0.0");
  ThreadId c2 = child_thread_id(root, 2);
  CHECK(c2.path == std::vector<std::uint32_t>{2});
  CHECK(c2 > c0);
  CHECK(root < c0);
}
