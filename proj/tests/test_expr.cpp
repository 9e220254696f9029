#include <catch2/catch_amalgamated.hpp>

#include "superint/expr.hpp"
#include "superint/eval.hpp"

using namespace superint;

static cplx ev(const std::string& s, Env env = {}) {
  return eval_at(parse_expr(s), env);
}

TEST_CASE("numeric literals and arithmetic fold exactly") {
  CHECK(ev("2 + 3*4") == cplx(14, 0));
  CHECK(ev("1/3 + 1/6") == cplx(0.5, 0));
  CHECK(parse_expr("1/3 + 1/6").str() == "1/2");
  CHECK(parse_expr("2^10").str() == "1024");
  CHECK(parse_expr("(2/3)^2").str() == "4/9");
  CHECK(parse_expr("2^-2").str() == "1/4");
  CHECK(ev("-2^2") == cplx(-4, 0));  // unary minus binds looser than ^
  CHECK(ev("2^-2") == cplx(0.25, 0));
  CHECK(ev("2^3^2") == cplx(512, 0));  // right associative
}

TEST_CASE("reserved constants") {
  CHECK(ev("I*I") == cplx(-1, 0));
  CHECK(std::abs(ev("pi") - cplx(kPi, 0)) < 1e-15);
  Env env;
  CHECK(ev("hbar") == cplx(1, 0));  // hbar defaults to 1 unless bound
  env["hbar"] = cplx(0.5, 0);
  CHECK(eval_at(parse_expr("hbar"), env) == cplx(0.5, 0));
}

TEST_CASE("precedence and unary minus") {
  CHECK(ev("2 - 3 - 4") == cplx(-5, 0));
  CHECK(ev("2 - -3") == cplx(5, 0));
  CHECK(ev("12 / 3 / 2") == cplx(2, 0));
  CHECK(ev("2 + 3 * 4 ^ 2") == cplx(50, 0));
  Env env{{"x", cplx(2, 0)}};
  CHECK(eval_at(parse_expr("x^-2"), env) == cplx(0.25, 0));
  CHECK(eval_at(parse_expr("-x^2"), env) == cplx(-4, 0));
}

TEST_CASE("functions parse and evaluate") {
  CHECK(std::abs(ev("sin(pi/6)") - cplx(0.5, 0)) < 1e-15);
  CHECK(std::abs(ev("cos(0)") - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(ev("exp(log(7))") - cplx(7, 0)) < 1e-14);
  CHECK(std::abs(ev("sqrt(16)") - cplx(4, 0)) < 1e-14);
  CHECK(std::abs(ev("tan(1) - sin(1)/cos(1)")) < 1e-15);
  CHECK(std::abs(ev("cot(1)*tan(1) - 1")) < 1e-14);
  CHECK(std::abs(ev("sinh(1)") - cplx(std::sinh(1.0), 0)) < 1e-15);
  CHECK(std::abs(ev("cosh(2)") - cplx(std::cosh(2.0), 0)) < 1e-15);
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_expr("2 +"), ParseError);
  CHECK_THROWS_AS(parse_expr("(1 + 2"), ParseError);
  CHECK_THROWS_AS(parse_expr("foo(1)"), ParseError);  // unknown function
  CHECK_THROWS_AS(parse_expr("1 2"), ParseError);
  CHECK_THROWS_AS(parse_expr(""), ParseError);
}

TEST_CASE("identifiers follow the grammar") {
  Env env{{"a_1", cplx(3, 0)}, {"B9z", cplx(4, 0)}, {"_u", cplx(5, 0)}};
  CHECK(eval_at(parse_expr("a_1 + B9z + _u"), env) == cplx(12, 0));
}

TEST_CASE("roundtrip through the printer") {
  for (const char* s : {"x + y*z", "(x + y)*z", "x - (y - z)", "x/(y*z)", "x^(y + 1)",
                        "sin(x)*cos(y) - 1/2", "diff(sin(x*y), x, 2)", "-x + 3/4*y",
                        "sqrt(x^2 + y^2)", "exp(-(x^2))"}) {
    Expr e = parse_expr(s);
    Expr r = parse_expr(e.str());
    Env env{{"x", cplx(0.3, 0.1)}, {"y", cplx(-0.7, 0.2)}, {"z", cplx(1.2, -0.4)}};
    CHECK(std::abs(eval_at(e, env) - eval_at(r, env)) < 1e-12);
  }
}

TEST_CASE("no simplification beyond constant folding") {
  Expr e = parse_expr("x - x");
  CHECK(e.kind() == NodeKind::Sum);  // stays a two-term sum
  Expr f = parse_expr("sin(x)^2 + cos(x)^2");
  CHECK(f.kind() == NodeKind::Sum);
  CHECK(std::abs(eval_at(f, Env{{"x", cplx(0.37, 0)}}) - cplx(1, 0)) < 1e-15);
}

TEST_CASE("zero denominators rejected at fold time") {
  CHECK_THROWS_AS(parse_expr("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("x/(2 - 2)"), std::invalid_argument);
}

TEST_CASE("substitute replaces variables") {
  Expr e = parse_expr("x^2 + y");
  Expr s = substitute(e, "x", parse_expr("u + 1"));
  Env env{{"u", cplx(2, 0)}, {"y", cplx(5, 0)}};
  CHECK(eval_at(s, env) == cplx(14, 0));
  // simultaneous substitution is not sequential
  Expr sw = substitute(parse_expr("x + 2*y"), {{"x", parse_expr("y")}, {"y", parse_expr("x")}});
  CHECK(eval_at(sw, Env{{"x", cplx(10, 0)}, {"y", cplx(1, 0)}}) == cplx(21, 0));
}

TEST_CASE("free variables") {
  auto fv = free_vars(parse_expr("x*sin(y) + diff(f_0^2, t) + pi + I"));
  CHECK(fv == std::set<std::string>{"x", "y", "f_0", "t"});
}

TEST_CASE("formal derivative nodes") {
  Expr e = parse_expr("diff(x^3, x)");
  CHECK(eval_at(e, Env{{"x", cplx(2, 0)}}) == cplx(12, 0));
  Expr e2 = parse_expr("diff(x^3, x, 2)");
  CHECK(eval_at(e2, Env{{"x", cplx(2, 0)}}) == cplx(12, 0));
  Expr mixed = parse_expr("diff(diff(x^2*y^3, x), y)");
  CHECK(eval_at(mixed, Env{{"x", cplx(2, 0)}, {"y", cplx(1, 0)}}) == cplx(12, 0));
  // derivatives of constants fold away
  CHECK(parse_expr("diff(3, x)").is_zero());
  CHECK(parse_expr("diff(y, x)").is_zero());
  CHECK(parse_expr("diff(x, x)").str() == "1");
}

TEST_CASE("complex constants print and reparse") {
  Expr e = make_const(cplx(1.5, -2.25));
  Expr r = parse_expr(e.str());
  CHECK(eval_at(r, {}) == cplx(1.5, -2.25));
}

TEST_CASE("power folding keeps structure sane") {
  Expr x = var("x");
  CHECK(pow(x, make_int(1)).kind() == NodeKind::Variable);
  CHECK(pow(x, make_int(0)).is_one());
  CHECK(prod({make_int(1), x}).kind() == NodeKind::Variable);
  CHECK(prod({make_int(0), x}).is_zero());
  CHECK(sum({make_int(0), x}).kind() == NodeKind::Variable);
}
