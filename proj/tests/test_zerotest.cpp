#include <catch2/catch_amalgamated.hpp>

#include "superint/zerotest.hpp"

using namespace superint;

TEST_CASE("identities pass") {
  for (const char* s : {
           "sin(x)^2 + cos(x)^2 - 1",
           "(x + y)^2 - x^2 - 2*x*y - y^2",
           "sinh(x)*cosh(y) + cosh(x)*sinh(y) - sinh(x + y)",
           "exp(x + y) - exp(x)*exp(y)",
           "tan(x)*cot(x) - 1",
           "cos(x)^2 - (1 + cos(2*x))/2",
       }) {
    auto rep = is_identically_zero(parse_expr(s));
    INFO(s << "  residual=" << rep.max_residual);
    CHECK(rep.verdict == Verdict::Zero);
  }
}

TEST_CASE("non-identities are detected") {
  for (const char* s : {"x^2 - y", "sin(x) - x", "(x + y)^2 - x^2 - y^2", "exp(x) - 1 - x"}) {
    auto rep = is_identically_zero(parse_expr(s));
    INFO(s);
    CHECK(rep.verdict == Verdict::Nonzero);
  }
}

TEST_CASE("near-miss coefficients are caught at default tolerance") {
  Expr e = parse_expr("1.000000002*x - x");
  CHECK(is_identically_zero(e).verdict == Verdict::Nonzero);
  ZeroTestPolicy loose;
  loose.tol = 1e-6;
  CHECK(is_identically_zero(e, loose).verdict == Verdict::Zero);
}

TEST_CASE("residual is normalized by the largest term") {
  // each term is ~1e12 at the sample points but the sum cancels
  Expr e = parse_expr("1000000000000*(x + y) - 1000000000000*x - 1000000000000*y");
  auto rep = is_identically_zero(e);
  CHECK(rep.verdict == Verdict::Zero);
}

TEST_CASE("identically singular expressions come back inconclusive") {
  // denominator x*y - x*y vanishes at every sample point
  Expr e = parse_expr("1/(x*y - x*y)");
  auto rep = is_identically_zero(e);
  CHECK(rep.verdict == Verdict::Inconclusive);
  CHECK(rep.resamples > 0);
}

TEST_CASE("fixed variables are honored") {
  Expr e = parse_expr("h - x*0");  // zero iff h pinned to 0
  ZeroTestPolicy p;
  p.fixed["h"] = cplx(0.0, 0.0);
  CHECK(is_identically_zero(e, p).verdict == Verdict::Zero);
  ZeroTestPolicy q;
  q.fixed["h"] = cplx(2.0, 0.0);
  CHECK(is_identically_zero(e, q).verdict == Verdict::Nonzero);
}

TEST_CASE("same seed gives identical reports") {
  Expr e = parse_expr("sin(2*x) - 2*sin(x)*cos(x)");
  auto a = is_identically_zero(e);
  auto b = is_identically_zero(e);
  CHECK(a.max_residual == b.max_residual);
  CHECK(a.trials_done == b.trials_done);
  ZeroTestPolicy p;
  p.seed = 999;
  auto c = is_identically_zero(e, p);
  CHECK((c.verdict == Verdict::Zero));
}

TEST_CASE("exprs_equal compares across forms") {
  CHECK(exprs_equal(parse_expr("cos(2*x)"), parse_expr("1 - 2*sin(x)^2")).verdict == Verdict::Zero);
  CHECK(exprs_equal(parse_expr("cos(2*x)"), parse_expr("1 - sin(x)^2")).verdict == Verdict::Nonzero);
}

TEST_CASE("z and conj(z) style pairs stay independent") {
  // z and zbar sampled as unrelated complex values: z*zbar - 1 is not zero
  CHECK(is_identically_zero(parse_expr("z*zbar - 1")).verdict == Verdict::Nonzero);
}
