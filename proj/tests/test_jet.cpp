#include <catch2/catch_amalgamated.hpp>

#include "superint/eval.hpp"

using namespace superint;

namespace {

// Independent oracle: central finite differences of mixed partials on the
// real axis. h chosen for ~1e-8 accuracy on smooth functions.
double fd_partial(const Expr& e, const Env& base, const std::string& vx, const std::string& vy,
                  int kx, int ky) {
  // larger step for third derivatives: rounding noise scales as eps/h^3
  const double h = (kx + ky >= 3) ? 1.5e-3 : 1e-4;
  auto val = [&](double dx, double dy) {
    Env env = base;
    env[vx] += cplx(dx, 0.0);
    env[vy] += cplx(dy, 0.0);
    return eval_at(e, env).real();
  };
  auto dx1 = [&](double dy) {
    switch (kx) {
      case 0: return val(0, dy);
      case 1: return (val(h, dy) - val(-h, dy)) / (2 * h);
      case 2: return (val(h, dy) - 2 * val(0, dy) + val(-h, dy)) / (h * h);
      default: return (val(2 * h, dy) - 2 * val(h, dy) + 2 * val(-h, dy) - val(-2 * h, dy)) / (2 * h * h * h);
    }
  };
  switch (ky) {
    case 0: return dx1(0);
    case 1: return (dx1(h) - dx1(-h)) / (2 * h);
    case 2: return (dx1(h) - 2 * dx1(0) + dx1(-h)) / (h * h);
    default: return (dx1(2 * h) - 2 * dx1(h) + 2 * dx1(-h) - dx1(-2 * h)) / (2 * h * h * h);
  }
}

void check_against_fd(const std::string& src, Env base, double tol = 5e-5) {
  Expr e = parse_expr(src);
  Evaluator ev(base);
  Jet j = ev.jet(e, {"x", "y"}, 4);
  double fact[5] = {1, 1, 2, 6, 24};
  for (int kx = 0; kx <= 3; ++kx)
    for (int ky = 0; ky <= 3 - kx; ++ky) {
      const double fd = fd_partial(e, base, "x", "y", kx, ky);
      const cplx coef = j.coeff(MIdx{(std::uint8_t)kx, (std::uint8_t)ky, 0, 0});
      const double jetval = (coef * fact[kx] * fact[ky]).real();
      const double scale = std::max(1.0, std::abs(fd));
      INFO(src << "  d^(" << kx << "," << ky << ")  fd=" << fd << " jet=" << jetval);
      CHECK(std::abs(jetval - fd) / scale < tol);
    }
}

}  // namespace

TEST_CASE("jet coefficients match finite differences") {
  Env base{{"x", cplx(0.7, 0)}, {"y", cplx(-0.4, 0)}};
  check_against_fd("x^3*y^2 + 2*x*y - 5", base);
  check_against_fd("sin(x*y) + cos(x - y)", base);
  check_against_fd("exp(x/2)*log(3 + y)", base);
  check_against_fd("sqrt(4 + x^2 + y^2)", base);
  check_against_fd("(x + 2*y)/(3 + x*y)", base);
  check_against_fd("tan(x/2) + cot(2 + y)", base);
  check_against_fd("sinh(x)*cosh(y)", base);
  check_against_fd("x^-2 + y^-3", Env{{"x", cplx(1.3, 0)}, {"y", cplx(1.7, 0)}});
  check_against_fd("(1 + x^2)^(3/2)", base);
}

TEST_CASE("formal derivative nodes evaluate through jets") {
  Env base{{"x", cplx(0.5, 0)}, {"y", cplx(0.25, 0)}};
  // diff(f, x) evaluated as a jet in y only still sees x as a derivative direction
  Expr e = parse_expr("diff(sin(x*y), x)");
  Evaluator ev(base);
  CHECK(std::abs(ev.value(e) - cplx(0.25 * std::cos(0.125), 0)) < 1e-14);
  Jet jy = ev.jet(e, {"y"}, 2);
  // d/dy of y*cos(x*y) = cos(xy) - x*y*sin(xy)
  const double expect = std::cos(0.125) - 0.5 * 0.25 * std::sin(0.125);
  CHECK(std::abs(jy.coeff(MIdx{1, 0, 0, 0}).real() - expect) < 1e-12);
}

TEST_CASE("jet arithmetic truncates consistently") {
  auto lay = JetLayout::get(2, 5);
  Jet x = Jet::variable(lay, 0, cplx(0.3, 0));
  Jet y = Jet::variable(lay, 1, cplx(2.0, 0));
  Jet p = jet_ipow(x + y, 5, 1e-12);
  // compare against evaluator on (x+y)^5
  Evaluator ev(Env{{"x", cplx(0.3, 0)}, {"y", cplx(2.0, 0)}});
  Jet q = ev.jet(parse_expr("(x + y)^5"), {"x", "y"}, 5);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p.at(i) - q.at(i)) < 1e-9);
}

TEST_CASE("series division matches multiplication") {
  auto lay = JetLayout::get(2, 6);
  Evaluator ev(Env{{"x", cplx(0.2, 0.1)}, {"y", cplx(-0.3, 0.4)}});
  Jet a = ev.jet(parse_expr("exp(x) + y^2"), {"x", "y"}, 6);
  Jet b = ev.jet(parse_expr("1 + x + x*y"), {"x", "y"}, 6);
  Jet q = jet_div(a, b, 1e-12);
  Jet back = q * b;
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(back.at(i) - a.at(i)) < 1e-12);
}

TEST_CASE("domain guard raises on small denominators") {
  Evaluator ev(Env{{"x", cplx(1e-14, 0)}});
  CHECK_THROWS_AS(ev.value(parse_expr("1/x")), EvalDomainError);
  CHECK_THROWS_AS(ev.value(parse_expr("log(x)")), EvalDomainError);
  CHECK_THROWS_AS(ev.value(parse_expr("sqrt(x)")), EvalDomainError);
  Evaluator loose(Env{{"x", cplx(1e-3, 0)}}, 1e-6);
  CHECK_NOTHROW(loose.value(parse_expr("1/x")));
  Evaluator strict(Env{{"x", cplx(1e-3, 0)}}, 1e-2);
  CHECK_THROWS_AS(strict.value(parse_expr("1/x")), EvalDomainError);
}

TEST_CASE("active variable cap enforced") {
  Evaluator ev(Env{{"a", cplx(1, 0)}, {"b", cplx(1, 0)}, {"c", cplx(1, 0)}, {"d", cplx(1, 0)},
                   {"e", cplx(1, 0)}});
  CHECK_THROWS_AS(ev.jet(parse_expr("a + b + c + d + e"), {"a", "b", "c", "d", "e"}, 2),
                  std::invalid_argument);
  CHECK_NOTHROW(ev.jet(parse_expr("a + b + c + d + e"), {"a", "b", "c", "d"}, 2));
}

TEST_CASE("degree cap honored") {
  Evaluator ev(Env{{"x", cplx(0.5, 0)}});
  CHECK_NOTHROW(ev.jet(parse_expr("exp(x)"), {"x"}, 10));
  CHECK_THROWS_AS(ev.jet(parse_expr("exp(x)"), {"x"}, 11), std::invalid_argument);
}

TEST_CASE("gradient helper handles many variables") {
  Expr e = parse_expr("a*b + b*c^2 + c*d + d*e + e*f");
  Env env{{"a", cplx(1, 0)}, {"b", cplx(2, 0)}, {"c", cplx(3, 0)},
          {"d", cplx(4, 0)}, {"e", cplx(5, 0)}, {"f", cplx(6, 0)}};
  auto g = gradient(e, {"a", "b", "c", "d", "e", "f"}, env);
  CHECK(std::abs(g[0] - cplx(2, 0)) < 1e-14);   // b
  CHECK(std::abs(g[1] - cplx(10, 0)) < 1e-14);  // a + c^2
  CHECK(std::abs(g[2] - cplx(16, 0)) < 1e-14);  // 2bc + d
  CHECK(std::abs(g[3] - cplx(8, 0)) < 1e-14);   // c + e
  CHECK(std::abs(g[4] - cplx(10, 0)) < 1e-14);  // d + f
  CHECK(std::abs(g[5] - cplx(5, 0)) < 1e-14);   // e
}

TEST_CASE("jet of a univariate high-degree expansion") {
  // exp(x) at 0: coefficients 1/k!
  Evaluator ev(Env{{"x", cplx(0, 0)}});
  Jet j = ev.jet(parse_expr("exp(x)"), {"x"}, 10);
  double f = 1;
  for (int k = 0; k <= 10; ++k) {
    if (k) f *= k;
    CHECK(std::abs(j.coeff(MIdx{(std::uint8_t)k, 0, 0, 0}) - cplx(1.0 / f, 0)) < 1e-15);
  }
}
