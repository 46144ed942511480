#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "hadamard/expr.hpp"

using namespace hadamard;

namespace {

double eval1(const std::string& text, double x) {
  ParseResult r = parse(text);
  REQUIRE(r.ok());
  EvalPoint p;
  p.x = x;
  return eval(*r.expr, p);
}

double eval2(const std::string& text, double x, double y) {
  ParseResult r = parse(text);
  REQUIRE(r.ok());
  return eval(*r.expr, EvalPoint{x, y});
}

EvalError::Kind fault_kind(const std::string& text, EvalPoint p) {
  ParseResult r = parse(text);
  REQUIRE(r.ok());
  try {
    eval(*r.expr, p);
  } catch (const EvalException& e) {
    return e.error().kind;
  }
  FAIL("expected an evaluation fault for ", text);
  return EvalError::Kind::Overflow;
}

}  // namespace

TEST_CASE("arithmetic precedence and associativity") {
  CHECK(eval1("2+3*4", 0) == 14.0);
  CHECK(eval1("2*3+4", 0) == 10.0);
  CHECK(eval1("2^3^2", 0) == 512.0);  // right-associative
  CHECK(eval1("(2^3)^2", 0) == 64.0);
  CHECK(eval1("8/4/2", 0) == 1.0);    // left-associative
  CHECK(eval1("8-4-2", 0) == 2.0);
  CHECK(eval1("-x^2", 3) == -9.0);    // minus applies to the power
  CHECK(eval1("(-x)^2", 3) == 9.0);
  CHECK(eval1("2*-3", 0) == -6.0);
  CHECK(eval1("--x", 5) == 5.0);
}

TEST_CASE("number literals") {
  CHECK(eval1("1.5e2", 0) == 150.0);
  CHECK(eval1("2E-2", 0) == 0.02);
  CHECK(eval1("0.125", 0) == 0.125);
  CHECK_FALSE(parse(".5").ok());  // literals need a leading digit
}

TEST_CASE("variables and functions") {
  CHECK(eval2("x^2*y^2", 0.5, 0.5) == doctest::Approx(0.0625));
  CHECK(eval1("sin(0)+cos(0)", 0) == doctest::Approx(1.0));
  CHECK(eval1("exp(log(x))", 2.5) == doctest::Approx(2.5));
  CHECK(eval1("sqrt(x)", 9) == doctest::Approx(3.0));
  CHECK(eval1("abs(x-2)", 0.5) == doctest::Approx(1.5));
  CHECK(eval2("min(x,y)", 2, 3) == 2.0);
  CHECK(eval2("max(x,y)", 2, 3) == 3.0);
  CHECK(eval2("max(min(x,y),0.5)", 0.1, 0.2) == 0.5);
}

TEST_CASE("free variables") {
  auto vars = [](const std::string& t) {
    ParseResult r = parse(t);
    REQUIRE(r.ok());
    return free_vars(*r.expr);
  };
  CHECK(vars("3+4").x == false);
  CHECK(vars("3+4").y == false);
  CHECK(vars("x^2").x == true);
  CHECK(vars("x^2").y == false);
  CHECK(vars("min(x,y)").x == true);
  CHECK(vars("min(x,y)").y == true);
}

TEST_CASE("parse errors carry position and expectation") {
  ParseResult r = parse("2+");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->kind == ParseError::Kind::Syntax);
  CHECK(r.error->position == 2);

  r = parse("foo(x)");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->kind == ParseError::Kind::UnknownFunction);
  CHECK(r.error->name == "foo");

  r = parse("sin(x,y)");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->kind == ParseError::Kind::Arity);

  r = parse("min(x)");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->kind == ParseError::Kind::Arity);

  r = parse("x + $");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->position == 4);

  r = parse("(x");
  REQUIRE_FALSE(r.ok());

  r = parse("");
  REQUIRE_FALSE(r.ok());

  r = parse("2e");  // "2" followed by a stray identifier
  REQUIRE_FALSE(r.ok());
  CHECK_FALSE(r.error->message().empty());
}

TEST_CASE("deeply nested input is rejected, not a stack overflow") {
  std::string deep(400, '(');
  deep += "x";
  deep += std::string(400, ')');
  ParseResult r = parse(deep);
  CHECK_FALSE(r.ok());

  std::string shallow(50, '(');
  shallow += "x";
  shallow += std::string(50, ')');
  CHECK(parse(shallow).ok());
}

TEST_CASE("evaluation faults map to typed errors") {
  CHECK(fault_kind("1/x", EvalPoint{0.0, {}}) ==
        EvalError::Kind::DivisionByZero);
  CHECK(fault_kind("log(x)", EvalPoint{0.0, {}}) ==
        EvalError::Kind::LogNonPositive);
  CHECK(fault_kind("log(x-2)", EvalPoint{1.0, {}}) ==
        EvalError::Kind::LogNonPositive);
  CHECK(fault_kind("sqrt(x-1)", EvalPoint{0.5, {}}) ==
        EvalError::Kind::SqrtNegative);
  CHECK(fault_kind("(x-2)^0.5", EvalPoint{1.0, {}}) ==
        EvalError::Kind::PowDomain);
  CHECK(fault_kind("x^(0-1)", EvalPoint{0.0, {}}) ==
        EvalError::Kind::PowDomain);
  CHECK(fault_kind("exp(x)", EvalPoint{1000.0, {}}) ==
        EvalError::Kind::Overflow);
  CHECK(fault_kind("x*y", EvalPoint{1.0, {}}) ==
        EvalError::Kind::MissingVariable);

  // Negative base with an integral exponent is fine.
  CHECK(eval1("(0-2)^3", 0) == -8.0);
  CHECK(eval1("(0-2)^2", 0) == 4.0);
}

TEST_CASE("fault reports include the offending point") {
  ParseResult r = parse("1/(x-0.5)");
  REQUIRE(r.ok());
  try {
    eval(*r.expr, EvalPoint{0.5, {}});
    FAIL("expected fault");
  } catch (const EvalException& e) {
    CHECK(e.error().point.x == 0.5);
    CHECK(std::string(e.what()).find("division") != std::string::npos);
  }
}

TEST_CASE("printer round-trips structurally") {
  const char* cases[] = {
      "x^2*y^2",
      "x-(1-x)",
      "2*x+3*y-4",
      "min(x,max(y,0.5))",
      "exp(-(2*x))",
      "sqrt(abs(x-0.3))",
      "x/(y+1)/2",
      "(x+1)*(y+2)",
      "x^(y+1)",
      "-(x+y)",
      "1/2/3",
      "x-y-1",
      "x-(y-1)",
  };
  for (const char* c : cases) {
    CAPTURE(c);
    ParseResult r = parse(c);
    REQUIRE(r.ok());
    std::string printed = to_string(*r.expr);
    ParseResult again = parse(printed);
    REQUIRE(again.ok());
    CHECK(structurally_equal(*r.expr, *again.expr));
  }
}

TEST_CASE("printer keeps subtraction of negated terms unambiguous") {
  Expr e(make_binary(BinOp::Sub, make_var(Var::X),
                     make_neg(make_number(3.0))));
  std::string printed = to_string(e);
  ParseResult again = parse(printed);
  REQUIRE(again.ok());
  CHECK(structurally_equal(e, *again.expr));
  CHECK(eval(*again.expr, EvalPoint{1.0, {}}) == 4.0);
}

TEST_CASE("negative constants normalize to negation nodes") {
  ExprPtr n = make_number(-2.0);
  CHECK(std::holds_alternative<NegNode>(n->v));
  Expr e(n);
  CHECK(eval(e, EvalPoint{0.0, {}}) == -2.0);
  ParseResult again = parse(to_string(e));
  REQUIRE(again.ok());
  CHECK(structurally_equal(e, *again.expr));
}

TEST_CASE("dyadic constants print exactly") {
  // Generator constants are multiples of 1/64; the printer must not lose
  // them.
  for (int k = -128; k <= 128; ++k) {
    double v = k / 64.0;
    Expr e(make_number(v));
    ParseResult r = parse(to_string(e));
    REQUIRE(r.ok());
    CHECK(eval(*r.expr, EvalPoint{0.0, {}}) == v);
  }
}

TEST_CASE("structural equality distinguishes shapes") {
  ParseResult a = parse("x+y");
  ParseResult b = parse("y+x");
  ParseResult c = parse("x+y");
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  REQUIRE(c.ok());
  CHECK(structurally_equal(*a.expr, *c.expr));
  CHECK_FALSE(structurally_equal(*a.expr, *b.expr));
}
