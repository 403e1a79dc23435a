#include <doctest.h>

#include <cmath>

#include "variata/counterfactual.hpp"
#include "variata/error.hpp"
#include "variata/expr.hpp"

using namespace variata;

namespace {

// Evaluates `expr` as the Y mechanism of a tiny model with X := 1 and Z := 2.
double eval_y(const std::string& expr) {
  auto spec = parse_scm("scm t\nendo Z role=Z := 2\nendo X role=X := 1\nendo Y role=Y := " + expr + "\n");
  ExogenousDraw d;
  d.values.assign(spec.exo.size(), 0.5);
  return potential_response(spec, Clause{}, d)[spec.y];
}

}  // namespace

TEST_CASE("decimal literals are exact") {
  CHECK(parse_decimal("0.2") == Rational(1, 5));
  CHECK(parse_decimal("3") == Rational(3));
  CHECK(parse_decimal("1e-3") == Rational(1, 1000));
  CHECK(parse_decimal("2.5E2") == Rational(250));
  CHECK_THROWS_AS(parse_decimal("1.2.3"), ParseError);
  CHECK_THROWS_AS(parse_decimal("1e"), ParseError);
}

TEST_CASE("precedence and associativity") {
  CHECK(eval_y("1 + 2*3") == 7);
  CHECK(eval_y("(1 + 2)*3") == 9);
  CHECK(eval_y("-Z^2") == -4);
  CHECK(eval_y("2^3^2") == 512);
  CHECK(eval_y("8 / 2 / 2") == 2);
  CHECK(eval_y("10 - 3 - 2") == 5);
  CHECK(eval_y("X + Z + X*Z") == 5);
}

TEST_CASE("functions and comparisons") {
  CHECK(eval_y("exp(0)") == 1);
  CHECK(eval_y("log(exp(Z))") == doctest::Approx(2));
  CHECK(eval_y("expit(0)") == 0.5);
  CHECK(eval_y("logit(0.5)") == 0);
  CHECK(eval_y("sqrt(Z*8)") == 4);
  CHECK(eval_y("abs(X - Z)") == 1);
  CHECK(eval_y("min(X, Z) + max(X, Z)") == 3);
  CHECK(eval_y("ind(Z > X)") == 1);
  CHECK(eval_y("(Z <= X) + (Z == 2) + (X != 1)") == 1);
}

TEST_CASE("identifiers and bernoulli calls") {
  auto e = Expr::parse("bernoulli(0.5 + 0.2*Z)");
  CHECK(e.is_bernoulli_call());
  CHECK(e.bernoulli_count() == 1);
  CHECK(e.identifiers() == std::vector<std::string>{"Z"});
  auto f = Expr::parse("X + bernoulli(0.1) * bernoulli(W)");
  CHECK_FALSE(f.is_bernoulli_call());
  CHECK(f.bernoulli_count() == 2);
  CHECK(f.identifiers() == std::vector<std::string>{"X", "W"});
}

TEST_CASE("syntax errors name the column") {
  CHECK_THROWS_AS(Expr::parse("1 +"), ParseError);
  CHECK_THROWS_AS(Expr::parse("(1 + 2"), ParseError);
  CHECK_THROWS_AS(Expr::parse("foo(1)"), ParseError);
  try {
    Expr::parse("1 + * 2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
}
