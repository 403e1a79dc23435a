#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "variata/counterfactual.hpp"
#include "variata/error.hpp"
#include "variata/parallel.hpp"
#include "variata/scm.hpp"

using namespace variata;

namespace {

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string parse_error(const std::string& text) {
  try {
    parse_scm(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parsing a model") {
  auto s = parse_scm(R"(scm demo
# comment
exo eZ ~ normal(0, 1)
exo eY ~ categorical(0:0.25, 1:0.75)
endo Z role=Z := eZ
endo X role=X := bernoulli(expit(Z))
endo W role=W := Z + X
endo Y role=Y := W + eY
terms:
  X: Z
  W: Z, X
  Y: W
)");
  CHECK(s.name == "demo");
  REQUIRE(s.endo.size() == 4);
  CHECK(s.x == s.index_of("X"));
  CHECK(s.y == s.index_of("Y"));
  CHECK(s.z.size() == 1);
  CHECK(s.w.size() == 1);
  CHECK(s.exo_index("eY") >= 0);
  CHECK_FALSE(s.finite_support());
  CHECK(s.terms.present);
  // the bernoulli call gets an implicit uniform
  bool implicit = false;
  for (const auto& e : s.exo) implicit = implicit || e.implicit;
  CHECK(implicit);
}

TEST_CASE("model validation errors") {
  CHECK(contains(parse_error("scm a\nendo X role=X := bernoulli(0.5)\n"), "Y"));
  CHECK(contains(parse_error("scm a\nendo Y role=Y := 1\n"), "X"));
  CHECK(contains(parse_error("scm a\nendo X role=X := bernoulli(0.5)\nendo Y role=Y := X + Q\n"), "undeclared"));
  CHECK(contains(parse_error("scm a\nendo Y role=Y := 1\nendo X role=X := Y\n"), "order must be"));
  CHECK(contains(parse_error("scm a\nexo e ~ poisson(1)\nendo X role=X := bernoulli(0.5)\nendo Y role=Y := X\n"),
                 "unknown distribution"));
  CHECK(contains(parse_error("scm a\nexo e ~ normal(0, -1)\nendo X role=X := bernoulli(0.5)\nendo Y role=Y := X\n"),
                 "sd"));
  CHECK(contains(parse_error("scm a\nendo X role=X := bernoulli(0.5)\nendo Y role=Y := X\nterms:\n  Y: Q\n"),
                 "unknown variable"));
  CHECK(contains(parse_error("scm a\nendo X role=X := bernoulli(0.5)\nendo Y role=Y := X\nfoo\n"), "line 4"));
}

TEST_CASE("builtin models") {
  for (const auto& name : builtin_names()) CHECK_NOTHROW(builtin_scm(name));
  CHECK_THROWS_AS(builtin_scm("M9"), Error);

  auto m3 = builtin_scm("M3");
  const auto& y3 = m3.endo[m3.y];
  for (int p : y3.parents) CHECK(m3.endo[p].role != Role::X);

  auto m5 = builtin_scm("M5");
  CHECK(contains(m5.endo[m5.y].mech.text(), "0.5*X*Z1*W3"));
  CHECK(contains(m5.endo[m5.y].mech.text(), "0.4*Z2*W3"));

  auto c = builtin_scm("C-te-se");
  CHECK(c.endo[c.y].mech.text() == "X + Z + X*Z");
  CHECK(c.endo[c.x].mech.text() == "bernoulli(0.5 + 0.2*Z)");
  CHECK(c.finite_support());
  CHECK(builtin_scm("C1").endo[c.y].mech.text() == "X + Z + X*Z");
}

TEST_CASE("shipped model files match the builtins") {
  for (const auto& name : builtin_names()) {
    auto spec = builtin_scm(name);
    if (spec.name != name) continue;  // aliases share the canonical file
    std::ifstream f(std::string(VARIATA_SOURCE_DIR) + "/scm/" + name + ".scm");
    REQUIRE_MESSAGE(f.good(), name);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK_MESSAGE(ss.str() == builtin_source(name), name);
  }
}

TEST_CASE("sampling") {
  auto s = parse_scm("scm copy\nendo X role=X := bernoulli(0.5)\nendo Y role=Y := X\n");
  auto d = sample_observational(s, 4, 7);
  REQUIRE(d.n() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(d.y[i] == d.x[i]);

  auto m2 = sample_observational(builtin_scm("C-ex2-m2"), 1000000, 3);
  double sum = 0, sum2 = 0;
  for (double y : m2.y) {
    sum += y;
    sum2 += y * y;
  }
  double n = static_cast<double>(m2.n());
  double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.05) < 3 * se);

  auto a = sample_observational(builtin_scm("M1"), 1000, 11);
  auto b = sample_observational(builtin_scm("M1"), 1000, 11);
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
  CHECK(a.w == b.w);
  auto c = sample_observational(builtin_scm("M1"), 1000, 12);
  CHECK(a.y != c.y);
}

TEST_CASE("sampling does not depend on the thread count") {
  auto spec = builtin_scm("M2");
  auto a = sample_observational(spec, 10000, 5);
  setenv("VARIATA_THREADS", "1", 1);
  auto b = sample_observational(spec, 10000, 5);
  unsetenv("VARIATA_THREADS");
  CHECK(a.y == b.y);
  CHECK(a.x == b.x);
}

TEST_CASE("bernoulli parameters are clamped with a note") {
  auto s = parse_scm("scm c\nendo X role=X := bernoulli(0.5)\nendo Y role=Y := bernoulli(0.5 + X)\n");
  auto d = sample_observational(s, 200, 1);
  CHECK_FALSE(d.notes.empty());
  for (std::size_t i = 0; i < d.n(); ++i)
    if (d.x[i] == 1) CHECK(d.y[i] == 1);
  auto bad = parse_scm("scm c\nendo X role=X := bernoulli(0.5)\nendo Y role=Y := bernoulli(log(X - 1))\n");
  CHECK_THROWS_AS(sample_observational(bad, 10, 1), Error);
  auto nonbin = parse_scm("scm c\nendo Z role=Z := 2\nendo X role=X := Z\nendo Y role=Y := X\n");
  CHECK_THROWS_WITH_AS(sample_observational(nonbin, 10, 1), doctest::Contains("X"), Error);
}

TEST_CASE("potential responses") {
  // Y <- X + W + XW with W forced to 1 by its noise.
  auto m3 = builtin_scm("C-ex2-m3");
  ExogenousDraw u;
  u.values.assign(m3.exo.size(), 0.0);  // implicit uniforms at 0: every bernoulli fires
  auto v = potential_response(m3, po_clause(m3, 1, 0), u);
  CHECK(v[m3.index_of("W")] == 1);
  CHECK(v[m3.y] == 3);

  // Consistency: Y_x = Y_{x, W_x} for every draw.
  for (const auto& name : {"M1", "C-de-ie", "C-ex13", "C-ex4"}) {
    auto spec = builtin_scm(name);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 200; ++k) {
      auto d = draw_exogenous(spec, rng);
      for (int x = 0; x < 2; ++x) {
        Clause plain;
        plain.assignments["X"] = Assignment::set(x);
        auto a = potential_response(spec, plain, d);
        Clause sub;
        sub.assignments["X"] = Assignment::set(x);
        Clause nested;
        nested.assignments["X"] = Assignment::set(x);
        for (int w : spec.w) nested.assignments[spec.endo[w].name] = Assignment::natural(sub);
        CHECK(a[spec.y] == potential_response(spec, nested, d)[spec.y]);
      }
    }
  }

  // X is not a parent of W: Y_{x, W_x0} = Y_{x, W_x1}.
  auto ex4 = builtin_scm("C-ex4");
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    auto d = draw_exogenous(ex4, rng);
    for (int x = 0; x < 2; ++x)
      CHECK(potential_response(ex4, po_clause(ex4, x, 0), d)[ex4.y] ==
            potential_response(ex4, po_clause(ex4, x, 1), d)[ex4.y]);
  }
}

TEST_CASE("clause validation") {
  auto s = builtin_scm("C-de-ie");
  CHECK_NOTHROW(validate_clause(s, po_clause(s, 1, 0)));
  Clause bad;
  bad.assignments["Q"] = Assignment::set(1);
  CHECK_THROWS_AS(validate_clause(s, bad), Error);
  Clause sub;
  sub.assignments["X"] = Assignment::set(0);
  Clause nested_x;
  nested_x.assignments["X"] = Assignment::natural(sub);
  CHECK_THROWS_AS(validate_clause(s, nested_x), Error);
  Clause deep;
  Clause mid;
  mid.assignments["X"] = Assignment::set(1);
  mid.assignments["W"] = Assignment::natural(sub);
  deep.assignments["W"] = Assignment::natural(mid);
  CHECK_THROWS_AS(validate_clause(s, deep), Error);
}
