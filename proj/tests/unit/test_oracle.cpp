#include <doctest.h>

#include <cmath>

#include "variata/error.hpp"
#include "variata/oracle.hpp"
#include "variata/structural.hpp"

using namespace variata;

namespace {

OracleValue exact(const ScmSpec& s, const Contrast& c) { return oracle_contrast(s, c, {OracleMode::Exact, 0, {}}); }

OracleValue mc(const ScmSpec& s, const Contrast& c, std::size_t n = 1000000, std::uint64_t seed = 5) {
  return oracle_contrast(s, c, {OracleMode::MonteCarlo, n, seed});
}

}  // namespace

TEST_CASE("x-TE-SE on the te-se fixture is 5/24 exactly") {
  // P(Z=1|x1) = 7/12 and P(Z=1|x0) = 3/8 under X <- Bern(0.5 + 0.2Z); the unit-level
  // total effect is 1 + Z, so the conditional effects are 19/12 and 11/8.
  auto s = builtin_scm("C-te-se");
  auto v = exact(s, contrast_for(s, effect("x-TE-SE")));
  CHECK(v.exact);
  CHECK(v.rational);
  CHECK(v.rational_text == "5/24");
  CHECK(v.value == doctest::Approx(5.0 / 24).epsilon(1e-14));

  Clause c0, c1;
  c0.assignments["X"] = Assignment::set(0);
  c1.assignments["X"] = Assignment::set(1);
  CHECK(exact(s, counterfactual_contrast(c0, c1, Event::x_is(s, 1))).rational_text == "19/12");
  CHECK(exact(s, counterfactual_contrast(c0, c1, Event::x_is(s, 0))).rational_text == "11/8");
}

TEST_CASE("the 0.1 propensity variant gives 17/11, 13/9 and 10/99") {
  auto s = parse_scm(R"(scm te-se-01
endo Z role=Z := bernoulli(0.5)
endo X role=X := bernoulli(0.5 + 0.1*Z)
endo Y role=Y := X + Z + X*Z
)");
  Clause c0, c1;
  c0.assignments["X"] = Assignment::set(0);
  c1.assignments["X"] = Assignment::set(1);
  CHECK(exact(s, counterfactual_contrast(c0, c1, Event::x_is(s, 1))).rational_text == "17/11");
  CHECK(exact(s, counterfactual_contrast(c0, c1, Event::x_is(s, 0))).rational_text == "13/9");
  CHECK(exact(s, contrast_for(s, effect("x-TE-SE"))).rational_text == "10/99");
}

TEST_CASE("basis expansion agrees with direct enumeration") {
  for (std::string name : {"C-te-se", "C-de-ie", "C-ex2-m2", "C-ex7", "C-ex7-noisy", "C-ex2-m4"}) {
    auto s = builtin_scm(name);
    for (const auto& key : effect_keys()) {
      auto c = contrast_for(s, effect(key));
      auto a = exact(s, c);
      auto b = oracle_contrast_expansion(s, c);
      CHECK_MESSAGE(std::abs(a.value - b.value) < 1e-12, name, " ", key);
      if (a.rational && b.rational) CHECK_MESSAGE(a.rational_text == b.rational_text, name, " ", key);
    }
  }
}

TEST_CASE("exact and Monte-Carlo modes agree") {
  for (std::string name : {"C-te-se", "C-de-ie", "C-ex2-m4"}) {
    auto s = builtin_scm(name);
    for (const auto& key : interaction_keys()) {
      auto c = contrast_for(s, effect(key));
      auto a = exact(s, c);
      auto b = mc(s, c, 400000, 17);
      CHECK_FALSE(b.exact);
      CHECK_MESSAGE(std::abs(a.value - b.value) <= 4 * b.se + 1e-12, name, " ", key);
    }
  }
  // Auto picks exact on finite supports and MC otherwise.
  CHECK(oracle_contrast(builtin_scm("C-te-se"), contrast_for(builtin_scm("C-te-se"), effect("TV"))).exact);
  auto m1 = builtin_scm("M1");
  CHECK_FALSE(oracle_contrast(m1, contrast_for(m1, effect("TV")), {OracleMode::Auto, 20000, 1}).exact);
  CHECK_THROWS_AS(exact(m1, contrast_for(m1, effect("TV"))), Error);
}

TEST_CASE("z-specific DE-IE on the granularity example") {
  auto s = builtin_scm("C-ex7");
  CHECK(exact(s, z_de_ie_contrast(s, "Z", 1)).value == 1);
  CHECK(exact(s, z_de_ie_contrast(s, "Z", 0)).value == -1);
  CHECK(exact(s, contrast_for(s, effect("x-DE-IE"))).value == 0);
  CHECK(exact(s, z_de_ie_contrast(s, "Z", 1)).rational_text == "1");
  CHECK_THROWS_AS(z_de_ie_contrast(s, "Q", 1), Error);
}

TEST_CASE("log-risk example: DLR-ILR is 0 and DRR-IRR is 1") {
  // p_y = exp(X + XZ) * exp(W - 3) with Z independent of W, so both the log
  // interaction and the risk-ratio product vanish.
  auto s = builtin_scm("C-ex13");
  auto dl = exact(s, contrast_for(s, effect("x-DE-IE", Scale::LogRisk)));
  CHECK(std::abs(dl.value) < 1e-12);
  auto rr = exact(s, drr_irr_contrast(s));
  CHECK(rr.value == doctest::Approx(1.0).epsilon(1e-12));
  auto rr_mc = mc(s, drr_irr_contrast(s), 1000000, 3);
  CHECK(std::abs(rr_mc.value - 1.0) < 4 * rr_mc.se);
  CHECK(std::abs(rr_mc.value - 0.73) > 0.02);
}

TEST_CASE("DE-SE vanishes on the direct-spurious example") {
  // Symmetric Z gives E[Z^2 | X=1] = E[Z^2 | X=0], so the x-specific direct
  // effects (E[W^2 | x]) coincide.
  auto s = builtin_scm("C-ex4");
  auto v = mc(s, contrast_for(s, effect("x-DE-SE")), 1000000, 9);
  CHECK(std::abs(v.value) < 3 * v.se);
  CHECK(v.se < 0.01);
}

TEST_CASE("interaction measures are zero where the synthetic models have none") {
  for (std::string name : {"M1", "M2", "M3", "M4", "M5"}) {
    auto s = builtin_scm(name);
    auto verdicts = check_all(MechanismShape::from_spec(s), Scale::Mean);
    for (std::size_t k = 0; k < verdicts.size(); ++k) {
      if (verdicts[k].interaction) continue;
      auto v = mc(s, contrast_for(s, effect(interaction_keys()[k])), 200000, 21);
      CHECK_MESSAGE(std::abs(v.value) < 4 * std::max(v.se, 1e-9), name, " ", interaction_keys()[k]);
    }
  }
}

TEST_CASE("oracle errors") {
  auto s = builtin_scm("C-ex7");
  // W = 1 - X, so {X=1, W=1} never happens.
  Clause c;
  c.assignments["X"] = Assignment::set(1);
  Contrast bad;
  bad.terms.push_back({1, c, Event{{{"X", 1.0}, {"W", 1.0}}}});
  CHECK_THROWS_WITH_AS(exact(s, bad), doctest::Contains("empty conditioning event"), Error);

  // Y deterministic in {0,1} makes P_C hit the boundary on log-odds.
  auto d = parse_scm("scm d\nendo X role=X := bernoulli(0.5)\nendo W role=W := bernoulli(0.5)\nendo Y role=Y := bernoulli(X*W)\n");
  CHECK_THROWS_WITH_AS(exact(d, contrast_for(d, effect("x-DE-IE", Scale::LogOdds))), doctest::Contains("degenerate odds"),
                       Error);
}

TEST_CASE("contrast orders") {
  auto s = builtin_scm("C-de-ie");
  CHECK(contrast_for(s, effect("x-DE")).order() == 1);
  CHECK(contrast_for(s, effect("x-DE-IE")).order() == 2);
  CHECK(contrast_for(s, effect("x-DE-IE-SE")).order() == 3);
  CHECK(po_contrast(s, PoQuery{1, 0, 0}).order() == 0);
}
