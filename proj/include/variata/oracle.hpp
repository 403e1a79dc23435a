#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "variata/counterfactual.hpp"
#include "variata/effects.hpp"
#include "variata/scm.hpp"

namespace variata {

// Conjunction of equalities on factual (observed) variables; empty = always true.
struct Event {
  std::vector<std::pair<std::string, double>> equals;

  static Event always() { return {}; }
  static Event x_is(const ScmSpec& spec, int x);
  std::string describe() const;
  bool operator==(const Event& o) const = default;
};

struct ContrastTerm {
  int coef = 1;
  Clause clause;
  Event event;
};

// Linear: sum_k coef_k * h(E[P_k | E_k]) on the mean scale, or sum_k coef_k *
// E[h(P_k) | E_k] on log scales, where P_k is Y (or its unit-level risk) under
// clause k. Ratio: prod_k E[Y_k | E_k]^coef_k (risk-ratio diagnostics).
enum class Combine { Linear, Ratio };

struct Contrast {
  std::string name;
  Scale scale = Scale::Mean;
  Combine combine = Combine::Linear;
  std::vector<ContrastTerm> terms;

  int order() const;  // 1, 2 or 3 (from the number of terms); 0 for a single PO
};

// Contrast building blocks.
// Counterfactual contrast E[Y_{C1} | E] - E[Y_{C0} | E].
Contrast counterfactual_contrast(const Clause& c0, const Clause& c1, const Event& e, Scale scale = Scale::Mean);
// Factual contrast E[Y_C | E1] - E[Y_C | E0].
Contrast factual_contrast(const Clause& c, const Event& e0, const Event& e1, Scale scale = Scale::Mean);
// Second-order causal-spurious contrast: the counterfactual contrast (c0 -> c1)
// under e1 minus the same under e0.
Contrast causal_spurious_contrast(const Clause& c0, const Clause& c1, const Event& e0, const Event& e1,
                                  Scale scale = Scale::Mean);

Contrast po_contrast(const ScmSpec& spec, const PoQuery& q);
Contrast contrast_for(const ScmSpec& spec, const EffectSpec& e);
// z-specific direct-indirect interaction, in the orientation
// [Y_{x1,W_x0} - Y_{x0,W_x0} | Z=z] - [Y_{x1,W_x1} - Y_{x0,W_x1} | Z=z].
Contrast z_de_ie_contrast(const ScmSpec& spec, const std::string& z_var, double z_value, Scale scale = Scale::Mean);
// DRR-IRR = E[Y_{x1,W_x0}]/E[Y_{x0,W_x0}] * E[Y_{x0,W_x1}]/E[Y_{x1,W_x1}].
Contrast drr_irr_contrast(const ScmSpec& spec);

enum class OracleMode { Auto, Exact, MonteCarlo };

struct OracleOptions {
  OracleMode mode = OracleMode::Auto;
  std::size_t n = 1000000;
  std::optional<std::uint64_t> seed;
};

struct OracleValue {
  double value = 0.0;
  double se = 0.0;  // Monte-Carlo standard error; 0 in exact mode
  bool exact = false;
  bool rational = false;     // exact mode completed in rational arithmetic
  std::string rational_text;  // "10/99" when rational
  std::size_t draws = 0;      // MC draws, or enumeration cells in exact mode
  std::vector<double> term_values;         // E[h(P_k) | E_k] per term
  std::vector<std::string> term_rationals;  // rational forms when available
  std::vector<std::string> notes;
};

OracleValue oracle_contrast(const ScmSpec& spec, const Contrast& c, const OracleOptions& opt = {});
// Basis-expansion route: sum over exogenous points of the unit-level integrand weighted
// by the posterior P(u | E), grouped by conditioning event. Exact mode only,
// linear contrasts only.
OracleValue oracle_contrast_expansion(const ScmSpec& spec, const Contrast& c);

}  // namespace variata
