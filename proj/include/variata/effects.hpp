#pragma once

#include <string>
#include <vector>

namespace variata {

enum class Scale { Mean, LogRisk, LogOdds };

std::string scale_name(Scale s);  // "mean", "log-risk", "log-odds"
Scale parse_scale(const std::string& s);

// PO(x_y, x_w, x_z) = E[Y_{x_y, W_{x_w}} | X = x_z] on the given scale.
// x_z = kAnyX drops the conditioning on X (marginal over the population).
constexpr int kAnyX = -1;

struct PoQuery {
  int x_y = 0;
  int x_w = 0;
  int x_z = 0;
  Scale scale = Scale::Mean;

  std::string label() const;  // "PO(1,0,0)"
  bool operator==(const PoQuery& o) const = default;
};

struct EffectTerm {
  int coef = 1;  // +1 or -1
  PoQuery q;
};

struct EffectSpec {
  std::string key;   // scale-independent id, e.g. "x-DE-IE"
  std::string name;  // display name on the spec's scale, e.g. "x-DLR-ILR"
  Scale scale = Scale::Mean;
  std::vector<EffectTerm> terms;
};

// Keys of the effect algebra, in a canonical order:
//   TV x-TE x-DE x-IE x-SE x-DE-IE x-TE-SE x-DE-SE x-IE-SE x-DE-IE-SE
// plus the reversed-baseline helpers x-SE-rev (E[Y_x1|x0] - E[Y_x1|x1]) and
// x-DE-rev (E[Y_{x0,W_x1} - Y_{x1,W_x1} | x0]) used by the symmetry identities.
const std::vector<std::string>& effect_keys();
EffectSpec effect(const std::string& key, Scale scale = Scale::Mean);
// Accepts keys and scale-specific display names ("x-DLR-ILR").
EffectSpec effect_by_name(const std::string& name, Scale scale);
std::string display_name(const std::string& key, Scale scale);

// The five interaction measures in report order: TE-SE, DE-IE, DE-SE, IE-SE, DE-IE-SE.
const std::vector<std::string>& interaction_keys();

// Decomposition forms (lists of effect keys summing to TV).
enum class Form { ThreeTerm, FourTermDeIe, FourTermTeSe, FiveTerm };
std::string form_id(Form f);  // "3-term", "4-term-deie", "4-term-tese", "5-term"
std::vector<std::string> form_terms(Form f);
Form select_form(bool te_se_rejected, bool de_ie_rejected);

// TV = x-TE + x-SE + x-TE-SE.
std::vector<std::string> decomposition_te_se();
// TV = x-DE + x-IE + x-DE-IE + x-SE + x-TE-SE (same as the 5-term form).
std::vector<std::string> decomposition_de_ie_se();
// TV = x-DE + x-IE + x-SE (first order) + x-DE-IE + x-DE-SE + x-IE-SE (second order) + x-DE-IE-SE (third order).
std::vector<std::string> decomposition_granular();

// Sum of coef over every PO after expanding a list of effects. Used to check
// that a term list telescopes to TV.
std::vector<EffectTerm> expand(const std::vector<EffectSpec>& effects);
std::vector<EffectTerm> collect(std::vector<EffectTerm> terms);  // merges equal POs, drops zeros

}  // namespace variata
