#include "variata/effects.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "variata/error.hpp"

namespace variata {

std::string scale_name(Scale s) {
  switch (s) {
    case Scale::Mean:
      return "mean";
    case Scale::LogRisk:
      return "log-risk";
    case Scale::LogOdds:
      return "log-odds";
  }
  return "?";
}

Scale parse_scale(const std::string& s) {
  if (s == "mean") return Scale::Mean;
  if (s == "log-risk") return Scale::LogRisk;
  if (s == "log-odds") return Scale::LogOdds;
  throw Error("unknown scale '" + s + "' (expected mean, log-risk or log-odds)");
}

std::string PoQuery::label() const {
  auto v = [](int x) { return x == kAnyX ? std::string("*") : std::to_string(x); };
  return "PO(" + v(x_y) + "," + v(x_w) + "," + v(x_z) + ")";
}

namespace {

// (x_y, x_w, x_z) triples with coefficients; see the algebra table in the README.
using Triple = std::array<int, 3>;
struct Row {
  const char* key;
  std::vector<std::pair<int, Triple>> terms;
};

const std::vector<Row>& table() {
  static const std::vector<Row> t = {
      {"TV", {{+1, {1, 1, 1}}, {-1, {0, 0, 0}}}},
      {"x-TE", {{+1, {1, 1, 0}}, {-1, {0, 0, 0}}}},
      {"x-DE", {{+1, {1, 0, 0}}, {-1, {0, 0, 0}}}},
      {"x-IE", {{+1, {0, 1, 0}}, {-1, {0, 0, 0}}}},
      {"x-SE", {{+1, {0, 0, 1}}, {-1, {0, 0, 0}}}},
      {"x-DE-IE", {{+1, {1, 1, 0}}, {-1, {0, 1, 0}}, {-1, {1, 0, 0}}, {+1, {0, 0, 0}}}},
      {"x-TE-SE", {{+1, {1, 1, 1}}, {-1, {0, 0, 1}}, {-1, {1, 1, 0}}, {+1, {0, 0, 0}}}},
      {"x-DE-SE", {{+1, {1, 0, 1}}, {-1, {0, 0, 1}}, {-1, {1, 0, 0}}, {+1, {0, 0, 0}}}},
      {"x-IE-SE", {{+1, {0, 1, 1}}, {-1, {0, 0, 1}}, {-1, {0, 1, 0}}, {+1, {0, 0, 0}}}},
      {"x-DE-IE-SE",
       {{+1, {1, 1, 1}},
        {-1, {0, 1, 1}},
        {-1, {1, 0, 1}},
        {+1, {0, 0, 1}},
        {-1, {1, 1, 0}},
        {+1, {0, 1, 0}},
        {+1, {1, 0, 0}},
        {-1, {0, 0, 0}}}},
      {"x-SE-rev", {{+1, {1, 1, 0}}, {-1, {1, 1, 1}}}},
      {"x-DE-rev", {{+1, {0, 1, 0}}, {-1, {1, 1, 0}}}},
  };
  return t;
}

// Display names per scale: mean, log-risk, log-odds.
const std::map<std::string, std::array<const char*, 3>>& names() {
  static const std::map<std::string, std::array<const char*, 3>> n = {
      {"TV", {"TV", "TVLR", "TVLO"}},
      {"x-TE", {"x-TE", "x-TLR", "x-TLO"}},
      {"x-DE", {"x-DE", "x-DLR", "x-DLO"}},
      {"x-IE", {"x-IE", "x-ILR", "x-ILO"}},
      {"x-SE", {"x-SE", "x-SLR", "x-SLO"}},
      {"x-DE-IE", {"x-DE-IE", "x-DLR-ILR", "x-DLO-ILO"}},
      {"x-TE-SE", {"x-TE-SE", "x-TLR-SLR", "x-TLO-SLO"}},
      {"x-DE-SE", {"x-DE-SE", "x-DLR-SLR", "x-DLO-SLO"}},
      {"x-IE-SE", {"x-IE-SE", "x-ILR-SLR", "x-ILO-SLO"}},
      {"x-DE-IE-SE", {"x-DE-IE-SE", "x-DLR-ILR-SLR", "x-DLO-ILO-SLO"}},
      {"x-SE-rev", {"x-SE-rev", "x-SLR-rev", "x-SLO-rev"}},
      {"x-DE-rev", {"x-DE-rev", "x-DLR-rev", "x-DLO-rev"}},
  };
  return n;
}

int scale_index(Scale s) { return static_cast<int>(s); }

}  // namespace

const std::vector<std::string>& effect_keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& r : table()) out.push_back(r.key);
    return out;
  }();
  return k;
}

std::string display_name(const std::string& key, Scale scale) {
  auto it = names().find(key);
  if (it == names().end()) throw Error("unknown effect '" + key + "'");
  return it->second[scale_index(scale)];
}

EffectSpec effect(const std::string& key, Scale scale) {
  for (const auto& r : table()) {
    if (key != r.key) continue;
    EffectSpec e;
    e.key = key;
    e.name = display_name(key, scale);
    e.scale = scale;
    for (const auto& [c, t] : r.terms) e.terms.push_back({c, PoQuery{t[0], t[1], t[2], scale}});
    return e;
  }
  throw Error("unknown effect '" + key + "'");
}

EffectSpec effect_by_name(const std::string& name, Scale scale) {
  for (const auto& [key, n] : names()) {
    if (name == key) return effect(key, scale);
    for (int s = 0; s < 3; ++s)
      if (name == n[s]) return effect(key, scale);
  }
  if (name.rfind("v-", 0) == 0 || name.rfind("u-", 0) == 0)
    throw Error("effect '" + name +
                "' is v- or u-specific; such measures are not identifiable from observational data");
  throw Error("unknown effect '" + name + "'");
}

const std::vector<std::string>& interaction_keys() {
  static const std::vector<std::string> k = {"x-TE-SE", "x-DE-IE", "x-DE-SE", "x-IE-SE", "x-DE-IE-SE"};
  return k;
}

std::string form_id(Form f) {
  switch (f) {
    case Form::ThreeTerm:
      return "3-term";
    case Form::FourTermDeIe:
      return "4-term-deie";
    case Form::FourTermTeSe:
      return "4-term-tese";
    case Form::FiveTerm:
      return "5-term";
  }
  return "?";
}

std::vector<std::string> form_terms(Form f) {
  switch (f) {
    case Form::ThreeTerm:
      return {"x-DE", "x-IE", "x-SE"};
    case Form::FourTermDeIe:
      return {"x-DE", "x-IE", "x-DE-IE", "x-SE"};
    case Form::FourTermTeSe:
      return {"x-DE", "x-IE", "x-SE", "x-TE-SE"};
    case Form::FiveTerm:
      return decomposition_de_ie_se();
  }
  return {};
}

Form select_form(bool te_se_rejected, bool de_ie_rejected) {
  if (!te_se_rejected && !de_ie_rejected) return Form::ThreeTerm;
  if (de_ie_rejected && !te_se_rejected) return Form::FourTermDeIe;
  if (te_se_rejected && !de_ie_rejected) return Form::FourTermTeSe;
  return Form::FiveTerm;
}

std::vector<std::string> decomposition_te_se() { return {"x-TE", "x-SE", "x-TE-SE"}; }

std::vector<std::string> decomposition_de_ie_se() { return {"x-DE", "x-IE", "x-DE-IE", "x-SE", "x-TE-SE"}; }

std::vector<std::string> decomposition_granular() {
  return {"x-DE", "x-IE", "x-SE", "x-DE-IE", "x-DE-SE", "x-IE-SE", "x-DE-IE-SE"};
}

std::vector<EffectTerm> expand(const std::vector<EffectSpec>& effects) {
  std::vector<EffectTerm> out;
  for (const auto& e : effects) out.insert(out.end(), e.terms.begin(), e.terms.end());
  return collect(std::move(out));
}

std::vector<EffectTerm> collect(std::vector<EffectTerm> terms) {
  std::vector<EffectTerm> out;
  for (const auto& t : terms) {
    auto it = std::find_if(out.begin(), out.end(), [&](const EffectTerm& o) { return o.q == t.q; });
    if (it == out.end())
      out.push_back(t);
    else
      it->coef += t.coef;
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const EffectTerm& t) { return t.coef == 0; }), out.end());
  return out;
}

}  // namespace variata
