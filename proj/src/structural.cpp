#include "variata/structural.hpp"

#include "variata/error.hpp"

namespace variata {

MechanismShape MechanismShape::from_spec(const ScmSpec& spec) {
  MechanismShape s;
  s.link = spec.terms.link;
  s.declared = spec.terms.present;
  for (const auto& v : spec.endo) {
    auto& args = s.args[v.role];
    for (int p : v.parents) {
      Role r = spec.endo[p].role;
      if (r != v.role) args.insert(r);
    }
    auto& terms = s.terms[v.role];
    if (spec.terms.present) {
      auto it = spec.terms.terms.find(v.name);
      if (it == spec.terms.terms.end()) continue;
      for (const auto& t : it->second) {
        ShapeTerm st;
        for (const auto& name : t.vars) {
          Role r = spec.endo[spec.index_of(name)].role;
          if (r != v.role) st.roles.insert(r);
        }
        st.nonlinear_in_w = t.nonlinear_in_w;
        st.text = t.text;
        if (!st.roles.empty()) terms.push_back(st);
      }
    } else if (!v.parents.empty()) {
      ShapeTerm st;
      for (int p : v.parents)
        if (spec.endo[p].role != v.role) st.roles.insert(spec.endo[p].role);
      st.nonlinear_in_w = true;
      st.text = v.mech.text();
      if (!st.roles.empty()) terms.push_back(st);
    }
  }
  return s;
}

bool MechanismShape::has(Role child, Role parent) const {
  auto it = args.find(child);
  return it != args.end() && it->second.count(parent) > 0;
}

bool MechanismShape::coupled(Role child, std::initializer_list<Role> roles) const {
  auto it = terms.find(child);
  if (it == terms.end()) return false;
  for (const auto& t : it->second) {
    bool all = true;
    for (Role r : roles) all = all && t.roles.count(r) > 0;
    if (all) return true;
  }
  return false;
}

bool MechanismShape::y_nonlinear_in_w() const {
  auto it = terms.find(Role::Y);
  if (it == terms.end()) return false;
  for (const auto& t : it->second)
    if (t.roles.count(Role::W) && t.nonlinear_in_w) return true;
  return false;
}

bool MechanismShape::y_xw_nonlinear_in_w() const {
  auto it = terms.find(Role::Y);
  if (it == terms.end()) return false;
  for (const auto& t : it->second)
    if (t.roles.count(Role::W) && t.roles.count(Role::X) && t.nonlinear_in_w) return true;
  return false;
}

const std::vector<Criterion>& all_criteria() {
  static const std::vector<Criterion> c = {Criterion::TeSe, Criterion::DeIe, Criterion::DeSe, Criterion::IeSe,
                                           Criterion::DeIeSe};
  return c;
}

std::string criterion_effect_key(Criterion c) {
  switch (c) {
    case Criterion::TeSe:
      return "x-TE-SE";
    case Criterion::DeIe:
      return "x-DE-IE";
    case Criterion::DeSe:
      return "x-DE-SE";
    case Criterion::IeSe:
      return "x-IE-SE";
    case Criterion::DeIeSe:
      return "x-DE-IE-SE";
  }
  return "?";
}

std::string criterion_name(Criterion c, Scale s) {
  std::string key = display_name(criterion_effect_key(c), s);
  return "Str-" + key.substr(2);
}

namespace {

using R = Role;

StructuralVerdict verdict(Criterion c, bool interaction, std::string witness) {
  StructuralVerdict v;
  v.criterion = c;
  v.name = criterion_name(c);
  v.interaction = interaction;
  v.witness = std::move(witness);
  return v;
}

}  // namespace

StructuralVerdict check_de_ie(const MechanismShape& s) {
  if (!s.has(R::W, R::X)) return verdict(Criterion::DeIe, false, "no indirect path: X is not an argument of f_w");
  if (!s.coupled(R::Y, {R::X, R::W}))
    return verdict(Criterion::DeIe, false, "f_y additive in X and W: f_y = f1(X,Z,U) + f2(Z,W,U)");
  return verdict(Criterion::DeIe, true, "f_y has a term coupling X and W, and X -> W");
}

StructuralVerdict check_granular(const MechanismShape& s, Criterion which) {
  bool zx = s.has(R::X, R::Z);
  switch (which) {
    case Criterion::DeSe: {
      if (!zx) return verdict(which, false, "no back-door path: Z is not an argument of f_x");
      bool fy_xz = s.coupled(R::Y, {R::X, R::Z});
      if (!s.has(R::W, R::Z)) {
        if (!fy_xz) return verdict(which, false, "Z not in f_w and no f_y(X,Z) term");
        return verdict(which, true, "Z not in f_w, f_y has an (X,Z) term");
      }
      bool fy_xw = s.coupled(R::Y, {R::X, R::W});
      if (!fy_xw && !fy_xz) return verdict(which, false, "Z -> W, but f_y has no (X,W) or (X,Z) term");
      return verdict(which, true, fy_xz ? "Z -> W and f_y has an (X,Z) term" : "Z -> W and f_y has an (X,W) term");
    }
    case Criterion::IeSe: {
      if (!zx) return verdict(which, false, "no back-door path: Z is not an argument of f_x");
      if (!s.has(R::W, R::X)) return verdict(which, false, "no indirect path: X is not an argument of f_w");
      if (!s.coupled(R::W, {R::X, R::Z})) {
        if (s.coupled(R::Y, {R::Z, R::W})) return verdict(which, true, "f_w additive in X,Z but f_y has a (Z,W) term");
        if (s.y_nonlinear_in_w()) return verdict(which, true, "f_w additive in X,Z but f_y non-linear in W");
        return verdict(which, false, "f_w additive in X,Z; f_y has no (Z,W) term and is linear in W");
      }
      if (!s.has(R::Y, R::W)) return verdict(which, false, "f_w couples X,Z but W is not an argument of f_y");
      return verdict(which, true, "f_w couples X and Z, and W -> Y");
    }
    case Criterion::DeIeSe: {
      if (!zx) return verdict(which, false, "no back-door path: Z is not an argument of f_x");
      if (!s.has(R::W, R::X)) return verdict(which, false, "no indirect path: X is not an argument of f_w");
      if (!s.coupled(R::W, {R::X, R::Z})) {
        if (s.coupled(R::Y, {R::X, R::Z, R::W}))
          return verdict(which, true, "f_w additive in X,Z but f_y has an (X,Z,W) term");
        if (s.y_xw_nonlinear_in_w())
          return verdict(which, true, "f_w additive in X,Z but f_y(X,W) non-linear in W");
        return verdict(which, false, "f_w additive in X,Z; no (X,Z,W) term and f_y(X,W) linear in W");
      }
      if (!s.coupled(R::Y, {R::X, R::W}))
        return verdict(which, false, "f_w couples X,Z but f_y has no (X,W) term");
      return verdict(which, true, "f_w couples X and Z, and f_y has an (X,W) term");
    }
    default:
      throw Error("check_granular handles DE-SE, IE-SE and DE-IE-SE only");
  }
}

bool granular_by_clauses(const MechanismShape& s, Criterion which) {
  bool zx = s.has(R::X, R::Z), xw = s.has(R::W, R::X), zw = s.has(R::W, R::Z), wy = s.has(R::Y, R::W);
  bool fw_xz = s.coupled(R::W, {R::X, R::Z});
  bool fy_xz = s.coupled(R::Y, {R::X, R::Z}), fy_xw = s.coupled(R::Y, {R::X, R::W});
  bool fy_zw = s.coupled(R::Y, {R::Z, R::W}), fy_xzw = s.coupled(R::Y, {R::X, R::Z, R::W});
  bool none = false;
  switch (which) {
    case Criterion::DeSe:
      none = !zx || (!zw && !fy_xz) || (!fy_xz && !fy_xw);
      break;
    case Criterion::IeSe:
      none = !zx || !xw || (!fw_xz && !fy_zw && !s.y_nonlinear_in_w()) || !wy;
      break;
    case Criterion::DeIeSe:
      none = !zx || !xw || (!fw_xz && !fy_xzw && !s.y_xw_nonlinear_in_w()) || !fy_xw;
      break;
    default:
      throw Error("granular_by_clauses handles DE-SE, IE-SE and DE-IE-SE only");
  }
  return !none;
}

StructuralVerdict check_te_se(const MechanismShape& s) {
  if (!s.has(R::X, R::Z)) return verdict(Criterion::TeSe, false, "no back-door path: Z is not an argument of f_x");
  bool has_w = s.has(R::Y, R::W) || s.has(R::W, R::X) || s.has(R::W, R::Z);
  if (!has_w) {
    if (!s.coupled(R::Y, {R::X, R::Z}))
      return verdict(Criterion::TeSe, false, "additive f_y: f_y = f1(X,U) + f2(Z,U)");
    return verdict(Criterion::TeSe, true, "f_y has a term coupling X and Z, and Z -> X");
  }
  // With mediators the total effect runs through f_w as well; TE-SE is the sum
  // of the three granular interactions, so it vanishes when all three do.
  for (Criterion c : {Criterion::DeSe, Criterion::IeSe, Criterion::DeIeSe}) {
    auto v = check_granular(s, c);
    if (v.interaction)
      return verdict(Criterion::TeSe, true, "Z -> X and " + criterion_name(c) + " interaction: " + v.witness);
  }
  return verdict(Criterion::TeSe, false, "reduced form additive: DE-SE, IE-SE and DE-IE-SE all absent");
}

std::vector<StructuralVerdict> check_all(const MechanismShape& shape, Scale scale) {
  Link need = scale == Scale::Mean ? Link::Identity : scale == Scale::LogRisk ? Link::Log : Link::Logit;
  if (shape.link != need)
    throw Error("scale " + scale_name(scale) + " needs terms declared with link: " + link_name(need) +
                " (model declares link: " + link_name(shape.link) + ")");
  std::vector<StructuralVerdict> out = {check_te_se(shape), check_de_ie(shape),
                                        check_granular(shape, Criterion::DeSe),
                                        check_granular(shape, Criterion::IeSe),
                                        check_granular(shape, Criterion::DeIeSe)};
  for (auto& v : out) v.name = criterion_name(v.criterion, scale);
  return out;
}

}  // namespace variata
