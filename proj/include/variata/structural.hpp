#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "variata/effects.hpp"
#include "variata/scm.hpp"

namespace variata {

// One additive term of a mechanism at role level: which roles it couples.
struct ShapeTerm {
  std::set<Role> roles;
  bool nonlinear_in_w = false;
  std::string text;
};

// Role-level functional shape. Z and W are aggregated: f_w is the union of the
// mechanisms of every W variable, and a term "couples X and Z" if it reads X
// and any Z variable.
struct MechanismShape {
  std::map<Role, std::set<Role>> args;
  std::map<Role, std::vector<ShapeTerm>> terms;
  Link link = Link::Identity;
  bool declared = true;  // false when derived without a terms: block

  // Uses the terms: block. Without one, each mechanism becomes a single term
  // coupling all of its arguments, flagged non-linear in W (the conservative
  // reading: every criterion that depends on additivity reports interaction).
  static MechanismShape from_spec(const ScmSpec& spec);

  bool has(Role child, Role parent) const;
  // A term of `child`'s mechanism reads all of `roles`.
  bool coupled(Role child, std::initializer_list<Role> roles) const;
  bool y_nonlinear_in_w() const;     // some f_y term with W is flagged ~nl
  bool y_xw_nonlinear_in_w() const;  // some f_y term with X and W is flagged ~nl
};

enum class Criterion { TeSe, DeIe, DeSe, IeSe, DeIeSe };
std::string criterion_name(Criterion c, Scale s = Scale::Mean);  // "Str-TE-SE", "Str-DLR-ILR", ...
const std::vector<Criterion>& all_criteria();                       // report order
std::string criterion_effect_key(Criterion c);                     // "x-TE-SE", ...

struct StructuralVerdict {
  Criterion criterion = Criterion::TeSe;
  std::string name;
  bool interaction = false;
  std::string witness;  // tree leaf or definition clause that decided the verdict
};

StructuralVerdict check_te_se(const MechanismShape& shape);
StructuralVerdict check_de_ie(const MechanismShape& shape);
// Walks the decision tree for DE-SE, IE-SE or DE-IE-SE.
StructuralVerdict check_granular(const MechanismShape& shape, Criterion which);
// Evaluates the clause lists of the granular definition directly (used to
// cross-check the trees).
bool granular_by_clauses(const MechanismShape& shape, Criterion which);
// All five criteria. Log scales need a shape whose terms describe log p_y
// (link: log) or logit p_y (link: logit); a mismatch is an error.
std::vector<StructuralVerdict> check_all(const MechanismShape& shape, Scale scale = Scale::Mean);

}  // namespace variata
