#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "variata/expr.hpp"

namespace variata {

enum class Role { Z, X, W, Y };

std::string role_name(Role r);
Role parse_role(const std::string& s);

enum class DistKind { Finite, Normal, Uniform, Exponential };

// Distribution of one exogenous variable.
struct Distribution {
  DistKind kind = DistKind::Finite;
  double a = 0.0;  // normal: mean, uniform: lower, exponential: rate
  double b = 0.0;  // normal: sd, uniform: upper
  // Finite support (bernoulli and categorical).
  std::vector<double> values;
  std::vector<double> probs;
  std::vector<Rational> rvalues;
  std::vector<Rational> rprobs;

  bool finite() const { return kind == DistKind::Finite; }
  double sample(std::mt19937_64& rng) const;
  std::string describe() const;

  static Distribution parse(const std::string& text);
  static Distribution unit_uniform();
};

struct ExoVar {
  std::string name;
  Distribution dist;
  bool implicit = false;  // uniform behind a bernoulli(p) call
  int owner = -1;         // endogenous index for implicit uniforms
};

struct EndoVar {
  std::string name;
  Role role = Role::Z;
  Expr mech;
  std::vector<int> parents;  // endogenous indices referenced by mech
  std::vector<int> exo_refs;  // exogenous indices referenced by mech (incl. implicit)
};

enum class Link { Identity, Log, Logit };
std::string link_name(Link l);

// One additive term of a mechanism, as declared in the terms: block.
struct TermDecl {
  std::vector<std::string> vars;  // endogenous variables coupled by the term
  bool nonlinear_in_w = false;
  std::string text;
};

struct TermsBlock {
  bool present = false;
  std::map<std::string, std::vector<TermDecl>> terms;  // by variable name
  Link link = Link::Identity;                          // scale of the Y term list
};

// Immutable after parsing; safe to share across threads.
class ScmSpec {
 public:
  std::string name;
  std::string source;
  std::vector<EndoVar> endo;  // topological order
  std::vector<ExoVar> exo;
  TermsBlock terms;
  int x = -1;
  int y = -1;
  std::vector<int> z;
  std::vector<int> w;

  int index_of(const std::string& var) const;  // -1 when absent
  int exo_index(const std::string& var) const;
  bool finite_support() const;
  std::vector<std::string> non_finite_exogenous() const;
};

// Parses the declarative SCM text format (see docs/scm_format.md).
ScmSpec parse_scm(const std::string& text);
// Loads a spec from a file path, or a builtin when the argument names one.
ScmSpec load_scm(const std::string& path_or_name);

// Builtin models: M1..M5 (synthetic experiments) and fixtures C1..C15.
ScmSpec builtin_scm(const std::string& name);
std::string builtin_source(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace variata
