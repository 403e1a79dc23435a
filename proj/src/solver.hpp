#pragma once

// Submodel solver shared by sampling, potential responses and the oracle.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <type_traits>
#include <set>
#include <string>
#include <vector>

#include "expr_eval.hpp"
#include "variata/counterfactual.hpp"
#include "variata/error.hpp"
#include "variata/scm.hpp"

namespace variata::detail {

// Clause lowered to per-variable modes.
struct CompiledClause {
  enum Mode : std::uint8_t { Mech, Set, Sub };
  std::vector<Mode> mode;
  std::vector<double> set_d;
  std::vector<Rational> set_r;
  std::vector<int> sub;                    // index into subs for Sub entries
  std::vector<CompiledClause> subs;
};

CompiledClause compile_clause(const ScmSpec& spec, const Clause& c);

// Warnings collected while solving (clamped bernoulli parameters).
struct Notes {
  std::set<std::string> msgs;
  void merge(const Notes& o) { msgs.insert(o.msgs.begin(), o.msgs.end()); }
};

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class T>
T clamp_probability(const T& p, const std::string& var, Notes* notes) {
  double pd = Num<T>::to_double(p);
  if (std::isnan(pd)) throw Error("bernoulli parameter of " + var + " is NaN");
  if (p < T(0) || p > T(1)) {
    if ((pd < -1e-9 || pd > 1.0 + 1e-9) && notes)
      notes->msgs.insert("bernoulli parameter of " + var + " clamped to [0,1] (saw " + fmt_double(pd) + ")");
    return p < T(0) ? T(0) : T(1);
  }
  return p;
}

// Bernoulli draws from sampled uniforms: 1(U < p).
struct SampledUniforms {
  const std::vector<double>* exo;
  double indicator(int slot, double p) const { return (*exo)[slot] < p ? 1.0 : 0.0; }
};

// Thrown when a bernoulli threshold falls strictly inside the current
// interval of its uniform; the enumerator splits the cell at p.
template <class T>
struct SplitRequest {
  int slot;
  T p;
};

template <class T>
struct IntervalUniforms {
  std::vector<T> lo, hi;
  T indicator(int slot, const T& p) const {
    if (p >= hi[slot]) return T(1);
    if (p <= lo[slot]) return T(0);
    throw SplitRequest<T>{slot, p};
  }
};

// Solves submodels at one exogenous point. When risk_y is set and Y's
// mechanism is a single bernoulli(p) call, Y's solution is p itself (the
// unit-level risk P_C), which integrates U_y out analytically.
template <class T, class U>
class Solver {
 public:
  Solver(const ScmSpec& spec, const std::vector<T>& exo, const U& unif, bool risk_y, Notes* notes)
      : spec_(spec), exo_(exo), unif_(unif), risk_y_(risk_y), notes_(notes) {}

  std::vector<T> solve(const CompiledClause& c) const {
    std::vector<std::vector<T>> sub_vals;
    sub_vals.reserve(c.subs.size());
    for (const auto& s : c.subs) sub_vals.push_back(solve(s));
    std::vector<T> vals(spec_.endo.size());
    for (std::size_t i = 0; i < spec_.endo.size(); ++i) {
      switch (c.mode[i]) {
        case CompiledClause::Set:
          vals[i] = set_value(c, i);
          break;
        case CompiledClause::Sub:
          vals[i] = sub_vals[c.sub[i]][i];
          break;
        case CompiledClause::Mech:
          vals[i] = eval_var(static_cast<int>(i), vals);
          break;
      }
    }
    return vals;
  }

 private:
  struct Ctx {
    const Solver* s;
    const std::vector<T>* vals;
    int owner;
    T var_value(const Node& n) const { return n.exo ? s->exo_[n.slot] : (*vals)[n.slot]; }
    T var(const Node& n) { return var_value(n); }
    T bernoulli(const Node& n, const T& p) {
      T q = clamp_probability(p, s->spec_.endo[owner].name, s->notes_);
      return s->unif_.indicator(n.slot, q);
    }
  };

  T set_value(const CompiledClause& c, std::size_t i) const {
    if constexpr (std::is_same_v<T, double>)
      return c.set_d[i];
    else
      return c.set_r[i];
  }

  T eval_var(int i, const std::vector<T>& vals) const {
    const Expr& e = spec_.endo[i].mech;
    Ctx ctx{this, &vals, i};
    if (risk_y_ && i == spec_.y && e.is_bernoulli_call()) {
      T p = eval_node<T>(e, e.nodes()[e.root()].kids[0], ctx);
      return clamp_probability(p, spec_.endo[i].name, notes_);
    }
    return eval_expr<T>(e, ctx);
  }

  const ScmSpec& spec_;
  const std::vector<T>& exo_;
  const U& unif_;
  bool risk_y_;
  Notes* notes_;
};

}  // namespace variata::detail
