#include "variata/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "solver.hpp"
#include "variata/error.hpp"
#include "variata/parallel.hpp"
#include "variata/random.hpp"

namespace variata {

Event Event::x_is(const ScmSpec& spec, int x) {
  Event e;
  if (x != kAnyX) e.equals.push_back({spec.endo[spec.x].name, static_cast<double>(x)});
  return e;
}

std::string Event::describe() const {
  if (equals.empty()) return "(always)";
  std::string s;
  for (const auto& [k, v] : equals) s += (s.empty() ? "" : " & ") + k + "=" + detail::fmt_double(v);
  return s;
}

int Contrast::order() const {
  std::size_t n = terms.size();
  if (n <= 1) return 0;
  if (n <= 2) return 1;
  if (n <= 4) return 2;
  return 3;
}

Contrast counterfactual_contrast(const Clause& c0, const Clause& c1, const Event& e, Scale scale) {
  Contrast c;
  c.name = "counterfactual";
  c.scale = scale;
  c.terms = {{+1, c1, e}, {-1, c0, e}};
  return c;
}

Contrast factual_contrast(const Clause& cl, const Event& e0, const Event& e1, Scale scale) {
  Contrast c;
  c.name = "factual";
  c.scale = scale;
  c.terms = {{+1, cl, e1}, {-1, cl, e0}};
  return c;
}

Contrast causal_spurious_contrast(const Clause& c0, const Clause& c1, const Event& e0, const Event& e1, Scale scale) {
  Contrast c;
  c.name = "causal-spurious";
  c.scale = scale;
  c.terms = {{+1, c1, e1}, {-1, c0, e1}, {-1, c1, e0}, {+1, c0, e0}};
  return c;
}

Contrast po_contrast(const ScmSpec& spec, const PoQuery& q) {
  Contrast c;
  c.name = q.label();
  c.scale = q.scale;
  c.terms = {{+1, po_clause(spec, q.x_y, q.x_w), Event::x_is(spec, q.x_z)}};
  return c;
}

Contrast contrast_for(const ScmSpec& spec, const EffectSpec& e) {
  Contrast c;
  c.name = e.name;
  c.scale = e.scale;
  for (const auto& t : e.terms) c.terms.push_back({t.coef, po_clause(spec, t.q.x_y, t.q.x_w), Event::x_is(spec, t.q.x_z)});
  return c;
}

Contrast z_de_ie_contrast(const ScmSpec& spec, const std::string& z_var, double z_value, Scale scale) {
  int zi = spec.index_of(z_var);
  if (zi < 0 || spec.endo[zi].role != Role::Z) throw Error("'" + z_var + "' is not a Z variable of the model");
  Event e;
  e.equals.push_back({z_var, z_value});
  Contrast c;
  c.name = "z-DE-IE";
  c.scale = scale;
  c.terms = {{+1, po_clause(spec, 1, 0), e},
             {-1, po_clause(spec, 0, 0), e},
             {-1, po_clause(spec, 1, 1), e},
             {+1, po_clause(spec, 0, 1), e}};
  return c;
}

Contrast drr_irr_contrast(const ScmSpec& spec) {
  Contrast c;
  c.name = "DRR-IRR";
  c.scale = Scale::Mean;
  c.combine = Combine::Ratio;
  Event any;
  c.terms = {{+1, po_clause(spec, 1, 0), any},
             {-1, po_clause(spec, 0, 0), any},
             {+1, po_clause(spec, 0, 1), any},
             {-1, po_clause(spec, 1, 1), any}};
  return c;
}

namespace {

using detail::CompiledClause;
using detail::Num;

// Contrast lowered against a spec: distinct clauses (index 0 is the factual
// world used for events), events as (variable, value) lists.
struct Prepared {
  std::vector<CompiledClause> clauses;
  std::vector<int> term_clause;
  std::vector<std::vector<std::pair<int, double>>> term_event;
  std::vector<int> term_group;  // event group, for the expansion route
  std::vector<Event> groups;
  std::vector<int> coef;
  Scale scale = Scale::Mean;
};

Prepared prepare(const ScmSpec& spec, const Contrast& c) {
  if (c.terms.empty()) throw Error("contrast has no terms");
  if (c.scale != Scale::Mean && !spec.endo[spec.y].mech.is_bernoulli_call())
    throw Error("log-risk and log-odds contrasts need a binary outcome Y := bernoulli(p)");
  if (c.combine == Combine::Ratio && c.scale != Scale::Mean) throw Error("ratio contrasts are defined on the mean scale");
  Prepared p;
  p.scale = c.scale;
  std::vector<std::string> keys{Clause{}.describe()};
  p.clauses.push_back(detail::compile_clause(spec, Clause{}));
  for (const auto& t : c.terms) {
    std::string key = t.clause.describe();
    auto it = std::find(keys.begin(), keys.end(), key);
    int idx;
    if (it == keys.end()) {
      keys.push_back(key);
      p.clauses.push_back(detail::compile_clause(spec, t.clause));
      idx = static_cast<int>(p.clauses.size()) - 1;
    } else {
      idx = static_cast<int>(it - keys.begin());
    }
    p.term_clause.push_back(idx);
    std::vector<std::pair<int, double>> ev;
    for (const auto& [name, v] : t.event.equals) {
      int vi = spec.index_of(name);
      if (vi < 0) throw Error("event references undeclared variable '" + name + "'");
      if (vi == spec.y) throw Error("conditioning events may not reference the outcome");
      ev.push_back({vi, v});
    }
    p.term_event.push_back(ev);
    auto g = std::find(p.groups.begin(), p.groups.end(), t.event);
    if (g == p.groups.end()) {
      p.groups.push_back(t.event);
      p.term_group.push_back(static_cast<int>(p.groups.size()) - 1);
    } else {
      p.term_group.push_back(static_cast<int>(g - p.groups.begin()));
    }
    p.coef.push_back(t.coef);
  }
  return p;
}

template <class T>
T transform(const T& y, Scale s, const std::string& clause) {
  switch (s) {
    case Scale::Mean:
      return y;
    case Scale::LogRisk:
      if (!(y > T(0))) throw Error("degenerate risk: P_C = 0 under " + clause);
      return Num<T>::log(y);
    case Scale::LogOdds:
      if (!(y > T(0)) || !(y < T(1))) throw Error("degenerate odds: P_C in {0,1} under " + clause);
      return Num<T>::logit(y);
  }
  return y;
}

template <class T>
bool event_holds(const std::vector<std::pair<int, double>>& ev, const std::vector<T>& factual) {
  for (const auto& [vi, v] : ev)
    if (factual[vi] != T(v)) return false;
  return true;
}

template <class T>
struct ExactSums {
  std::vector<T> A, B;  // per term: E[h 1(E)], P(E)
  std::vector<T> G;     // per event group: E[1(E) sum_k coef_k h_k]
  std::size_t cells = 0;
};

template <class T>
T prob_of(const Distribution& d, std::size_t k) {
  if constexpr (std::is_same_v<T, double>)
    return d.probs[k];
  else
    return d.rprobs[k];
}

template <class T>
T value_of(const Distribution& d, std::size_t k) {
  if constexpr (std::is_same_v<T, double>)
    return d.values[k];
  else
    return d.rvalues[k];
}

template <class T>
ExactSums<T> enumerate(const ScmSpec& spec, const Contrast& c, const Prepared& p, detail::Notes& notes) {
  std::vector<int> finite;
  std::vector<int> implicit;
  for (std::size_t k = 0; k < spec.exo.size(); ++k) {
    if (spec.exo[k].implicit)
      implicit.push_back(static_cast<int>(k));
    else if (spec.exo[k].dist.finite())
      finite.push_back(static_cast<int>(k));
    else
      throw Error("exact mode requires finite-support exogenous variables; " + spec.exo[k].name + " is " +
                  spec.exo[k].dist.describe());
  }
  std::size_t m = p.coef.size();
  ExactSums<T> s;
  s.A.assign(m, T(0));
  s.B.assign(m, T(0));
  s.G.assign(p.groups.size(), T(0));

  std::vector<std::size_t> pick(finite.size(), 0);
  std::vector<T> vals(spec.exo.size(), T(0));
  std::vector<std::string> clause_text;
  for (const auto& t : c.terms) clause_text.push_back(t.clause.describe());

  while (true) {
    T base(1);
    for (std::size_t f = 0; f < finite.size(); ++f) {
      const auto& d = spec.exo[finite[f]].dist;
      vals[finite[f]] = value_of<T>(d, pick[f]);
      base *= prob_of<T>(d, pick[f]);
    }
    if (base != T(0)) {
      detail::IntervalUniforms<T> start;
      start.lo.assign(spec.exo.size(), T(0));
      start.hi.assign(spec.exo.size(), T(1));
      std::vector<detail::IntervalUniforms<T>> stack{start};
      while (!stack.empty()) {
        detail::IntervalUniforms<T> cell = std::move(stack.back());
        stack.pop_back();
        std::vector<std::vector<T>> sols;
        try {
          detail::Solver<T, detail::IntervalUniforms<T>> solver(spec, vals, cell, true, &notes);
          for (const auto& cc : p.clauses) sols.push_back(solver.solve(cc));
        } catch (const detail::SplitRequest<T>& sr) {
          auto left = cell, right = cell;
          left.hi[sr.slot] = sr.p;
          right.lo[sr.slot] = sr.p;
          stack.push_back(std::move(right));
          stack.push_back(std::move(left));
          continue;
        }
        T w = base;
        for (int u : implicit) w *= cell.hi[u] - cell.lo[u];
        ++s.cells;
        if (w == T(0)) continue;
        const auto& factual = sols[0];
        for (std::size_t k = 0; k < m; ++k) {
          if (!event_holds(p.term_event[k], factual)) continue;
          T h = transform(sols[p.term_clause[k]][spec.y], p.scale, clause_text[k]);
          s.A[k] += w * h;
          s.B[k] += w;
          s.G[p.term_group[k]] += w * T(p.coef[k]) * h;
        }
      }
    }
    std::size_t f = 0;
    for (; f < finite.size(); ++f) {
      if (++pick[f] < spec.exo[finite[f]].dist.values.size()) break;
      pick[f] = 0;
    }
    if (f == finite.size()) break;
  }
  return s;
}

std::string rational_str(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

template <class T>
T combine(const Contrast& c, const std::vector<T>& A, const std::vector<T>& B, std::vector<T>& term_values) {
  term_values.clear();
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (B[k] == T(0)) throw Error("empty conditioning event: " + c.terms[k].event.describe());
    term_values.push_back(A[k] / B[k]);
  }
  if (c.combine == Combine::Linear) {
    T v(0);
    for (std::size_t k = 0; k < A.size(); ++k) v += T(c.terms[k].coef) * term_values[k];
    return v;
  }
  T v(1);
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (term_values[k] == T(0)) throw Error("ratio contrast divides by a zero expectation");
    v = c.terms[k].coef > 0 ? T(v * term_values[k]) : T(v / term_values[k]);
  }
  return v;
}

template <class T>
OracleValue exact_value(const ScmSpec& spec, const Contrast& c, const Prepared& p) {
  detail::Notes notes;
  auto s = enumerate<T>(spec, c, p, notes);
  OracleValue out;
  std::vector<T> tv;
  T v = combine(c, s.A, s.B, tv);
  out.value = Num<T>::to_double(v);
  out.exact = true;
  out.draws = s.cells;
  for (const auto& t : tv) out.term_values.push_back(Num<T>::to_double(t));
  if constexpr (!std::is_same_v<T, double>) {
    out.rational = true;
    out.rational_text = rational_str(v);
    for (const auto& t : tv) out.term_rationals.push_back(rational_str(t));
  }
  out.notes.assign(notes.msgs.begin(), notes.msgs.end());
  return out;
}

OracleValue exact_oracle(const ScmSpec& spec, const Contrast& c, const Prepared& p) {
  try {
    return exact_value<Rational>(spec, c, p);
  } catch (const detail::NonRational&) {
    return exact_value<double>(spec, c, p);
  }
}

OracleValue mc_oracle(const ScmSpec& spec, const Contrast& c, const Prepared& p, const OracleOptions& opt) {
  if (!opt.seed) throw Error("monte_carlo mode requires a seed");
  if (opt.n < 2) throw Error("monte_carlo mode needs at least 2 draws");
  std::uint64_t seed = *opt.seed;
  std::size_t m = p.coef.size();
  std::size_t d = 2 * m;
  std::vector<std::string> clause_text;
  for (const auto& t : c.terms) clause_text.push_back(t.clause.describe());

  // Per-draw vector v = (h_1 1(E_1), ..., h_m 1(E_m), 1(E_1), ..., 1(E_m)).
  auto draw_vector = [&](std::mt19937_64& rng, detail::Notes& notes, std::vector<double>& v) {
    ExogenousDraw draw = draw_exogenous(spec, rng);
    detail::SampledUniforms u{&draw.values};
    detail::Solver<double, detail::SampledUniforms> solver(spec, draw.values, u, true, &notes);
    std::vector<std::vector<double>> sols;
    sols.reserve(p.clauses.size());
    for (const auto& cc : p.clauses) sols.push_back(solver.solve(cc));
    for (std::size_t k = 0; k < m; ++k) {
      if (event_holds(p.term_event[k], sols[0])) {
        v[k] = transform(sols[p.term_clause[k]][spec.y], p.scale, clause_text[k]);
        v[m + k] = 1.0;
      } else {
        v[k] = 0.0;
        v[m + k] = 0.0;
      }
    }
  };

  // Shift for numerically stable cross moments: the first draw of chunk 0.
  std::vector<double> shift(d);
  {
    auto rng = stream_rng(seed, 0);
    detail::Notes scratch;
    draw_vector(rng, scratch, shift);
  }

  std::size_t chunks = (opt.n + kChunk - 1) / kChunk;
  struct ChunkSums {
    std::vector<double> s;   // sum of (v - shift)
    std::vector<double> ss;  // sum of (v - shift)(v - shift)^T, row-major
    detail::Notes notes;
  };
  std::vector<ChunkSums> parts(chunks);
  parallel_for(chunks, [&](std::size_t ci) {
    auto& part = parts[ci];
    part.s.assign(d, 0.0);
    part.ss.assign(d * d, 0.0);
    auto rng = stream_rng(seed, ci);
    std::size_t begin = ci * kChunk, end = std::min(opt.n, begin + kChunk);
    std::vector<double> v(d);
    for (std::size_t i = begin; i < end; ++i) {
      draw_vector(rng, part.notes, v);
      for (std::size_t a = 0; a < d; ++a) v[a] -= shift[a];
      for (std::size_t a = 0; a < d; ++a) {
        part.s[a] += v[a];
        if (v[a] == 0.0) continue;
        for (std::size_t b = a; b < d; ++b) part.ss[a * d + b] += v[a] * v[b];
      }
    }
  });
  std::vector<double> s(d, 0.0), ss(d * d, 0.0);
  detail::Notes notes;
  for (const auto& part : parts) {
    for (std::size_t a = 0; a < d; ++a) s[a] += part.s[a];
    for (std::size_t a = 0; a < d * d; ++a) ss[a] += part.ss[a];
    notes.merge(part.notes);
  }
  double N = static_cast<double>(opt.n);
  std::vector<double> mean(d), dev(d);
  for (std::size_t a = 0; a < d; ++a) {
    dev[a] = s[a] / N;
    mean[a] = dev[a] + shift[a];
  }
  std::vector<double> A(mean.begin(), mean.begin() + m), B(mean.begin() + m, mean.end());
  OracleValue out;
  std::vector<double> tv;
  out.value = combine(c, A, B, tv);
  out.term_values = tv;

  // Delta method.
  std::vector<double> g(d, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double coef = c.terms[k].coef;
    if (c.combine == Combine::Linear) {
      g[k] = coef / B[k];
      g[m + k] = -coef * A[k] / (B[k] * B[k]);
    } else {
      g[k] = out.value * coef / A[k];
      g[m + k] = -out.value * coef / B[k];
    }
  }
  double var = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      double sab = a <= b ? ss[a * d + b] : ss[b * d + a];
      double cov = sab / N - dev[a] * dev[b];
      var += g[a] * g[b] * cov;
    }
  out.se = var > 0.0 ? std::sqrt(var * N / (N - 1.0) / N) : 0.0;
  out.exact = false;
  out.draws = opt.n;
  out.notes.assign(notes.msgs.begin(), notes.msgs.end());
  return out;
}

}  // namespace

OracleValue oracle_contrast(const ScmSpec& spec, const Contrast& c, const OracleOptions& opt) {
  Prepared p = prepare(spec, c);
  OracleMode mode = opt.mode;
  if (mode == OracleMode::Auto) mode = spec.finite_support() ? OracleMode::Exact : OracleMode::MonteCarlo;
  if (mode == OracleMode::Exact) return exact_oracle(spec, c, p);
  return mc_oracle(spec, c, p, opt);
}

OracleValue oracle_contrast_expansion(const ScmSpec& spec, const Contrast& c) {
  if (c.combine != Combine::Linear) throw Error("the expansion route applies to linear contrasts only");
  Prepared p = prepare(spec, c);
  auto run = [&](auto tag) {
    using T = decltype(tag);
    detail::Notes notes;
    auto s = enumerate<T>(spec, c, p, notes);
    T v(0);
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      T pe(0);
      for (std::size_t k = 0; k < p.coef.size(); ++k)
        if (p.term_group[k] == static_cast<int>(g)) pe = s.B[k];
      if (pe == T(0)) throw Error("empty conditioning event: " + p.groups[g].describe());
      v += s.G[g] / pe;
    }
    OracleValue out;
    out.value = Num<T>::to_double(v);
    out.exact = true;
    out.draws = s.cells;
    if constexpr (!std::is_same_v<T, double>) {
      out.rational = true;
      out.rational_text = rational_str(v);
    }
    out.notes.assign(notes.msgs.begin(), notes.msgs.end());
    return out;
  };
  try {
    return run(Rational());
  } catch (const detail::NonRational&) {
    return run(0.0);
  }
}

}  // namespace variata
