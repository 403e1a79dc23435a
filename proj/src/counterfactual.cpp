#include "variata/counterfactual.hpp"

#include "solver.hpp"
#include "variata/error.hpp"
#include "variata/parallel.hpp"
#include "variata/random.hpp"

namespace variata {

Assignment Assignment::set(double v) {
  Assignment a;
  a.kind = Kind::Set;
  a.value = v;
  return a;
}

Assignment Assignment::natural(const Clause& sub) {
  Assignment a;
  a.kind = Kind::Natural;
  a.under = std::make_shared<const Clause>(sub);
  return a;
}

int Clause::depth() const {
  int d = assignments.empty() ? 0 : 1;
  for (const auto& [k, a] : assignments)
    if (a.kind == Assignment::Kind::Natural) d = std::max(d, 1 + std::max(1, a.under->depth()));
  return d;
}

std::string Clause::describe() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [k, a] : assignments) {
    if (!first) s += ", ";
    first = false;
    s += k + ": ";
    if (a.kind == Assignment::Kind::Set)
      s += detail::fmt_double(a.value);
    else
      s += "natural under " + a.under->describe();
  }
  return s + "}";
}

Clause po_clause(const ScmSpec& spec, int x_y, int x_w) {
  Clause c;
  c.assignments[spec.endo[spec.x].name] = Assignment::set(x_y);
  if (x_y != x_w) {
    Clause sub;
    sub.assignments[spec.endo[spec.x].name] = Assignment::set(x_w);
    for (int w : spec.w) c.assignments[spec.endo[w].name] = Assignment::natural(sub);
  }
  return c;
}

void validate_clause(const ScmSpec& spec, const Clause& c) {
  if (c.depth() > 2) throw Error("clause nesting deeper than 2: " + c.describe());
  for (const auto& [k, a] : c.assignments) {
    int i = spec.index_of(k);
    if (i < 0) throw Error("clause assigns undeclared variable '" + k + "'");
    if (a.kind == Assignment::Kind::Natural) {
      if (spec.endo[i].role != Role::W)
        throw Error("nested assignment for " + k + ": only W variables may take natural values under a sub-intervention");
      for (const auto& [k2, a2] : a.under->assignments)
        if (a2.kind != Assignment::Kind::Set)
          throw Error("unresolvable nesting in " + c.describe());
      validate_clause(spec, *a.under);
    }
  }
}

namespace detail {

CompiledClause compile_clause(const ScmSpec& spec, const Clause& c) {
  validate_clause(spec, c);
  std::size_t n = spec.endo.size();
  CompiledClause cc;
  cc.mode.assign(n, CompiledClause::Mech);
  cc.set_d.assign(n, 0.0);
  cc.set_r.assign(n, Rational(0));
  cc.sub.assign(n, -1);
  std::vector<const Clause*> seen;
  for (const auto& [k, a] : c.assignments) {
    int i = spec.index_of(k);
    if (a.kind == Assignment::Kind::Set) {
      cc.mode[i] = CompiledClause::Set;
      cc.set_d[i] = a.value;
      cc.set_r[i] = Rational(a.value);
    } else {
      // Sub-clauses with identical text share one solve.
      std::string key = a.under->describe();
      int idx = -1;
      for (std::size_t s = 0; s < seen.size(); ++s)
        if (seen[s]->describe() == key) idx = static_cast<int>(s);
      if (idx < 0) {
        seen.push_back(a.under.get());
        cc.subs.push_back(compile_clause(spec, *a.under));
        idx = static_cast<int>(cc.subs.size()) - 1;
      }
      cc.mode[i] = CompiledClause::Sub;
      cc.sub[i] = idx;
    }
  }
  return cc;
}

}  // namespace detail

ExogenousDraw draw_exogenous(const ScmSpec& spec, std::mt19937_64& rng) {
  ExogenousDraw d;
  d.values.resize(spec.exo.size());
  for (std::size_t k = 0; k < spec.exo.size(); ++k) d.values[k] = spec.exo[k].dist.sample(rng);
  return d;
}

std::vector<double> potential_response(const ScmSpec& spec, const Clause& clause, const ExogenousDraw& draw) {
  if (draw.values.size() != spec.exo.size()) throw Error("exogenous draw does not match the model");
  auto cc = detail::compile_clause(spec, clause);
  detail::SampledUniforms u{&draw.values};
  detail::Solver<double, detail::SampledUniforms> solver(spec, draw.values, u, false, nullptr);
  return solver.solve(cc);
}

Dataset sample_observational(const ScmSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error("sample size must be at least 1");
  Dataset d;
  d.x_name = spec.endo[spec.x].name;
  d.y_name = spec.endo[spec.y].name;
  for (int z : spec.z) d.z_names.push_back(spec.endo[z].name);
  for (int w : spec.w) d.w_names.push_back(spec.endo[w].name);
  d.x.resize(n);
  d.y.resize(n);
  d.z.assign(spec.z.size(), std::vector<double>(n));
  d.w.assign(spec.w.size(), std::vector<double>(n));

  auto factual = detail::compile_clause(spec, Clause{});
  std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<detail::Notes> notes(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    auto rng = stream_rng(seed, c);
    std::size_t begin = c * kChunk, end = std::min(n, begin + kChunk);
    for (std::size_t i = begin; i < end; ++i) {
      ExogenousDraw draw = draw_exogenous(spec, rng);
      detail::SampledUniforms u{&draw.values};
      detail::Solver<double, detail::SampledUniforms> solver(spec, draw.values, u, false, &notes[c]);
      auto v = solver.solve(factual);
      double x = v[spec.x];
      if (x != 0.0 && x != 1.0)
        throw Error("mechanism of " + spec.endo[spec.x].name + " produced " + detail::fmt_double(x) +
                    "; X must take values in {0, 1}");
      for (std::size_t k = 0; k < v.size(); ++k)
        if (!std::isfinite(v[k]))
          throw Error("mechanism of " + spec.endo[k].name + " produced a non-finite value");
      d.x[i] = x;
      d.y[i] = v[spec.y];
      for (std::size_t j = 0; j < spec.z.size(); ++j) d.z[j][i] = v[spec.z[j]];
      for (std::size_t j = 0; j < spec.w.size(); ++j) d.w[j][i] = v[spec.w[j]];
    }
  });
  detail::Notes all;
  for (const auto& nt : notes) all.merge(nt);
  d.notes.assign(all.msgs.begin(), all.msgs.end());
  return d;
}

}  // namespace variata
