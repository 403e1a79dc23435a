#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "variata/dataset.hpp"
#include "variata/scm.hpp"

namespace variata {

struct Clause;

// One entry of an intervention clause: either a constant, or the natural value
// the variable would take under a sub-intervention (W_{x'} inside Y_{x, W_{x'}}).
struct Assignment {
  enum class Kind { Set, Natural } kind = Kind::Set;
  double value = 0.0;
  std::shared_ptr<const Clause> under;

  static Assignment set(double v);
  static Assignment natural(const Clause& sub);
};

struct Clause {
  std::map<std::string, Assignment> assignments;

  int depth() const;  // 0 for the empty clause, 1 for constants only, 2 with nesting
  std::string describe() const;
  bool empty() const { return assignments.empty(); }
};

// Clause for Y_{x_y, W_{x_w}}: X := x_y and every W variable takes its natural
// value under X := x_w. When x_y == x_w this is the plain intervention {X: x}.
Clause po_clause(const ScmSpec& spec, int x_y, int x_w);

// Checks nesting rules against a spec (declared variables, depth <= 2, nested
// clauses assign only W variables). Throws Error.
void validate_clause(const ScmSpec& spec, const Clause& c);

struct ExogenousDraw {
  std::vector<double> values;  // by exogenous slot (ScmSpec::exo order)
  double weight = 1.0;
};

ExogenousDraw draw_exogenous(const ScmSpec& spec, std::mt19937_64& rng);

// Solution of every endogenous variable (ScmSpec::endo order) in the submodel
// of `clause`, at exogenous point `draw`.
std::vector<double> potential_response(const ScmSpec& spec, const Clause& clause, const ExogenousDraw& draw);

// n rows from the observational distribution. Draws are generated in chunks of
// 4096 with per-chunk streams, so the result does not depend on thread count.
Dataset sample_observational(const ScmSpec& spec, std::size_t n, std::uint64_t seed);

// Chunk size shared by the samplers and the Monte-Carlo oracle.
constexpr std::size_t kChunk = 4096;

}  // namespace variata
