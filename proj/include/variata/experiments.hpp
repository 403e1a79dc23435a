#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "variata/estimators.hpp"
#include "variata/learners.hpp"

namespace variata {

struct ExperimentGrid {
  std::vector<std::string> scms = {"M1", "M2", "M3", "M4", "M5"};
  std::vector<std::size_t> sizes = {500, 2000, 8000};
  int reps = 20;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  EstimatorKind kind = EstimatorKind::OneStep;
  LearnerConfig learner;
  int folds = 10;

  void validate() const;
};

// reps = 20, n in {500, 2000, 8000}, M1..M5.
ExperimentGrid desk_grid();
// reps = 100, n in {500, 750, 1500, 3000, 5000, 8000}, M1..M5.
ExperimentGrid full_grid();

struct PValueRow {
  std::string scm;
  std::size_t n = 0;
  int rep = 0;
  std::string interaction;  // "x-TE-SE", ...
  double p = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  bool null_true = false;  // structural verdict: no interaction
  std::string error;       // non-empty when the repetition failed
};

struct PValueTable {
  std::vector<PValueRow> rows;
  std::string to_csv() const;
};

// Every (scm, n, rep) draws a fresh sample from its own RNG stream, fits
// nuisances and tests the five interaction measures. Deterministic in the
// grid's seed; repetitions run in parallel.
PValueTable run_grid(const ExperimentGrid& grid);

struct CellSummary {
  std::string scm;
  std::size_t n = 0;
  std::string interaction;
  bool null_true = false;
  std::string label;  // "type-I" for null-true cells, "power" otherwise
  int count = 0;      // successful repetitions
  int errors = 0;
  double rejection_rate = 0.0;
  double ks_d = 0.0;
  double ks_p = 1.0;
  std::vector<double> ecdf;  // at kEcdfGrid points
};

struct ExperimentSummary {
  double alpha = 0.05;
  std::vector<CellSummary> cells;
  double pooled_null_rate = 0.0;  // rejection rate over every null-true row
  int pooled_null_count = 0;

  const CellSummary& cell(const std::string& scm, std::size_t n, const std::string& interaction) const;
  std::string ecdf_csv() const;
};

// 0, 0.01, ..., 1.
const std::vector<double>& ecdf_grid();
ExperimentSummary summarize(const PValueTable& table, double alpha);

}  // namespace variata
