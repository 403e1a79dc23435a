#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "variata/effects.hpp"
#include "variata/estimators.hpp"
#include "variata/learners.hpp"

namespace variata {

struct RunConfig {
  std::string subcommand;  // simulate, check, decompose, test, experiment
  std::string data;
  std::string roles;
  std::string scm;
  std::string out;
  Scale scale = Scale::Mean;
  double alpha = 0.05;
  int folds = 10;
  LearnerConfig learner;
  std::uint64_t seed = 1;
  EstimatorKind estimator = EstimatorKind::OneStep;

  std::size_t n = 1000;             // simulate
  std::string effect = "x-TE-SE";   // test
  std::string z_column;             // test: z-specific DE-IE when set
  std::optional<double> z_value;
  std::size_t min_stratum = 50;
  std::string grid = "desk";        // experiment: desk or full
  std::optional<int> reps;
  std::vector<std::size_t> sizes;
  std::vector<std::string> scms;

  // Bounds: 0 < alpha < 1, folds >= 2, 0 < clip_e < 0.5, 0 < clip_mu < 0.5.
  void validate() const;
};

// key = value lines; "[section]" headers only group keys; '#' starts a
// comment. Keys use the flag spelling without dashes ("clip-e" or "clip_e").
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config(const std::string& path);
// Sets every recognised key; unknown keys are an error.
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

}  // namespace variata
