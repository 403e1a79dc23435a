#pragma once

#include <optional>
#include <string>
#include <vector>

#include "variata/estimators.hpp"

namespace variata {

struct TestResult {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double statistic = 0.0;
  double p = 1.0;
  std::optional<double> p_adjusted;  // BH q-value when a correction ran
  bool rejected = false;             // p < alpha strictly; BH step-up flags when adjusted
  double alpha = 0.05;
};

// Two-sided Wald test of H0: value = 0 against the standard normal.
TestResult wald_test(const std::string& name, double value, double se, double alpha);
TestResult interaction_test(const EffectEstimate& est, double alpha);
double normal_two_sided_p(double z);

// Benjamini-Hochberg step-up q-values (same order as the input).
std::vector<double> bh_adjust(const std::vector<double>& p);
// Flags of the step-up procedure at level q: the largest rank k with
// p_(k) <= k q / m and everything below it.
std::vector<bool> bh_reject(const std::vector<double>& p, double q);

enum class Correction { None, BenjaminiHochberg };

struct DecompositionReport {
  Scale scale = Scale::Mean;
  EstimatorKind kind = EstimatorKind::OneStep;
  double alpha = 0.05;
  EffectEstimate tv;
  std::vector<EffectEstimate> estimates;  // every effect of the full decomposition, plus helpers
  TestResult te_se;
  TestResult de_ie;
  Form form = Form::ThreeTerm;
  std::vector<std::string> selected;  // keys, in form order
  std::vector<std::string> omitted;   // interaction keys whose tests did not reject
  double additivity_residual = 0.0;   // |TV - sum(selected) - sum(omitted)|
  double parsimony_gap = 0.0;         // TV - sum(selected) = sum(omitted)
  std::vector<TestResult> granular;   // five interaction tests with BH q-values
  std::optional<EffectEstimate> drr_irr;  // log-risk diagnostic
  std::vector<std::string> warnings;

  const EffectEstimate& estimate(const std::string& key) const;
};

// Parsimony selection on the mean scale.
DecompositionReport run_alg1(Estimator& est, double alpha, bool granular = true);
// Same branch logic on the log-risk scale (log-odds accepted as an extension).
DecompositionReport run_alg2(Estimator& est, double alpha, bool granular = true);
// Dispatches by the scale the nuisances were fitted on.
DecompositionReport run_decomposition(Estimator& est, double alpha, bool granular = true);

// DE-SE, IE-SE, DE-IE-SE plus TE-SE and DE-IE, optionally BH-adjusted across the five.
// Contrasts that are identically zero on the data (value and SE within 1e-12 of 0) come back
// not rejected with p = 1 and a note in `warnings`.
std::vector<TestResult> granular_tests(Estimator& est, double alpha, Correction correction);
std::vector<TestResult> granular_tests(Estimator& est, double alpha, Correction correction,
                                       std::vector<std::string>& warnings);

struct ZSpecificOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  LearnerConfig learner;
  EstimatorKind kind = EstimatorKind::OneStep;
  std::size_t min_stratum = 50;  // rows per treatment arm
  Scale scale = Scale::Mean;
};

struct ZSpecificResult {
  TestResult test;
  EffectEstimate estimate;
  std::size_t stratum_rows = 0;
};

// z-DE-IE(y | z) = [Y_{x1,W_x0} - Y_{x0,W_x0}] - [Y_{x1,W_x1} - Y_{x0,W_x1}] given Z = z,
// with nuisances refitted inside the stratum.
ZSpecificResult z_specific_de_ie(const Dataset& data, const std::string& z_column, double z_value, double alpha,
                                 const ZSpecificOptions& opt);
// The same contrast without conditioning (x_z marginal), on already fitted nuisances.
EffectSpec marginal_z_de_ie(Scale scale = Scale::Mean);

}  // namespace variata
