#pragma once

#include <map>
#include <string>
#include <vector>

#include "variata/dataset.hpp"
#include "variata/effects.hpp"
#include "variata/nuisance.hpp"

namespace variata {

enum class EstimatorKind { PlugIn, OneStep };
std::string estimator_name(EstimatorKind k);  // "plugin", "onestep"
EstimatorKind parse_estimator(const std::string& s);

struct PoEstimate {
  PoQuery q;
  EstimatorKind kind = EstimatorKind::OneStep;
  double value = 0.0;
  double correction = 0.0;  // mean of the residual terms (T1 + T2)
  double se = 0.0;
  std::vector<double> phi;  // centered influence values
};

// Empirical analogue of the identification formula: average of nu^ over rows
// with X = x_z (all rows when x_z is kAnyX). On the mean scale PO(x,x,x) is
// E[Y | X = x] by consistency and returns the sample mean. Uses the one-step
// influence values for its standard error.
PoEstimate po_plugin(const NuisanceFits& fits, const Dataset& data, const PoQuery& q);
// Mean of the uncentered influence expression.
PoEstimate po_onestep(const NuisanceFits& fits, const Dataset& data, const PoQuery& q);

struct EffectEstimate {
  std::string key;
  std::string name;
  Scale scale = Scale::Mean;
  EstimatorKind kind = EstimatorKind::OneStep;
  double value = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n = 0;
  std::vector<double> phi;
};

// Memoizes PO estimates so that a report touching many effects computes each
// of the eight POs once.
class Estimator {
 public:
  Estimator(const NuisanceFits& fits, const Dataset& data, EstimatorKind kind);
  const PoEstimate& po(const PoQuery& q);
  EffectEstimate effect(const EffectSpec& spec);
  // prod_k PO_k^{coef_k} on the mean scale with a delta-method SE (risk-ratio
  // diagnostics such as DRR-IRR).
  EffectEstimate ratio(const std::string& name, const std::vector<EffectTerm>& terms);
  EstimatorKind kind() const { return kind_; }
  const NuisanceFits& fits() const { return fits_; }
  const Dataset& data() const { return data_; }

 private:
  const NuisanceFits& fits_;
  const Dataset& data_;
  EstimatorKind kind_;
  std::map<std::string, PoEstimate> cache_;
};

EffectEstimate effect_estimate(const NuisanceFits& fits, const Dataset& data, const EffectSpec& spec,
                               EstimatorKind kind);

// DRR-IRR = [PO(1,0)/PO(0,0)] / [PO(1,1)/PO(0,1)], marginal mean-scale POs.
std::vector<EffectTerm> drr_irr_terms();

// Standard error from centered influence values: sqrt(mean(phi^2) / n).
double influence_se(const std::vector<double>& phi);

}  // namespace variata
