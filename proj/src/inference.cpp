#include "variata/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "variata/error.hpp"

namespace variata {

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

TestResult wald_test(const std::string& name, double value, double se, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
  if (!(se > 0) || !std::isfinite(se))
    throw EstimationError("test of " + name + " has standard error " + std::to_string(se) +
                          "; the data are degenerate for this contrast");
  TestResult t;
  t.name = name;
  t.estimate = value;
  t.se = se;
  t.statistic = value / se;
  t.p = std::clamp(normal_two_sided_p(t.statistic), 0.0, 1.0);
  t.alpha = alpha;
  t.rejected = t.p < alpha;
  return t;
}

TestResult interaction_test(const EffectEstimate& est, double alpha) {
  return wald_test(est.name, est.value, est.se, alpha);
}

std::vector<double> bh_adjust(const std::vector<double>& p) {
  std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> q(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    std::size_t i = order[r];
    running = std::min(running, p[i] * static_cast<double>(m) / static_cast<double>(r + 1));
    q[i] = std::min(running, 1.0);
  }
  return q;
}

std::vector<bool> bh_reject(const std::vector<double>& p, double q) {
  std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::size_t k = 0;
  for (std::size_t r = 0; r < m; ++r)
    if (p[order[r]] <= static_cast<double>(r + 1) * q / static_cast<double>(m)) k = r + 1;
  std::vector<bool> out(m, false);
  for (std::size_t r = 0; r < k; ++r) out[order[r]] = true;
  return out;
}

const EffectEstimate& DecompositionReport::estimate(const std::string& key) const {
  if (key == "TV") return tv;
  for (const auto& e : estimates)
    if (e.key == key) return e;
  throw Error("report has no estimate for " + key);
}

namespace {
TestResult report_test(const EffectEstimate& e, double alpha, std::vector<std::string>& warnings);
}

std::vector<TestResult> granular_tests(Estimator& est, double alpha, Correction correction) {
  std::vector<std::string> unused;
  return granular_tests(est, alpha, correction, unused);
}

std::vector<TestResult> granular_tests(Estimator& est, double alpha, Correction correction,
                                       std::vector<std::string>& warnings) {
  Scale s = est.fits().scale;
  std::vector<TestResult> out;
  for (const auto& key : interaction_keys()) out.push_back(report_test(est.effect(effect(key, s)), alpha, warnings));
  if (correction == Correction::BenjaminiHochberg) {
    std::vector<double> p;
    for (const auto& t : out) p.push_back(t.p);
    auto q = bh_adjust(p);
    auto flags = bh_reject(p, alpha);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].p_adjusted = q[i];
      out[i].rejected = flags[i];
    }
  }
  return out;
}

namespace {

// A contrast that is identically zero on the data (for example every W
// contrast when the data have no W columns) is reported as not rejected.
TestResult report_test(const EffectEstimate& e, double alpha, std::vector<std::string>& warnings) {
  if (e.se <= 1e-12 && std::fabs(e.value) <= 1e-12) {
    TestResult t;
    t.name = e.name;
    t.estimate = e.value;
    t.alpha = alpha;
    for (const auto& w : warnings)
      if (w.rfind(e.name + " ", 0) == 0) return t;
    warnings.push_back(e.name + " is identically zero on these data; its test is reported as not rejected");
    return t;
  }
  return interaction_test(e, alpha);
}

DecompositionReport decompose(Estimator& est, double alpha, bool granular) {
  Scale s = est.fits().scale;
  DecompositionReport r;
  r.scale = s;
  r.kind = est.kind();
  r.alpha = alpha;
  r.warnings = est.fits().warnings;
  r.tv = est.effect(effect("TV", s));
  for (const auto& key : {"x-TE", "x-DE", "x-IE", "x-SE", "x-DE-IE", "x-TE-SE", "x-DE-SE", "x-IE-SE",
                          "x-DE-IE-SE"})
    r.estimates.push_back(est.effect(effect(key, s)));
  r.te_se = report_test(r.estimate("x-TE-SE"), alpha, r.warnings);
  r.de_ie = report_test(r.estimate("x-DE-IE"), alpha, r.warnings);
  r.form = select_form(r.te_se.rejected, r.de_ie.rejected);
  r.selected = form_terms(r.form);
  for (const auto& key : {"x-DE-IE", "x-TE-SE"})
    if (std::find(r.selected.begin(), r.selected.end(), key) == r.selected.end()) r.omitted.push_back(key);
  double sel = 0.0, om = 0.0;
  for (const auto& k : r.selected) sel += r.estimate(k).value;
  for (const auto& k : r.omitted) om += r.estimate(k).value;
  r.parsimony_gap = r.tv.value - sel;
  r.additivity_residual = std::fabs(r.tv.value - sel - om);
  if (granular) r.granular = granular_tests(est, alpha, Correction::BenjaminiHochberg, r.warnings);
  return r;
}

}  // namespace

DecompositionReport run_alg1(Estimator& est, double alpha, bool granular) {
  if (est.fits().scale != Scale::Mean) throw Error("the mean-scale decomposition needs nuisances fitted on the mean scale");
  return decompose(est, alpha, granular);
}

DecompositionReport run_alg2(Estimator& est, double alpha, bool granular) {
  if (est.fits().scale == Scale::Mean) throw Error("the log-scale decomposition needs nuisances fitted on a log scale");
  if (!est.data().y_binary()) throw DataError("log-scale decomposition needs a binary outcome");
  auto r = decompose(est, alpha, granular);
  if (est.fits().scale == Scale::LogRisk) {
    try {
      r.drr_irr = est.ratio("DRR-IRR", drr_irr_terms());
    } catch (const EstimationError& e) {
      r.warnings.push_back(std::string("DRR-IRR diagnostic unavailable: ") + e.what());
    }
  }
  return r;
}

DecompositionReport run_decomposition(Estimator& est, double alpha, bool granular) {
  return est.fits().scale == Scale::Mean ? run_alg1(est, alpha, granular) : run_alg2(est, alpha, granular);
}

EffectSpec marginal_z_de_ie(Scale scale) {
  EffectSpec s;
  s.key = "z-DE-IE";
  s.name = display_name("x-DE-IE", scale);
  s.name = "z-" + s.name.substr(2);
  s.scale = scale;
  auto q = [&](int xy, int xw) { return PoQuery{xy, xw, kAnyX, scale}; };
  s.terms = {{+1, q(1, 0)}, {-1, q(0, 0)}, {-1, q(1, 1)}, {+1, q(0, 1)}};
  return s;
}

ZSpecificResult z_specific_de_ie(const Dataset& data, const std::string& z_column, double z_value, double alpha,
                                 const ZSpecificOptions& opt) {
  auto it = std::find(data.z_names.begin(), data.z_names.end(), z_column);
  if (it == data.z_names.end()) throw Error("'" + z_column + "' is not a Z column of the dataset");
  if (!data.z_discrete())
    throw DataError("z-specific tests need discrete Z columns; continuous Z is not supported");
  std::size_t j = static_cast<std::size_t>(it - data.z_names.begin());
  std::vector<std::size_t> rows;
  std::size_t arm[2] = {0, 0};
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.z[j][i] == z_value) {
      rows.push_back(i);
      ++arm[data.x[i] == 1.0 ? 1 : 0];
    }
  if (arm[0] < opt.min_stratum || arm[1] < opt.min_stratum)
    throw DataError("stratum " + z_column + " = " + std::to_string(z_value) + " has " + std::to_string(arm[0]) +
                    " rows with X=0 and " + std::to_string(arm[1]) + " with X=1; min_stratum is " +
                    std::to_string(opt.min_stratum) + " per arm");
  Dataset sub = data.subset(rows);
  auto plan = FoldPlan::stratified(sub, opt.folds, opt.seed);
  auto fits = fit_nuisances(sub, plan, opt.learner, opt.scale);
  Estimator est(fits, sub, opt.kind);
  ZSpecificResult r;
  r.estimate = est.effect(marginal_z_de_ie(opt.scale));
  r.stratum_rows = rows.size();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", z_value);
  r.estimate.name += "(" + z_column + "=" + buf + ")";
  r.test = interaction_test(r.estimate, alpha);
  return r;
}

}  // namespace variata
