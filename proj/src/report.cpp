#include "variata/report.hpp"

namespace variata {

using nlohmann::json;

json estimate_json(const EffectEstimate& e) {
  return {{"key", e.key},
          {"name", e.name},
          {"scale", scale_name(e.scale)},
          {"estimator", estimator_name(e.kind)},
          {"value", e.value},
          {"se", e.se},
          {"ci95", {e.ci_lo, e.ci_hi}},
          {"n", e.n}};
}

json test_json(const TestResult& t) {
  json j = {{"name", t.name},   {"estimate", t.estimate}, {"se", t.se},         {"statistic", t.statistic},
            {"p", t.p},         {"p_adjusted", nullptr},  {"rejected", t.rejected}, {"alpha", t.alpha}};
  if (t.p_adjusted) j["p_adjusted"] = *t.p_adjusted;
  return j;
}

json config_json(const RunConfig& c) {
  json j = {{"subcommand", c.subcommand},
            {"alpha", c.alpha},
            {"folds", c.folds},
            {"clip_e", c.learner.clip_e},
            {"clip_mu", c.learner.clip_mu},
            {"learner", learner_name(c.learner.kind)},
            {"seed", c.seed},
            {"estimator", estimator_name(c.estimator)},
            {"scale", scale_name(c.scale)}};
  if (!c.data.empty()) j["data"] = c.data;
  if (!c.roles.empty()) j["roles"] = c.roles;
  if (!c.scm.empty()) j["scm"] = c.scm;
  return j;
}

json decomposition_json(const DecompositionReport& r, const RunConfig& c, std::size_t n) {
  json est = json::array();
  for (const auto& e : r.estimates) est.push_back(estimate_json(e));
  json gran = json::array();
  for (const auto& t : r.granular) gran.push_back(test_json(t));
  RunConfig echo = c;
  echo.scale = r.scale;
  echo.estimator = r.kind;
  json j = {{"schema_version", kSchemaVersion},
            {"kind", "decomposition"},
            {"scale", scale_name(r.scale)},
            {"estimator", estimator_name(r.kind)},
            {"n", n},
            {"tv", estimate_json(r.tv)},
            {"estimates", est},
            {"tests", {{"te_se", test_json(r.te_se)}, {"de_ie", test_json(r.de_ie)}}},
            {"form", form_id(r.form)},
            {"selected", r.selected},
            {"omitted", r.omitted},
            {"additivity_residual", r.additivity_residual},
            {"parsimony_gap", r.parsimony_gap},
            {"granular", gran},
            {"drr_irr", nullptr},
            {"warnings", r.warnings},
            {"config", config_json(echo)}};
  if (r.drr_irr) j["drr_irr"] = estimate_json(*r.drr_irr);
  return j;
}

json verdicts_json(const std::string& scm, Scale scale, const std::vector<StructuralVerdict>& v) {
  json arr = json::array();
  for (const auto& x : v)
    arr.push_back({{"criterion", x.name},
                   {"verdict", x.interaction ? "interaction" : "no-interaction"},
                   {"witness", x.witness}});
  return {{"schema_version", kSchemaVersion}, {"kind", "structural"}, {"scm", scm},
          {"scale", scale_name(scale)},       {"verdicts", arr}};
}

json test_report_json(const TestResult& t, const EffectEstimate& e, const RunConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "test"},
          {"test", test_json(t)},
          {"estimate", estimate_json(e)},
          {"config", config_json(c)}};
}

json summary_json(const ExperimentSummary& s, const RunConfig& c) {
  json cells = json::array();
  for (const auto& x : s.cells)
    cells.push_back({{"scm", x.scm},
                     {"n", x.n},
                     {"interaction", x.interaction},
                     {"null_true", x.null_true},
                     {"label", x.label},
                     {"count", x.count},
                     {"errors", x.errors},
                     {"rejection_rate", x.rejection_rate},
                     {"ks_d", x.ks_d},
                     {"ks_p", x.ks_p}});
  return {{"schema_version", kSchemaVersion},
          {"kind", "experiment_summary"},
          {"alpha", s.alpha},
          {"pooled_null_rate", s.pooled_null_rate},
          {"pooled_null_count", s.pooled_null_count},
          {"cells", cells},
          {"config", config_json(c)}};
}

json error_json(const std::string& type, const std::string& message) {
  return {{"schema_version", kSchemaVersion}, {"kind", "error"}, {"error", {{"type", type}, {"message", message}}}};
}

}  // namespace variata
