#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "variata/config.hpp"
#include "variata/experiments.hpp"
#include "variata/inference.hpp"
#include "variata/structural.hpp"

namespace variata {

constexpr int kSchemaVersion = 1;

nlohmann::json estimate_json(const EffectEstimate& e);
nlohmann::json test_json(const TestResult& t);
nlohmann::json config_json(const RunConfig& c);
nlohmann::json decomposition_json(const DecompositionReport& r, const RunConfig& c, std::size_t n);
nlohmann::json verdicts_json(const std::string& scm, Scale scale, const std::vector<StructuralVerdict>& v);
nlohmann::json test_report_json(const TestResult& t, const EffectEstimate& e, const RunConfig& c);
nlohmann::json summary_json(const ExperimentSummary& s, const RunConfig& c);
nlohmann::json error_json(const std::string& type, const std::string& message);

}  // namespace variata
