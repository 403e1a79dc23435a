#include "variata/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "variata/counterfactual.hpp"
#include "variata/error.hpp"
#include "variata/inference.hpp"
#include "variata/ks.hpp"
#include "variata/parallel.hpp"
#include "variata/random.hpp"
#include "variata/structural.hpp"

namespace variata {

void ExperimentGrid::validate() const {
  if (scms.empty()) throw Error("experiment grid has no SCMs");
  if (sizes.empty()) throw Error("experiment grid has no sample sizes");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw Error("experiment sample sizes must be sorted ascending");
  if (reps < 1) throw Error("experiment repetitions must be at least 1");
  if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
  if (folds < 2) throw Error("fold count must be at least 2");
  if (sizes.front() < static_cast<std::size_t>(4 * folds))
    throw Error("sample size " + std::to_string(sizes.front()) + " is too small for " + std::to_string(folds) +
                " folds");
}

ExperimentGrid desk_grid() { return ExperimentGrid{}; }

ExperimentGrid full_grid() {
  ExperimentGrid g;
  g.reps = 100;
  g.sizes = {500, 750, 1500, 3000, 5000, 8000};
  return g;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string PValueTable::to_csv() const {
  std::ostringstream os;
  os << "scm,n,rep,interaction,p,estimate,se,null_true,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    os << r.scm << ',' << r.n << ',' << r.rep << ',' << r.interaction << ',' << num(r.p) << ',' << num(r.estimate)
       << ',' << num(r.se) << ',' << (r.null_true ? 1 : 0) << ',';
    if (!err.empty()) os << '"' << err << '"';
    os << '\n';
  }
  return os.str();
}

PValueTable run_grid(const ExperimentGrid& grid) {
  grid.validate();
  struct Job {
    std::size_t scm, size;
    int rep;
  };
  std::vector<ScmSpec> specs;
  std::vector<std::map<std::string, bool>> nulls;
  for (const auto& name : grid.scms) {
    specs.push_back(load_scm(name));
    std::map<std::string, bool> flags;
    for (const auto& v : check_all(MechanismShape::from_spec(specs.back())))
      flags[criterion_effect_key(v.criterion)] = !v.interaction;
    nulls.push_back(flags);
  }
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < specs.size(); ++s)
    for (std::size_t k = 0; k < grid.sizes.size(); ++k)
      for (int r = 0; r < grid.reps; ++r) jobs.push_back({s, k, r});

  const auto& keys = interaction_keys();
  std::vector<std::vector<PValueRow>> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    std::size_t n = grid.sizes[job.size];
    std::uint64_t seed = derive_seed(grid.seed, job.scm, n, static_cast<std::uint64_t>(job.rep));
    std::vector<PValueRow> rows;
    for (const auto& key : keys) {
      PValueRow r;
      r.scm = grid.scms[job.scm];
      r.n = n;
      r.rep = job.rep;
      r.interaction = key;
      r.null_true = nulls[job.scm].at(key);
      r.p = r.estimate = r.se = std::nan("");
      rows.push_back(r);
    }
    try {
      auto data = sample_observational(specs[job.scm], n, seed);
      auto plan = FoldPlan::stratified(data, grid.folds, splitmix64(seed));
      auto fits = fit_nuisances(data, plan, grid.learner, Scale::Mean);
      Estimator est(fits, data, grid.kind);
      auto tests = granular_tests(est, grid.alpha, Correction::None);
      for (std::size_t k = 0; k < keys.size(); ++k) {
        rows[k].p = tests[k].p;
        rows[k].estimate = tests[k].estimate;
        rows[k].se = tests[k].se;
      }
    } catch (const std::exception& e) {
      for (auto& r : rows) r.error = e.what();
    }
    out[j] = std::move(rows);
  });
  PValueTable t;
  for (auto& rows : out)
    for (auto& r : rows) t.rows.push_back(std::move(r));
  return t;
}

const std::vector<double>& ecdf_grid() {
  static const std::vector<double> g = [] {
    std::vector<double> v;
    for (int i = 0; i <= 100; ++i) v.push_back(i / 100.0);
    return v;
  }();
  return g;
}

const CellSummary& ExperimentSummary::cell(const std::string& scm, std::size_t n,
                                           const std::string& interaction) const {
  for (const auto& c : cells)
    if (c.scm == scm && c.n == n && c.interaction == interaction) return c;
  throw Error("no summary cell for " + scm + ", n=" + std::to_string(n) + ", " + interaction);
}

std::string ExperimentSummary::ecdf_csv() const {
  std::ostringstream os;
  os << "scm,n,interaction,label,p,ecdf\n";
  const auto& g = ecdf_grid();
  for (const auto& c : cells)
    for (std::size_t i = 0; i < g.size() && i < c.ecdf.size(); ++i)
      os << c.scm << ',' << c.n << ',' << c.interaction << ',' << c.label << ',' << num(g[i]) << ','
         << num(c.ecdf[i]) << '\n';
  return os.str();
}

ExperimentSummary summarize(const PValueTable& table, double alpha) {
  if (table.rows.empty()) throw Error("cannot summarize an empty p-value table");
  ExperimentSummary s;
  s.alpha = alpha;
  // Cells in first-appearance order.
  std::vector<std::tuple<std::string, std::size_t, std::string>> order;
  std::map<std::tuple<std::string, std::size_t, std::string>, std::vector<const PValueRow*>> groups;
  for (const auto& r : table.rows) {
    auto key = std::make_tuple(r.scm, r.n, r.interaction);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  int null_rej = 0;
  for (const auto& key : order) {
    const auto& rows = groups[key];
    CellSummary c;
    std::tie(c.scm, c.n, c.interaction) = key;
    c.null_true = rows.front()->null_true;
    c.label = c.null_true ? "type-I" : "power";
    std::vector<double> p;
    for (const auto* r : rows) {
      if (!r->error.empty() || std::isnan(r->p)) {
        ++c.errors;
        continue;
      }
      p.push_back(r->p);
    }
    c.count = static_cast<int>(p.size());
    if (!p.empty()) {
      int rej = 0;
      for (double v : p) rej += v < alpha;
      c.rejection_rate = static_cast<double>(rej) / c.count;
      auto ks = ks_uniform(p);
      c.ks_d = ks.d;
      c.ks_p = ks.p;
      std::vector<double> sorted = p;
      std::sort(sorted.begin(), sorted.end());
      for (double g : ecdf_grid())
        c.ecdf.push_back(static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), g) - sorted.begin()) /
                         c.count);
      if (c.null_true) {
        null_rej += rej;
        s.pooled_null_count += c.count;
      }
    }
    s.cells.push_back(std::move(c));
  }
  if (s.pooled_null_count > 0) s.pooled_null_rate = static_cast<double>(null_rej) / s.pooled_null_count;
  return s;
}

}  // namespace variata
