#include "variata/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "variata/error.hpp"
#include "variata/parallel.hpp"
#include "variata/random.hpp"

namespace variata {

FoldPlan FoldPlan::stratified(const Dataset& d, int K, std::uint64_t seed) {
  if (K < 2) throw Error("fold count must be at least 2 (got " + std::to_string(K) + ")");
  if (d.n() < static_cast<std::size_t>(K))
    throw DataError("cannot split " + std::to_string(d.n()) + " rows into " + std::to_string(K) + " folds");
  FoldPlan p;
  p.K = K;
  p.seed = seed;
  p.fold.assign(d.n(), 0);
  std::vector<std::size_t> arm[2];
  for (std::size_t i = 0; i < d.n(); ++i) arm[d.x[i] == 1.0 ? 1 : 0].push_back(i);
  auto rng = stream_rng(seed, 0xf01d);
  std::size_t pos = 0;
  for (auto& a : arm) {
    std::shuffle(a.begin(), a.end(), rng);
    for (std::size_t i : a) p.fold[i] = static_cast<int>(pos++ % static_cast<std::size_t>(K));
  }
  return p;
}

std::vector<std::size_t> FoldPlan::rows_in(int k) const {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if (fold[i] == k) r.push_back(i);
  return r;
}

std::vector<std::size_t> FoldPlan::rows_not_in(int k) const {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if (fold[i] != k) r.push_back(i);
  return r;
}

double scale_link(Scale s, double p) {
  switch (s) {
    case Scale::Mean:
      return p;
    case Scale::LogRisk:
      return std::log(p);
    case Scale::LogOdds:
      return std::log(p / (1.0 - p));
  }
  return p;
}

double NuisanceFits::mu_on(Scale s, int x, std::size_t i) const {
  double m = mu[x][i];
  switch (s) {
    case Scale::Mean:
      return m;
    case Scale::LogRisk:
      return std::clamp(m, learner.clip_mu, 1.0);
    case Scale::LogOdds:
      return std::clamp(m, learner.clip_mu, 1.0 - learner.clip_mu);
  }
  return m;
}

LearnerConfig::Kind resolve_learner(const Dataset& data, LearnerConfig::Kind kind) {
  if (kind != LearnerConfig::Kind::Auto) return kind;
  return data.z_discrete() && data.w_discrete() ? LearnerConfig::Kind::Table : LearnerConfig::Kind::Stumps;
}

namespace {

double clip_mu(Scale s, double m, double d) {
  if (s == Scale::LogRisk) return std::clamp(m, d, 1.0);
  if (s == Scale::LogOdds) return std::clamp(m, d, 1.0 - d);
  return m;
}

enum ModelId : std::uint64_t { kMu0 = 1, kMu1, kE, kG, kNu };

}  // namespace

NuisanceFits fit_nuisances(const Dataset& data, const FoldPlan& plan, const LearnerConfig& learner, Scale scale) {
  data.validate();
  const std::size_t n = data.n();
  if (plan.fold.size() != n) throw Error("fold plan does not match the dataset (" + std::to_string(plan.fold.size()) +
                                         " assignments for " + std::to_string(n) + " rows)");
  if (scale != Scale::Mean && !data.y_binary())
    throw DataError("scale " + scale_name(scale) + " needs a binary outcome; column '" + data.y_name +
                    "' has values other than 0 and 1");
  if (!(learner.clip_e > 0 && learner.clip_e < 0.5)) throw Error("clip-e must lie in (0, 0.5)");
  if (!(learner.clip_mu > 0 && learner.clip_mu < 0.5)) throw Error("clip-mu must lie in (0, 0.5)");

  NuisanceFits f;
  f.scale = scale;
  f.plan = plan;
  f.learner = learner;
  f.learner.kind = resolve_learner(data, learner.kind);
  const auto kind = f.learner.kind;
  for (int x = 0; x < 2; ++x) f.mu[x].assign(n, 0.0);
  f.e1.assign(n, 0.0);
  f.g1.assign(n, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      f.nu[a][b].assign(n, 0.0);
      f.nu_mean[a][b].assign(n, 0.0);
    }

  Columns zc, zwc;
  for (const auto& c : data.z) zc.push_back(&c);
  zwc = zc;
  for (const auto& c : data.w) zwc.push_back(&c);

  for (int k = 0; k < plan.K; ++k) {
    int arms = 0;
    bool seen[2] = {false, false};
    for (std::size_t i = 0; i < n; ++i)
      if (plan.fold[i] != k) seen[data.x[i] == 1.0 ? 1 : 0] = true;
    arms = seen[0] + seen[1];
    if (arms < 2)
      throw EstimationError("fold " + std::to_string(k) +
                            " training split has a single treatment class; use stratified folds or fewer folds");
  }

  const double eps = f.learner.clip_e, delta = f.learner.clip_mu;
  parallel_for(static_cast<std::size_t>(plan.K), [&](std::size_t kk) {
    int k = static_cast<int>(kk);
    auto train = plan.rows_not_in(k);
    auto test = plan.rows_in(k);
    auto seed = [&](std::uint64_t id, std::uint64_t extra = 0) { return derive_seed(plan.seed, kk, id, extra); };

    // Outcome regressions, one per arm.
    std::vector<std::size_t> arm_rows[2];
    std::vector<double> arm_y[2];
    for (std::size_t i : train) {
      int x = data.x[i] == 1.0 ? 1 : 0;
      arm_rows[x].push_back(i);
      arm_y[x].push_back(data.y[i]);
    }
    std::unique_ptr<Model> mu[2];
    for (int x = 0; x < 2; ++x)
      mu[x] = fit_model(kind, f.learner, Loss::Squared, zwc, arm_rows[x], arm_y[x], seed(x == 0 ? kMu0 : kMu1));

    std::vector<double> xt;
    xt.reserve(train.size());
    for (std::size_t i : train) xt.push_back(data.x[i]);
    auto e = fit_model(kind, f.learner, Loss::Logistic, zc, train, xt, seed(kE));
    auto g = fit_model(kind, f.learner, Loss::Logistic, zwc, train, xt, seed(kG));

    for (std::size_t i : test) {
      for (int x = 0; x < 2; ++x) f.mu[x][i] = mu[x]->predict(zwc, i);
      f.e1[i] = std::clamp(e->predict(zc, i), eps, 1.0 - eps);
      f.g1[i] = std::clamp(g->predict(zwc, i), eps, 1.0 - eps);
    }

    // Nested means from the training-fold outcome predictions.
    for (int xw = 0; xw < 2; ++xw) {
      const auto& rows = arm_rows[xw];
      for (int xy = 0; xy < 2; ++xy) {
        std::vector<double> tm(rows.size()), th(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
          tm[r] = mu[xy]->predict(zwc, rows[r]);
          th[r] = scale_link(scale, clip_mu(scale, tm[r], delta));
        }
        auto nm = fit_model(kind, f.learner, Loss::Squared, zc, rows, tm, seed(kNu, 2 * xy + xw));
        std::unique_ptr<Model> nh;
        if (scale != Scale::Mean) nh = fit_model(kind, f.learner, Loss::Squared, zc, rows, th, seed(kNu, 4 + 2 * xy + xw));
        for (std::size_t i : test) {
          f.nu_mean[xy][xw][i] = nm->predict(zc, i);
          f.nu[xy][xw][i] = nh ? nh->predict(zc, i) : f.nu_mean[xy][xw][i];
        }
      }
    }
  });

  auto at_bound = [&](const std::vector<double>& p) {
    return std::all_of(p.begin(), p.end(), [&](double v) { return v <= eps || v >= 1.0 - eps; });
  };
  if (n > 0 && at_bound(f.e1))
    f.warnings.push_back("every clipped propensity P(X=1|z) sits at a clipping bound; overlap is degenerate");
  if (n > 0 && at_bound(f.g1))
    f.warnings.push_back("every clipped propensity P(X=1|z,w) sits at a clipping bound; overlap is degenerate");
  if (scale != Scale::Mean) {
    std::size_t clipped = 0;
    for (int x = 0; x < 2; ++x)
      for (double m : f.mu[x])
        if (clip_mu(scale, m, delta) != m) ++clipped;
    if (clipped > 0)
      f.warnings.push_back(std::to_string(clipped) + " outcome predictions clipped to the " + scale_name(scale) +
                           " working range");
  }
  return f;
}

}  // namespace variata
