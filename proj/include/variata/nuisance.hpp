#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "variata/dataset.hpp"
#include "variata/effects.hpp"
#include "variata/learners.hpp"

namespace variata {

struct FoldPlan {
  int K = 10;
  std::uint64_t seed = 0;
  std::vector<int> fold;  // row -> fold index in [0, K)

  // Shuffles each treatment arm and deals rows round-robin, so every fold
  // holds both arms whenever each arm has at least K rows.
  static FoldPlan stratified(const Dataset& d, int K, std::uint64_t seed);
  std::vector<std::size_t> rows_in(int k) const;
  std::vector<std::size_t> rows_not_in(int k) const;
};

// Out-of-fold nuisance predictions, one entry per row.
struct NuisanceFits {
  Scale scale = Scale::Mean;
  FoldPlan plan;
  LearnerConfig learner;  // kind resolved to Table or Stumps
  std::vector<double> mu[2];     // mu[x][i] = E^[Y | x, z_i, w_i], unclipped
  std::vector<double> e1;        // P^(X=1 | z_i), clipped to [clip_e, 1 - clip_e]
  std::vector<double> g1;        // P^(X=1 | z_i, w_i), clipped likewise
  std::vector<double> nu[2][2];  // nu[x_y][x_w][i] = E^[h(mu(x_y, Z, W)) | X = x_w, z_i] on `scale`
  std::vector<double> nu_mean[2][2];  // same nested mean on the mean scale
  std::vector<std::string> warnings;

  std::size_t n() const { return e1.size(); }
  double e(int x, std::size_t i) const { return x == 1 ? e1[i] : 1.0 - e1[i]; }
  double g(int x, std::size_t i) const { return x == 1 ? g1[i] : 1.0 - g1[i]; }
  // mu on `s`'s working range: clipped to [clip_mu, 1] (log-risk) or
  // [clip_mu, 1 - clip_mu] (log-odds); untouched on the mean scale.
  double mu_on(Scale s, int x, std::size_t i) const;
};

// h(p) for a scale: identity, log, logit.
double scale_link(Scale s, double p);

// Cross-fits mu, e, g and the nested means nu. nu(x_y, x_w) is fitted by
// regressing the training-fold predictions h(mu^(x_y, z, w)) on Z among
// training rows with X = x_w.
NuisanceFits fit_nuisances(const Dataset& data, const FoldPlan& plan, const LearnerConfig& learner, Scale scale);

// Resolves LearnerConfig::Kind::Auto against the covariates of `data`.
LearnerConfig::Kind resolve_learner(const Dataset& data, LearnerConfig::Kind kind);

}  // namespace variata
