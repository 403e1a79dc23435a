#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace variata {

struct LearnerConfig {
  enum class Kind { Auto, Table, Stumps };
  Kind kind = Kind::Auto;  // Auto: Table when every covariate is discrete
  int rounds = 200;
  double learning_rate = 0.1;
  double ridge = 1.0;
  double valid_fraction = 0.2;
  int patience = 20;
  int bins = 32;
  int min_leaf = 10;
  bool linear_base = true;  // boost from a ridge linear/logistic fit instead of a constant
  double clip_e = 0.01;    // propensities in [clip_e, 1 - clip_e]
  double clip_mu = 0.005;  // outcome means on log scales in [clip_mu, 1] / [clip_mu, 1 - clip_mu]
};

std::string learner_name(LearnerConfig::Kind k);  // "auto", "table", "stumps"
LearnerConfig::Kind parse_learner(const std::string& s);

enum class Loss { Squared, Logistic };

// Column-major covariates. A model sees the columns listed in `cols`.
using Columns = std::vector<const std::vector<double>*>;

class Model {
 public:
  virtual ~Model() = default;
  // Mean-scale prediction (a probability for logistic loss).
  virtual double predict(const Columns& cols, std::size_t row) const = 0;
};

// Fits on `rows` of `cols` with targets y[k] for rows[k].
std::unique_ptr<Model> fit_model(LearnerConfig::Kind kind, const LearnerConfig& cfg, Loss loss, const Columns& cols,
                                 const std::vector<std::size_t>& rows, const std::vector<double>& y,
                                 std::uint64_t seed);

// Frequency table over the joint levels of all columns; unseen cells back off
// by dropping trailing columns, down to the overall mean.
std::unique_ptr<Model> fit_table(const Columns& cols, const std::vector<std::size_t>& rows,
                                 const std::vector<double>& y);

// Gradient-boosted depth-2 trees on histogram bins, squared or logistic loss,
// early stopping on a held-out slice. Boosting starts from a ridge linear
// (squared) or logistic fit on standardized columns when linear_base is set.
std::unique_ptr<Model> fit_stumps(const LearnerConfig& cfg, Loss loss, const Columns& cols,
                                  const std::vector<std::size_t>& rows, const std::vector<double>& y,
                                  std::uint64_t seed);

}  // namespace variata
