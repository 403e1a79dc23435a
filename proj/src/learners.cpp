#include "variata/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include <Eigen/Dense>

#include "variata/error.hpp"
#include "variata/random.hpp"

namespace variata {

std::string learner_name(LearnerConfig::Kind k) {
  switch (k) {
    case LearnerConfig::Kind::Auto:
      return "auto";
    case LearnerConfig::Kind::Table:
      return "table";
    case LearnerConfig::Kind::Stumps:
      return "stumps";
  }
  return "?";
}

LearnerConfig::Kind parse_learner(const std::string& s) {
  if (s == "auto") return LearnerConfig::Kind::Auto;
  if (s == "table") return LearnerConfig::Kind::Table;
  if (s == "stumps") return LearnerConfig::Kind::Stumps;
  throw Error("unknown learner '" + s + "' (expected table or stumps)");
}

namespace {

constexpr std::size_t kMaxLevels = 1000;

class TableModel : public Model {
 public:
  TableModel(const Columns& cols, const std::vector<std::size_t>& rows, const std::vector<double>& y) {
    std::size_t F = cols.size();
    levels_.resize(F);
    for (std::size_t f = 0; f < F; ++f) {
      std::map<double, int> lv;
      for (std::size_t r : rows) {
        lv.emplace((*cols[f])[r], 0);
        if (lv.size() > kMaxLevels)
          throw EstimationError("frequency-table learner needs discrete covariates (a column has more than " +
                                std::to_string(kMaxLevels) + " distinct values); use the stumps learner");
      }
      int k = 0;
      for (auto& [v, idx] : lv) idx = k++;
      levels_[f] = std::move(lv);
    }
    cells_.resize(F + 1);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::uint64_t key = 0;
      add(cells_[0], 0, y[k]);
      for (std::size_t f = 0; f < F; ++f) {
        key = key * (levels_[f].size() + 1) + static_cast<std::uint64_t>(levels_[f].at((*cols[f])[rows[k]])) + 1;
        add(cells_[f + 1], key, y[k]);
      }
    }
  }

  double predict(const Columns& cols, std::size_t row) const override {
    std::size_t F = levels_.size();
    std::vector<std::uint64_t> keys(F + 1, 0);
    std::size_t usable = F;
    std::uint64_t key = 0;
    for (std::size_t f = 0; f < F; ++f) {
      auto it = levels_[f].find((*cols[f])[row]);
      if (it == levels_[f].end()) {
        usable = f;
        break;
      }
      key = key * (levels_[f].size() + 1) + static_cast<std::uint64_t>(it->second) + 1;
      keys[f + 1] = key;
    }
    for (std::size_t k = usable + 1; k-- > 0;) {
      auto it = cells_[k].find(keys[k]);
      if (it != cells_[k].end() && it->second.second > 0) return it->second.first / it->second.second;
    }
    return 0.0;
  }

 private:
  using Cell = std::pair<double, double>;  // sum, count
  static void add(std::unordered_map<std::uint64_t, Cell>& m, std::uint64_t key, double y) {
    auto& c = m[key];
    c.first += y;
    c.second += 1.0;
  }
  std::vector<std::map<double, int>> levels_;
  std::vector<std::unordered_map<std::uint64_t, Cell>> cells_;  // by prefix length
};

double expit(double a) {
  if (a >= 0) return 1.0 / (1.0 + std::exp(-a));
  double e = std::exp(a);
  return e / (1.0 + e);
}

// Depth-2 tree: root split, one split per child, four leaves.
struct Tree {
  int f0 = -1;
  double t0 = 0;
  int f[2] = {-1, -1};
  double t[2] = {0, 0};
  double leaf[2][2] = {{0, 0}, {0, 0}};

  double eval(const Columns& cols, std::size_t row) const {
    int a = (f0 < 0 || (*cols[f0])[row] <= t0) ? 0 : 1;
    int b = (f[a] < 0 || (*cols[f[a]])[row] <= t[a]) ? 0 : 1;
    return leaf[a][b];
  }
};

// Ridge-penalized linear predictor on standardized columns: least squares for
// squared loss, IRLS for logistic loss. The trees boost from it.
struct LinearBase {
  std::vector<double> center, scale, beta;
  double intercept = 0.0;

  double eval(const Columns& cols, std::size_t row) const {
    double s = intercept;
    for (std::size_t j = 0; j < beta.size(); ++j)
      if (beta[j] != 0.0) s += beta[j] * ((*cols[j])[row] - center[j]) / scale[j];
    return s;
  }

  static LinearBase constant(Loss loss, const std::vector<double>& y) {
    LinearBase b;
    double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(std::max<std::size_t>(y.size(), 1));
    if (loss == Loss::Logistic) {
      double p = std::clamp(mean, 1e-6, 1 - 1e-6);
      mean = std::log(p / (1 - p));
    }
    b.intercept = mean;
    return b;
  }

  static LinearBase fit(Loss loss, const Columns& cols, const std::vector<std::size_t>& rows,
                        const std::vector<double>& y, double ridge) {
    LinearBase b = constant(loss, y);
    std::size_t F = cols.size(), n = rows.size();
    b.center.assign(F, 0.0);
    b.scale.assign(F, 1.0);
    b.beta.assign(F, 0.0);
    if (F == 0 || n < F + 2) return b;
    Eigen::MatrixXd X(n, F + 1);
    Eigen::VectorXd Y(n);
    for (std::size_t j = 0; j < F; ++j) {
      double m = 0, v = 0;
      for (std::size_t r : rows) m += (*cols[j])[r];
      m /= static_cast<double>(n);
      for (std::size_t r : rows) v += ((*cols[j])[r] - m) * ((*cols[j])[r] - m);
      double sd = std::sqrt(v / static_cast<double>(n));
      b.center[j] = m;
      b.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    for (std::size_t k = 0; k < n; ++k) {
      X(k, 0) = 1.0;
      for (std::size_t j = 0; j < F; ++j) X(k, j + 1) = ((*cols[j])[rows[k]] - b.center[j]) / b.scale[j];
      Y(k) = y[k];
    }
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(F + 1, F + 1) * ridge;
    P(0, 0) = 0.0;
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(F + 1);
    if (loss == Loss::Squared) {
      coef = (X.transpose() * X + P).ldlt().solve(X.transpose() * Y);
    } else {
      coef(0) = b.intercept;
      for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd eta = X * coef;
        Eigen::VectorXd w(n), z(n);
        for (std::size_t k = 0; k < n; ++k) {
          double p = expit(eta(k));
          double wk = std::max(p * (1 - p), 1e-10);
          w(k) = wk;
          z(k) = eta(k) + (Y(k) - p) / wk;
        }
        Eigen::MatrixXd XtW = X.transpose() * w.asDiagonal();
        Eigen::VectorXd next = (XtW * X + P).ldlt().solve(XtW * z);
        bool done = (next - coef).cwiseAbs().maxCoeff() < 1e-9;
        coef = next;
        if (done) break;
      }
    }
    if (!coef.allFinite()) return constant(loss, y);
    b.intercept = coef(0);
    for (std::size_t j = 0; j < F; ++j) b.beta[j] = coef(static_cast<Eigen::Index>(j + 1));
    return b;
  }
};

class StumpsModel : public Model {
 public:
  StumpsModel(Loss loss, LinearBase base, double lr, std::vector<Tree> trees)
      : loss_(loss), base_(std::move(base)), lr_(lr), trees_(std::move(trees)) {}

  double raw(const Columns& cols, std::size_t row) const {
    double s = base_.eval(cols, row);
    for (const auto& t : trees_) s += lr_ * t.eval(cols, row);
    return s;
  }
  double predict(const Columns& cols, std::size_t row) const override {
    double r = raw(cols, row);
    return loss_ == Loss::Logistic ? expit(r) : r;
  }

 private:
  Loss loss_;
  LinearBase base_;
  double lr_;
  std::vector<Tree> trees_;
};

struct Split {
  double gain = 0.0;
  int feature = -1;
  int bin = -1;  // rows with bin <= this go left
};

class Booster {
 public:
  Booster(const LearnerConfig& cfg, Loss loss, const Columns& cols, const std::vector<std::size_t>& rows,
          const std::vector<double>& y, std::uint64_t seed)
      : cfg_(cfg), loss_(loss), cols_(cols) {
    std::size_t n = rows.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::size_t nvalid = 0;
    if (cfg.valid_fraction > 0 && n >= 50) {
      auto rng = stream_rng(seed, 0x5eed);
      std::shuffle(idx.begin(), idx.end(), rng);
      nvalid = static_cast<std::size_t>(std::floor(cfg.valid_fraction * static_cast<double>(n)));
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (k < nvalid) {
        vrows_.push_back(rows[idx[k]]);
        vy_.push_back(y[idx[k]]);
      } else {
        trows_.push_back(rows[idx[k]]);
        ty_.push_back(y[idx[k]]);
      }
    }
    // Restore training order for cache-friendly access.
    std::vector<std::size_t> order(trows_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return trows_[a] < trows_[b]; });
    std::vector<std::size_t> tr(trows_.size());
    std::vector<double> ty(trows_.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      tr[k] = trows_[order[k]];
      ty[k] = ty_[order[k]];
    }
    trows_.swap(tr);
    ty_.swap(ty);
    build_bins();
  }

  std::unique_ptr<Model> run() {
    std::size_t n = trows_.size();
    LinearBase base = cfg_.linear_base ? LinearBase::fit(loss_, cols_, trows_, ty_, cfg_.ridge)
                                       : LinearBase::constant(loss_, ty_);
    std::vector<double> f(n), vf(vrows_.size());
    for (std::size_t k = 0; k < n; ++k) f[k] = base.eval(cols_, trows_[k]);
    for (std::size_t k = 0; k < vrows_.size(); ++k) vf[k] = base.eval(cols_, vrows_[k]);
    std::vector<double> g(n), h(n);
    std::vector<Tree> trees;
    double best = valid_loss(vf);
    std::size_t best_len = 0;
    int since = 0;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int round = 0; round < cfg_.rounds; ++round) {
      for (std::size_t k = 0; k < n; ++k) {
        if (loss_ == Loss::Squared) {
          g[k] = f[k] - ty_[k];
          h[k] = 1.0;
        } else {
          double p = expit(f[k]);
          g[k] = p - ty_[k];
          h[k] = std::max(p * (1 - p), 1e-12);
        }
      }
      Tree t = grow(all, g, h);
      if (t.f0 < 0 && t.leaf[0][0] == 0.0) break;
      for (std::size_t k = 0; k < n; ++k) f[k] += cfg_.learning_rate * eval_binned(t, k);
      for (std::size_t k = 0; k < vrows_.size(); ++k) vf[k] += cfg_.learning_rate * t.eval(cols_, vrows_[k]);
      trees.push_back(t);
      if (!vrows_.empty()) {
        double vl = valid_loss(vf);
        if (vl < best - 1e-12) {
          best = vl;
          best_len = trees.size();
          since = 0;
        } else if (++since >= cfg_.patience) {
          break;
        }
      } else {
        best_len = trees.size();
      }
    }
    trees.resize(best_len);
    return std::make_unique<StumpsModel>(loss_, std::move(base), cfg_.learning_rate, std::move(trees));
  }

 private:
  void build_bins() {
    std::size_t F = cols_.size(), n = trows_.size();
    thresholds_.resize(F);
    bins_.assign(F, std::vector<std::uint8_t>(n, 0));
    int maxb = std::clamp(cfg_.bins, 2, 255);
    for (std::size_t fi = 0; fi < F; ++fi) {
      std::vector<double> v(n);
      for (std::size_t k = 0; k < n; ++k) v[k] = (*cols_[fi])[trows_[k]];
      std::vector<double> s = v;
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      std::vector<double> thr;
      if (static_cast<int>(s.size()) <= maxb) {
        for (std::size_t k = 0; k + 1 < s.size(); ++k) thr.push_back(0.5 * (s[k] + s[k + 1]));
      } else {
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        for (int b = 1; b < maxb; ++b) {
          double q = sorted[static_cast<std::size_t>(static_cast<double>(b) / maxb * (n - 1))];
          if (thr.empty() || q > thr.back()) thr.push_back(q);
        }
        // A threshold equal to the maximum splits nothing off.
        while (!thr.empty() && thr.back() >= sorted.back()) thr.pop_back();
      }
      thresholds_[fi] = thr;
      for (std::size_t k = 0; k < n; ++k)
        bins_[fi][k] = static_cast<std::uint8_t>(std::lower_bound(thr.begin(), thr.end(), v[k]) - thr.begin());
    }
  }

  double valid_loss(const std::vector<double>& vf) const {
    if (vrows_.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < vf.size(); ++k) {
      if (loss_ == Loss::Squared) {
        double d = vf[k] - vy_[k];
        s += d * d;
      } else {
        double p = std::clamp(expit(vf[k]), 1e-12, 1 - 1e-12);
        s -= vy_[k] * std::log(p) + (1 - vy_[k]) * std::log(1 - p);
      }
    }
    return s / static_cast<double>(vf.size());
  }

  double leaf_value(double G, double H) const { return -G / (H + cfg_.ridge); }
  double score(double G, double H) const { return G * G / (H + cfg_.ridge); }

  Split best_split(const std::vector<std::size_t>& rows, const std::vector<double>& g, const std::vector<double>& h,
                   double G, double H) const {
    Split best;
    std::size_t F = cols_.size();
    double parent = score(G, H);
    for (std::size_t fi = 0; fi < F; ++fi) {
      std::size_t nb = thresholds_[fi].size() + 1;
      if (nb < 2) continue;
      std::vector<double> hg(nb, 0.0), hh(nb, 0.0);
      std::vector<int> hc(nb, 0);
      const auto& bf = bins_[fi];
      for (std::size_t k : rows) {
        auto b = bf[k];
        hg[b] += g[k];
        hh[b] += h[k];
        ++hc[b];
      }
      double gl = 0, hl = 0;
      int cl = 0;
      int total = static_cast<int>(rows.size());
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += hg[b];
        hl += hh[b];
        cl += hc[b];
        if (cl < cfg_.min_leaf) continue;
        if (total - cl < cfg_.min_leaf) break;
        double gain = score(gl, hl) + score(G - gl, H - hl) - parent;
        if (gain > best.gain + 1e-12) {
          best.gain = gain;
          best.feature = static_cast<int>(fi);
          best.bin = static_cast<int>(b);
        }
      }
    }
    return best;
  }

  Tree grow(const std::vector<std::size_t>& rows, const std::vector<double>& g, const std::vector<double>& h) {
    Tree t;
    double G = 0, H = 0;
    for (std::size_t k : rows) {
      G += g[k];
      H += h[k];
    }
    Split root = best_split(rows, g, h, G, H);
    if (root.feature < 0) {
      double v = leaf_value(G, H);
      t.leaf[0][0] = t.leaf[0][1] = t.leaf[1][0] = t.leaf[1][1] = v;
      return t;
    }
    t.f0 = root.feature;
    t.t0 = thresholds_[root.feature][root.bin];
    root_bin_ = root.bin;
    std::vector<std::size_t> side[2];
    for (std::size_t k : rows) side[bins_[root.feature][k] <= root.bin ? 0 : 1].push_back(k);
    for (int a = 0; a < 2; ++a) {
      double Ga = 0, Ha = 0;
      for (std::size_t k : side[a]) {
        Ga += g[k];
        Ha += h[k];
      }
      Split s = best_split(side[a], g, h, Ga, Ha);
      if (s.feature < 0) {
        t.leaf[a][0] = t.leaf[a][1] = leaf_value(Ga, Ha);
        child_bin_[a] = -1;
        continue;
      }
      t.f[a] = s.feature;
      t.t[a] = thresholds_[s.feature][s.bin];
      child_bin_[a] = s.bin;
      double Gl = 0, Hl = 0;
      for (std::size_t k : side[a])
        if (bins_[s.feature][k] <= s.bin) {
          Gl += g[k];
          Hl += h[k];
        }
      t.leaf[a][0] = leaf_value(Gl, Hl);
      t.leaf[a][1] = leaf_value(Ga - Gl, Ha - Hl);
    }
    return t;
  }

  // Same routing as Tree::eval, on the binned training rows.
  double eval_binned(const Tree& t, std::size_t k) const {
    if (t.f0 < 0) return t.leaf[0][0];
    int a = bins_[t.f0][k] <= root_bin_ ? 0 : 1;
    if (t.f[a] < 0) return t.leaf[a][0];
    int b = bins_[t.f[a]][k] <= child_bin_[a] ? 0 : 1;
    return t.leaf[a][b];
  }

  const LearnerConfig& cfg_;
  Loss loss_;
  const Columns& cols_;
  std::vector<std::size_t> trows_, vrows_;
  std::vector<double> ty_, vy_;
  std::vector<std::vector<double>> thresholds_;
  std::vector<std::vector<std::uint8_t>> bins_;
  int root_bin_ = -1;
  int child_bin_[2] = {-1, -1};
};

}  // namespace

std::unique_ptr<Model> fit_table(const Columns& cols, const std::vector<std::size_t>& rows,
                                 const std::vector<double>& y) {
  if (rows.empty()) throw EstimationError("cannot fit a model on zero rows");
  return std::make_unique<TableModel>(cols, rows, y);
}

std::unique_ptr<Model> fit_stumps(const LearnerConfig& cfg, Loss loss, const Columns& cols,
                                  const std::vector<std::size_t>& rows, const std::vector<double>& y,
                                  std::uint64_t seed) {
  if (rows.empty()) throw EstimationError("cannot fit a model on zero rows");
  Booster b(cfg, loss, cols, rows, y, seed);
  return b.run();
}

std::unique_ptr<Model> fit_model(LearnerConfig::Kind kind, const LearnerConfig& cfg, Loss loss, const Columns& cols,
                                 const std::vector<std::size_t>& rows, const std::vector<double>& y,
                                 std::uint64_t seed) {
  if (kind == LearnerConfig::Kind::Table) return fit_table(cols, rows, y);
  if (kind == LearnerConfig::Kind::Stumps) return fit_stumps(cfg, loss, cols, rows, y, seed);
  throw Error("learner kind must be resolved before fitting");
}

}  // namespace variata
