#include "variata/estimators.hpp"

#include <cmath>

#include "variata/error.hpp"

namespace variata {

std::string estimator_name(EstimatorKind k) { return k == EstimatorKind::PlugIn ? "plugin" : "onestep"; }

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "plugin" || s == "plug-in") return EstimatorKind::PlugIn;
  if (s == "onestep" || s == "one-step") return EstimatorKind::OneStep;
  throw Error("unknown estimator '" + s + "' (expected plugin or onestep)");
}

double influence_se(const std::vector<double>& phi) {
  if (phi.empty()) return 0.0;
  double s = 0.0;
  for (double v : phi) s += v * v;
  double n = static_cast<double>(phi.size());
  return std::sqrt(s / n / n);
}

namespace {

void check_query(const NuisanceFits& fits, const Dataset& data, const PoQuery& q) {
  if (fits.n() != data.n()) throw Error("nuisance fits and dataset have different row counts");
  auto bin = [](int v) { return v == 0 || v == 1; };
  if (!bin(q.x_y) || !bin(q.x_w) || !(bin(q.x_z) || q.x_z == kAnyX))
    throw Error("PO query " + q.label() + " needs treatment values in {0, 1}");
  if (q.scale != Scale::Mean && q.scale != fits.scale)
    throw Error("nuisances were fitted for the " + scale_name(fits.scale) + " scale; cannot estimate a " +
                scale_name(q.scale) + " PO");
  if (q.x_z != kAnyX) {
    bool any = false;
    for (double x : data.x)
      if (static_cast<int>(x) == q.x_z) {
        any = true;
        break;
      }
    if (!any) throw EstimationError("no rows with X = " + std::to_string(q.x_z) + " for " + q.label());
  }
}

// Pieces of the influence expression for one query.
struct Parts {
  std::vector<double> resid;  // T1 + T2 per row
  std::vector<double> t3;     // 1(X = x_z) / P(x_z) * nu
  std::vector<double> in_z;   // 1(X = x_z) / P(x_z)
};

Parts parts(const NuisanceFits& f, const Dataset& d, const PoQuery& q) {
  const std::size_t n = d.n();
  const Scale s = q.scale;
  double share = 1.0;
  if (q.x_z != kAnyX) {
    std::size_t c = 0;
    for (double x : d.x)
      if (static_cast<int>(x) == q.x_z) ++c;
    share = static_cast<double>(c) / static_cast<double>(n);
  }
  const auto& nu = s == Scale::Mean ? f.nu_mean[q.x_y][q.x_w] : f.nu[q.x_y][q.x_w];
  Parts p;
  p.resid.resize(n);
  p.t3.resize(n);
  p.in_z.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int xi = static_cast<int>(d.x[i]);
    double ez = q.x_z == kAnyX ? 1.0 : f.e(q.x_z, i);
    double eratio = ez / f.e(q.x_w, i);
    double gratio = f.g(q.x_w, i) / f.g(q.x_y, i);
    double m = f.mu_on(s, q.x_y, i);
    double r = d.y[i] - m;
    if (s == Scale::LogRisk) r /= m;
    if (s == Scale::LogOdds) r /= m * (1.0 - m);
    double hm = scale_link(s, m);
    double t1 = xi == q.x_y ? eratio * gratio * r / share : 0.0;
    double t2 = xi == q.x_w ? eratio * (hm - nu[i]) / share : 0.0;
    double w = (q.x_z == kAnyX || xi == q.x_z) ? 1.0 / share : 0.0;
    p.resid[i] = t1 + t2;
    p.t3[i] = w * nu[i];
    p.in_z[i] = w;
  }
  return p;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

PoEstimate po_onestep(const NuisanceFits& fits, const Dataset& data, const PoQuery& q) {
  check_query(fits, data, q);
  Parts p = parts(fits, data, q);
  const std::size_t n = data.n();
  PoEstimate e;
  e.q = q;
  e.kind = EstimatorKind::OneStep;
  double plug = mean(p.t3);
  e.correction = mean(p.resid);
  e.value = plug + e.correction;
  // The nu term is centered within the X = x_z stratum, so the influence
  // values average to zero exactly.
  e.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.phi[i] = p.resid[i] + p.t3[i] - p.in_z[i] * e.value;
  double c = mean(e.phi);
  for (double& v : e.phi) v -= c;
  e.se = influence_se(e.phi);
  return e;
}

PoEstimate po_plugin(const NuisanceFits& fits, const Dataset& data, const PoQuery& q) {
  PoEstimate e = po_onestep(fits, data, q);
  e.kind = EstimatorKind::PlugIn;
  if (q.scale == Scale::Mean && q.x_y == q.x_w && q.x_w == q.x_z) {
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < data.n(); ++i)
      if (static_cast<int>(data.x[i]) == q.x_z) {
        s += data.y[i];
        ++c;
      }
    e.correction = 0.0;
    e.value = s / static_cast<double>(c);
    return e;
  }
  e.value -= e.correction;
  return e;
}

Estimator::Estimator(const NuisanceFits& fits, const Dataset& data, EstimatorKind kind)
    : fits_(fits), data_(data), kind_(kind) {}

const PoEstimate& Estimator::po(const PoQuery& q) {
  std::string key = q.label() + "/" + scale_name(q.scale);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  PoEstimate e = kind_ == EstimatorKind::PlugIn ? po_plugin(fits_, data_, q) : po_onestep(fits_, data_, q);
  return cache_.emplace(key, std::move(e)).first->second;
}

EffectEstimate Estimator::effect(const EffectSpec& spec) {
  EffectEstimate out;
  out.key = spec.key;
  out.name = spec.name;
  out.scale = spec.scale;
  out.kind = kind_;
  out.n = data_.n();
  out.phi.assign(data_.n(), 0.0);
  for (const auto& t : spec.terms) {
    const PoEstimate& p = po(t.q);
    out.value += t.coef * p.value;
    for (std::size_t i = 0; i < out.phi.size(); ++i) out.phi[i] += t.coef * p.phi[i];
  }
  out.se = influence_se(out.phi);
  out.ci_lo = out.value - 1.96 * out.se;
  out.ci_hi = out.value + 1.96 * out.se;
  return out;
}

EffectEstimate Estimator::ratio(const std::string& name, const std::vector<EffectTerm>& terms) {
  EffectEstimate out;
  out.key = name;
  out.name = name;
  out.scale = Scale::Mean;
  out.kind = kind_;
  out.n = data_.n();
  out.phi.assign(data_.n(), 0.0);
  double log_value = 0.0;
  for (const auto& t : terms) {
    PoQuery q = t.q;
    q.scale = Scale::Mean;
    const PoEstimate& p = po(q);
    if (!(p.value > 0.0))
      throw EstimationError(name + " needs positive mean-scale POs; " + q.label() + " = " + std::to_string(p.value));
    log_value += t.coef * std::log(p.value);
    for (std::size_t i = 0; i < out.phi.size(); ++i) out.phi[i] += t.coef * p.phi[i] / p.value;
  }
  out.value = std::exp(log_value);
  for (double& v : out.phi) v *= out.value;
  out.se = influence_se(out.phi);
  out.ci_lo = out.value - 1.96 * out.se;
  out.ci_hi = out.value + 1.96 * out.se;
  return out;
}

EffectEstimate effect_estimate(const NuisanceFits& fits, const Dataset& data, const EffectSpec& spec,
                               EstimatorKind kind) {
  Estimator est(fits, data, kind);
  return est.effect(spec);
}

std::vector<EffectTerm> drr_irr_terms() {
  auto q = [](int xy, int xw) { return PoQuery{xy, xw, kAnyX, Scale::Mean}; };
  return {{+1, q(1, 0)}, {-1, q(0, 0)}, {+1, q(0, 1)}, {-1, q(1, 1)}};
}

}  // namespace variata
