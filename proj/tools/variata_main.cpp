// variata command-line front end.
#include <CLI11.hpp>

#include <cstring>
#include <fstream>
#include <iostream>

#include "variata/config.hpp"
#include "variata/counterfactual.hpp"
#include "variata/dataset.hpp"
#include "variata/error.hpp"
#include "variata/experiments.hpp"
#include "variata/inference.hpp"
#include "variata/report.hpp"
#include "variata/structural.hpp"

using namespace variata;

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

void emit_json(const nlohmann::json& j, const std::string& path) { emit(j.dump(2) + "\n", path); }

std::string config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
  }
  return "";
}

Dataset load_data(const RunConfig& c) {
  if (c.data.empty()) throw Error("--data is required");
  if (c.roles.empty()) throw Error("--roles is required");
  return ingest_csv(c.data, load_roles(c.roles));
}

int run_simulate(const RunConfig& c) {
  if (c.scm.empty()) throw Error("simulate needs --scm");
  auto spec = load_scm(c.scm);
  auto d = sample_observational(spec, c.n, c.seed);
  for (const auto& note : d.notes) std::cerr << "note: " << note << "\n";
  emit(to_csv(d), c.out);
  if (!c.roles.empty()) emit(roles_text(d.roles()), c.roles);
  return 0;
}

int run_check(const RunConfig& c) {
  if (c.scm.empty()) throw Error("check needs --scm");
  auto spec = load_scm(c.scm);
  auto shape = MechanismShape::from_spec(spec);
  if (!shape.declared)
    std::cerr << "warning: " << spec.name
              << " has no terms: block; every mechanism is treated as one non-additive term\n";
  emit_json(verdicts_json(spec.name, c.scale, check_all(shape, c.scale)), c.out);
  return 0;
}

int run_decompose(const RunConfig& c) {
  auto d = load_data(c);
  auto plan = FoldPlan::stratified(d, c.folds, c.seed);
  auto fits = fit_nuisances(d, plan, c.learner, c.scale);
  Estimator est(fits, d, c.estimator);
  auto report = run_decomposition(est, c.alpha, true);
  RunConfig echo = c;
  echo.learner.kind = fits.learner.kind;
  emit_json(decomposition_json(report, echo, d.n()), c.out);
  return 0;
}

int run_test(const RunConfig& c) {
  auto d = load_data(c);
  RunConfig echo = c;
  if (!c.z_column.empty()) {
    if (!c.z_value) throw Error("--z needs --z-value");
    ZSpecificOptions opt;
    opt.folds = c.folds;
    opt.seed = c.seed;
    opt.learner = c.learner;
    opt.kind = c.estimator;
    opt.min_stratum = c.min_stratum;
    opt.scale = c.scale;
    auto r = z_specific_de_ie(d, c.z_column, *c.z_value, c.alpha, opt);
    emit_json(test_report_json(r.test, r.estimate, echo), c.out);
    return 0;
  }
  auto spec = effect_by_name(c.effect, c.scale);
  auto plan = FoldPlan::stratified(d, c.folds, c.seed);
  auto fits = fit_nuisances(d, plan, c.learner, c.scale);
  echo.learner.kind = fits.learner.kind;
  Estimator est(fits, d, c.estimator);
  auto e = est.effect(spec);
  emit_json(test_report_json(interaction_test(e, c.alpha), e, echo), c.out);
  return 0;
}

int run_experiment(const RunConfig& c) {
  ExperimentGrid g;
  if (c.grid == "desk")
    g = desk_grid();
  else if (c.grid == "full") {
    g = full_grid();
    std::cerr << "warning: the full grid (100 repetitions, six sizes, five models) takes hours on one core\n";
  } else
    throw Error("unknown grid '" + c.grid + "' (expected desk or full)");
  if (c.reps) g.reps = *c.reps;
  if (!c.sizes.empty()) g.sizes = c.sizes;
  if (!c.scms.empty()) g.scms = c.scms;
  g.alpha = c.alpha;
  g.seed = c.seed;
  g.kind = c.estimator;
  g.learner = c.learner;
  g.folds = c.folds;
  auto table = run_grid(g);
  auto summary = summarize(table, g.alpha);
  if (c.out.empty()) {
    std::cout << table.to_csv();
    std::cerr << summary_json(summary, c).dump(2) << "\n";
    return 0;
  }
  emit(table.to_csv(), c.out);
  emit_json(summary_json(summary, c), c.out + ".summary.json");
  emit(summary.ecdf_csv(), c.out + ".ecdf.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string scale, learner, estimator, z_value, sizes, scms;
  int reps = 0;
  try {
    std::string path = config_path(argc, argv);
    if (!path.empty()) apply_config(cfg, load_config(path));
  } catch (const Error& e) {
    std::cerr << error_json("config", e.what()).dump() << "\n";
    return 2;
  }
  scale = scale_name(cfg.scale);
  learner = learner_name(cfg.learner.kind);
  estimator = estimator_name(cfg.estimator);

  CLI::App app{"variata: causal decompositions with interaction testing"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "key = value config file; flags override its values");
  app.fallthrough();  // --config may follow the subcommand

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", cfg.seed, "random seed");
    s->add_option("--out", cfg.out, "output path (stdout when omitted)");
  };
  auto estimation = [&](CLI::App* s) {
    s->add_option("--data", cfg.data, "CSV with a header row");
    s->add_option("--roles", cfg.roles, "role file: x =, y =, z =, w =, categorical =");
    s->add_option("--scale", scale, "mean | log-risk | log-odds");
    s->add_option("--alpha", cfg.alpha, "test level");
    s->add_option("--folds", cfg.folds, "cross-fitting folds (>= 2)");
    s->add_option("--clip-e", cfg.learner.clip_e, "propensity clipping");
    s->add_option("--clip-mu", cfg.learner.clip_mu, "outcome clipping on log scales");
    s->add_option("--learner", learner, "table | stumps (default: table when covariates are discrete)");
    s->add_option("--estimator", estimator, "plugin | onestep");
    common(s);
  };

  auto* sim = app.add_subcommand("simulate", "sample observational data from an SCM");
  sim->add_option("--scm", cfg.scm, "SCM file or builtin name")->required();
  sim->add_option("--n", cfg.n, "rows");
  sim->add_option("--roles", cfg.roles, "also write a role file here");
  common(sim);

  auto* chk = app.add_subcommand("check", "structural interaction criteria of an SCM");
  chk->add_option("--scm", cfg.scm, "SCM file or builtin name")->required();
  chk->add_option("--scale", scale, "mean | log-risk | log-odds");
  chk->add_option("--out", cfg.out, "output path");

  auto* dec = app.add_subcommand("decompose", "TV decomposition with interaction testing");
  estimation(dec);

  auto* tst = app.add_subcommand("test", "test a single effect");
  estimation(tst);
  tst->add_option("--effect", cfg.effect, "effect name, e.g. x-TE-SE or x-DLR-ILR");
  tst->add_option("--z", cfg.z_column, "Z column for a z-specific DE-IE test");
  tst->add_option("--z-value", z_value, "stratum value for --z");
  tst->add_option("--min-stratum", cfg.min_stratum, "rows per arm required in the stratum");

  auto* exp = app.add_subcommand("experiment", "synthetic calibration/power study");
  exp->add_option("--grid", cfg.grid, "desk | full");
  exp->add_option("--reps", reps, "repetitions per cell");
  exp->add_option("--sizes", sizes, "comma-separated sample sizes");
  exp->add_option("--scms", scms, "comma-separated SCM names");
  exp->add_option("--alpha", cfg.alpha, "test level");
  exp->add_option("--folds", cfg.folds, "cross-fitting folds");
  exp->add_option("--learner", learner, "table | stumps");
  exp->add_option("--estimator", estimator, "plugin | onestep");
  exp->add_option("--clip-e", cfg.learner.clip_e, "propensity clipping");
  common(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("usage", e.what()).dump() << "\n";
    return 2;
  }

  try {
    std::map<std::string, std::string> extra;
    extra["scale"] = scale;
    extra["learner"] = learner;
    extra["estimator"] = estimator;
    if (!z_value.empty()) extra["z-value"] = z_value;
    if (reps > 0) extra["reps"] = std::to_string(reps);
    if (!sizes.empty()) extra["sizes"] = sizes;
    if (!scms.empty()) extra["scms"] = scms;
    apply_config(cfg, extra);
    cfg.validate();
    auto* sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();
    if (cfg.subcommand == "simulate") return run_simulate(cfg);
    if (cfg.subcommand == "check") return run_check(cfg);
    if (cfg.subcommand == "decompose") return run_decompose(cfg);
    if (cfg.subcommand == "test") return run_test(cfg);
    if (cfg.subcommand == "experiment") return run_experiment(cfg);
    throw Error("unknown subcommand '" + cfg.subcommand + "'");
  } catch (const ParseError& e) {
    std::cerr << error_json("parse", e.what()).dump() << "\n";
  } catch (const DataError& e) {
    std::cerr << error_json("data", e.what()).dump() << "\n";
  } catch (const EstimationError& e) {
    std::cerr << error_json("estimation", e.what()).dump() << "\n";
  } catch (const Error& e) {
    std::cerr << error_json("error", e.what()).dump() << "\n";
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()).dump() << "\n";
  }
  return 1;
}
