#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../common/schema_check.hpp"
#include "variata/config.hpp"
#include "variata/counterfactual.hpp"
#include "variata/error.hpp"

using namespace variata;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path workdir() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("variata_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path in_dir(const std::string& name) { return workdir() / name; }

Run run(const std::string& args) {
  auto out = in_dir("stdout.txt"), err = in_dir("stderr.txt");
  std::string cmd = "cd '" + workdir().string() + "' && '" + VARIATA_CLI_PATH + "' " + args + " > '" + out.string() +
                    "' 2> '" + err.string() + "'";
  int rc = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::string> schema_errors(const json& doc, const std::string& name) {
  return schema_check::validate(doc, std::string(VARIATA_SOURCE_DIR) + "/schemas", name);
}

void write(const std::string& name, const std::string& text) { std::ofstream(in_dir(name)) << text; }

}  // namespace

TEST_CASE("check prints the structural verdicts") {
  auto r = run("check --scm M1");
  REQUIRE(r.status == 0);
  auto j = json::parse(r.out);
  CHECK(schema_errors(j, "structural").empty());
  CHECK(j["scm"] == "M1");
  std::vector<std::string> got;
  for (const auto& v : j["verdicts"]) got.push_back(v["verdict"]);
  CHECK(got == std::vector<std::string>{"interaction", "interaction", "interaction", "no-interaction",
                                        "no-interaction"});

  auto lr = run("check --scm C-ex13 --scale log-risk");
  REQUIRE(lr.status == 0);
  auto k = json::parse(lr.out);
  CHECK(k["verdicts"][1]["criterion"] == "Str-DLR-ILR");
  CHECK(k["verdicts"][1]["verdict"] == "no-interaction");

  // A file without a terms: block falls back to the conservative shape with a warning.
  write("plain.scm", "scm plain\nendo X role=X := bernoulli(0.5)\nendo Y role=Y := X\n");
  auto p = run("check --scm plain.scm");
  CHECK(p.status == 0);
  CHECK(p.err.find("no terms") != std::string::npos);
}

TEST_CASE("simulate then ingest round-trips") {
  auto r = run("simulate --scm M2 --n 300 --seed 9 --out m2.csv --roles m2.roles");
  REQUIRE(r.status == 0);
  auto back = ingest_csv(in_dir("m2.csv").string(), load_roles(in_dir("m2.roles").string()));
  auto mem = sample_observational(builtin_scm("M2"), 300, 9);
  CHECK(back.x == mem.x);
  CHECK(back.y == mem.y);
  CHECK(back.z == mem.z);
  CHECK(back.w == mem.w);
  auto again = run("simulate --scm M2 --n 300 --seed 9");
  CHECK(again.out == slurp(in_dir("m2.csv")));
}

TEST_CASE("decompose and test") {
  REQUIRE(run("simulate --scm C-ex13 --n 4000 --seed 2 --out bin.csv --roles bin.roles").status == 0);
  for (std::string scale : {"mean", "log-risk", "log-odds"}) {
    auto r = run("decompose --data bin.csv --roles bin.roles --alpha 0.05 --scale " + scale);
    REQUIRE_MESSAGE(r.status == 0, r.err);
    auto j = json::parse(r.out);
    auto errs = schema_errors(j, "decomposition");
    CHECK_MESSAGE(errs.empty(), (errs.empty() ? "" : errs.front()));
    CHECK(j["scale"] == scale);
    CHECK(j["config"]["learner"] == "table");
    CHECK(j["drr_irr"].is_null() == (scale != "log-risk"));
    CHECK(j["additivity_residual"].get<double>() < 1e-10);
  }
  auto t = run("test --data bin.csv --roles bin.roles --effect x-DLR-ILR --scale log-risk --out t.json");
  REQUIRE_MESSAGE(t.status == 0, t.err);
  auto tj = schema_check::load_json(in_dir("t.json").string());
  CHECK(schema_errors(tj, "test").empty());
  CHECK(tj["test"]["name"] == "x-DLR-ILR");

  auto z = run("test --data bin.csv --roles bin.roles --z Z --z-value 1 --min-stratum 20");
  REQUIRE_MESSAGE(z.status == 0, z.err);
  CHECK(json::parse(z.out)["test"]["name"] == "z-DE-IE(Z=1)");

  auto plug = run("decompose --data bin.csv --roles bin.roles --estimator plugin --learner stumps --folds 5");
  REQUIRE_MESSAGE(plug.status == 0, plug.err);
  auto pj = json::parse(plug.out);
  CHECK(pj["estimator"] == "plugin");
  CHECK(pj["config"]["learner"] == "stumps");
  CHECK(pj["config"]["folds"] == 5);
}

TEST_CASE("errors come back as JSON with a nonzero exit") {
  auto missing = run("decompose --data bin.csv");
  CHECK(missing.status == 1);
  auto mj = json::parse(missing.err);
  CHECK(schema_errors(mj, "error").empty());
  CHECK(mj["error"]["message"].get<std::string>().find("--roles") != std::string::npos);

  write("bad.csv", "X,Y\n0,1\n2,0\n");
  write("bad.roles", "x = X\ny = Y\n");
  auto bad = run("decompose --data bad.csv --roles bad.roles");
  CHECK(bad.status == 1);
  auto bj = json::parse(bad.err);
  CHECK(bj["error"]["type"] == "data");
  CHECK(bj["error"]["message"].get<std::string>().find("X must be binary") != std::string::npos);

  auto flag = run("decompose --no-such-flag");
  CHECK(flag.status == 2);
  CHECK(json::parse(flag.err)["error"]["type"] == "usage");
  CHECK(run("").status == 2);

  auto alpha = run("decompose --data bin.csv --roles bin.roles --alpha 1.5");
  CHECK(alpha.status == 1);
  CHECK(json::parse(alpha.err)["error"]["message"].get<std::string>().find("alpha") != std::string::npos);

  auto scale = run("decompose --data bin.csv --roles bin.roles --scale log");
  CHECK(scale.status == 1);

  auto scm = run("check --scm no_such_model.scm");
  CHECK(scm.status == 1);

  write("broken.scm", "scm b\nendo X role=X := bernoulli(0.5\n");
  auto parse = run("check --scm broken.scm");
  CHECK(parse.status == 1);
  CHECK(json::parse(parse.err)["error"]["type"] == "parse");

  // non-binary outcome on a log scale
  REQUIRE(run("simulate --scm M3 --n 200 --out cont.csv --roles cont.roles").status == 0);
  auto logscale = run("decompose --data cont.csv --roles cont.roles --scale log-risk");
  CHECK(logscale.status == 1);
  CHECK(json::parse(logscale.err)["error"]["type"] == "data");
}

TEST_CASE("config files and flag precedence") {
  write("run.cfg", "# shared settings\n[estimation]\nalpha = 0.1\nseed = 5\nclip_e = 0.02\nfolds = 4\n");
  auto r = run("decompose --config run.cfg --data bin.csv --roles bin.roles --seed 9");
  REQUIRE_MESSAGE(r.status == 0, r.err);
  auto c = json::parse(r.out)["config"];
  CHECK(c["alpha"] == 0.1);
  CHECK(c["seed"] == 9);
  CHECK(c["clip_e"] == 0.02);
  CHECK(c["folds"] == 4);

  write("unknown.cfg", "alhpa = 0.1\n");
  auto u = run("decompose --config unknown.cfg --data bin.csv --roles bin.roles");
  CHECK(u.status == 2);
  CHECK(json::parse(u.err)["error"]["type"] == "config");

  auto kv = parse_config_text("[a]\nclip_mu = 0.01 # trailing\n\nlearner=stumps\n");
  CHECK(kv.at("clip-mu") == "0.01");
  CHECK(kv.at("learner") == "stumps");
  RunConfig cfg;
  apply_config(cfg, kv);
  CHECK(cfg.learner.clip_mu == 0.01);
  CHECK(cfg.learner.kind == LearnerConfig::Kind::Stumps);
  CHECK_THROWS_AS(apply_config(cfg, {{"folds", "x"}}), Error);
  cfg.folds = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("experiment output is deterministic") {
  std::string args = "experiment --scms M3,M5 --sizes 400 --reps 2 --seed 3 --folds 5";
  REQUIRE(run(args + " --out a.csv").status == 0);
  REQUIRE(run(args + " --out b.csv").status == 0);
  CHECK(slurp(in_dir("a.csv")) == slurp(in_dir("b.csv")));
  CHECK(slurp(in_dir("a.csv")).rfind("scm,n,rep,interaction,p,estimate,se,null_true,error\n", 0) == 0);
  auto s = schema_check::load_json(in_dir("a.csv.summary.json").string());
  CHECK(schema_errors(s, "experiment_summary").empty());
  CHECK(s["cells"].size() == 10);
  CHECK(fs::exists(in_dir("a.csv.ecdf.csv")));
  CHECK(run("experiment --grid nope").status == 1);
}
