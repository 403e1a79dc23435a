#include "variata/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "variata/error.hpp"

namespace variata {

void RunConfig::validate() const {
  if (!(alpha > 0 && alpha < 1)) throw Error("--alpha must lie in (0, 1)");
  if (folds < 2) throw Error("--folds must be at least 2");
  if (!(learner.clip_e > 0 && learner.clip_e < 0.5)) throw Error("--clip-e must lie in (0, 0.5)");
  if (!(learner.clip_mu > 0 && learner.clip_mu < 0.5)) throw Error("--clip-mu must lie in (0, 0.5)");
  if (reps && *reps < 1) throw Error("reps must be at least 1");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw Error("sizes must be sorted ascending");
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error("config key '" + key + "' expects an integer, got '" + v + "'");
  }
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", lineno);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ParseError("empty key", lineno);
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "data")
      c.data = v;
    else if (key == "roles")
      c.roles = v;
    else if (key == "scm")
      c.scm = v;
    else if (key == "out")
      c.out = v;
    else if (key == "scale")
      c.scale = parse_scale(v);
    else if (key == "alpha")
      c.alpha = to_double(key, v);
    else if (key == "folds")
      c.folds = static_cast<int>(to_int(key, v));
    else if (key == "clip-e")
      c.learner.clip_e = to_double(key, v);
    else if (key == "clip-mu")
      c.learner.clip_mu = to_double(key, v);
    else if (key == "learner")
      c.learner.kind = parse_learner(v);
    else if (key == "rounds")
      c.learner.rounds = static_cast<int>(to_int(key, v));
    else if (key == "learning-rate")
      c.learner.learning_rate = to_double(key, v);
    else if (key == "ridge")
      c.learner.ridge = to_double(key, v);
    else if (key == "seed")
      c.seed = static_cast<std::uint64_t>(to_int(key, v));
    else if (key == "estimator")
      c.estimator = parse_estimator(v);
    else if (key == "n")
      c.n = static_cast<std::size_t>(to_int(key, v));
    else if (key == "effect")
      c.effect = v;
    else if (key == "z")
      c.z_column = v;
    else if (key == "z-value")
      c.z_value = to_double(key, v);
    else if (key == "min-stratum")
      c.min_stratum = static_cast<std::size_t>(to_int(key, v));
    else if (key == "grid")
      c.grid = v;
    else if (key == "reps")
      c.reps = static_cast<int>(to_int(key, v));
    else if (key == "sizes") {
      c.sizes.clear();
      for (const auto& s : split_list(v)) c.sizes.push_back(static_cast<std::size_t>(to_int(key, s)));
    } else if (key == "scms")
      c.scms = split_list(v);
    else
      throw Error("unknown config key '" + key + "'");
  }
}

}  // namespace variata
