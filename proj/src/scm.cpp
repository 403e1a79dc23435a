#include "variata/scm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "variata/error.hpp"
#include "variata/random.hpp"

namespace variata {

std::string role_name(Role r) {
  switch (r) {
    case Role::X:
      return "X";
    case Role::Z:
      return "Z";
    case Role::W:
      return "W";
    case Role::Y:
      return "Y";
  }
  return "?";
}

Role parse_role(const std::string& s) {
  if (s == "X") return Role::X;
  if (s == "Z") return Role::Z;
  if (s == "W") return Role::W;
  if (s == "Y") return Role::Y;
  throw ParseError("unknown role '" + s + "' (expected X, Z, W or Y)");
}

std::string link_name(Link l) {
  switch (l) {
    case Link::Identity:
      return "identity";
    case Link::Log:
      return "log";
    case Link::Logit:
      return "logit";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

Distribution Distribution::unit_uniform() {
  Distribution d;
  d.kind = DistKind::Uniform;
  d.a = 0.0;
  d.b = 1.0;
  return d;
}

Distribution Distribution::parse(const std::string& text) {
  std::string t = trim(text);
  std::size_t open = t.find('(');
  if (open == std::string::npos || t.back() != ')')
    throw ParseError("malformed distribution '" + t + "'");
  std::string kind = trim(t.substr(0, open));
  std::vector<std::string> args = split_top(t.substr(open + 1, t.size() - open - 2), ',');
  auto num = [&](const std::string& s) {
    std::string v = trim(s);
    bool neg = !v.empty() && v[0] == '-';
    Rational r = parse_decimal(neg ? v.substr(1) : v);
    return neg ? Rational(-r) : r;
  };
  Distribution d;
  if (kind == "bernoulli") {
    if (args.size() != 1) throw ParseError("bernoulli takes one argument");
    Rational p = num(args[0]);
    if (p < 0 || p > 1) throw ParseError("bernoulli probability outside [0,1]: " + args[0]);
    d.kind = DistKind::Finite;
    d.rvalues = {0, 1};
    d.rprobs = {Rational(1 - p), p};
  } else if (kind == "categorical") {
    Rational total = 0;
    for (const auto& a : args) {
      std::size_t colon = a.find(':');
      if (colon == std::string::npos)
        throw ParseError("categorical entries must be value:probability, got '" + a + "'");
      Rational v = num(a.substr(0, colon));
      Rational p = num(a.substr(colon + 1));
      if (p < 0) throw ParseError("negative probability in categorical");
      d.rvalues.push_back(v);
      d.rprobs.push_back(p);
      total += p;
    }
    if (total != 1) throw ParseError("categorical probabilities must sum to 1");
    d.kind = DistKind::Finite;
  } else if (kind == "normal") {
    if (args.size() != 2) throw ParseError("normal takes (mean, sd)");
    d.kind = DistKind::Normal;
    d.a = static_cast<double>(num(args[0]));
    d.b = static_cast<double>(num(args[1]));
    if (!(d.b > 0)) throw ParseError("normal sd must be positive");
  } else if (kind == "uniform") {
    if (args.size() != 2) throw ParseError("uniform takes (a, b)");
    d.kind = DistKind::Uniform;
    d.a = static_cast<double>(num(args[0]));
    d.b = static_cast<double>(num(args[1]));
    if (!(d.b > d.a)) throw ParseError("uniform needs a < b");
  } else if (kind == "exponential") {
    if (args.size() != 1) throw ParseError("exponential takes (rate)");
    d.kind = DistKind::Exponential;
    d.a = static_cast<double>(num(args[0]));
    if (!(d.a > 0)) throw ParseError("exponential rate must be positive");
  } else {
    throw ParseError("unknown distribution '" + kind + "'");
  }
  for (const auto& v : d.rvalues) d.values.push_back(static_cast<double>(v));
  for (const auto& p : d.rprobs) d.probs.push_back(static_cast<double>(p));
  return d;
}

double Distribution::sample(std::mt19937_64& rng) const {
  switch (kind) {
    case DistKind::Finite: {
      double u = uniform01(rng);
      double acc = 0.0;
      for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) return values[k];
      }
      return values.back();
    }
    case DistKind::Normal: {
      std::normal_distribution<double> nd(a, b);
      return nd(rng);
    }
    case DistKind::Uniform:
      return a + (b - a) * uniform01(rng);
    case DistKind::Exponential: {
      std::exponential_distribution<double> ed(a);
      return ed(rng);
    }
  }
  return 0.0;
}

std::string Distribution::describe() const {
  switch (kind) {
    case DistKind::Finite: {
      std::string s = "categorical(";
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) s += ", ";
        s += fmt(values[k]) + ":" + fmt(probs[k]);
      }
      return s + ")";
    }
    case DistKind::Normal:
      return "normal(" + fmt(a) + ", " + fmt(b) + ")";
    case DistKind::Uniform:
      return "uniform(" + fmt(a) + ", " + fmt(b) + ")";
    case DistKind::Exponential:
      return "exponential(" + fmt(a) + ")";
  }
  return "?";
}

int ScmSpec::index_of(const std::string& var) const {
  for (std::size_t i = 0; i < endo.size(); ++i)
    if (endo[i].name == var) return static_cast<int>(i);
  return -1;
}

int ScmSpec::exo_index(const std::string& var) const {
  for (std::size_t i = 0; i < exo.size(); ++i)
    if (exo[i].name == var) return static_cast<int>(i);
  return -1;
}

bool ScmSpec::finite_support() const { return non_finite_exogenous().empty(); }

std::vector<std::string> ScmSpec::non_finite_exogenous() const {
  std::vector<std::string> out;
  for (const auto& e : exo)
    if (!e.implicit && !e.dist.finite()) out.push_back(e.name);
  return out;
}

namespace {

int role_rank(Role r) {
  switch (r) {
    case Role::Z:
      return 0;
    case Role::X:
      return 1;
    case Role::W:
      return 2;
    case Role::Y:
      return 3;
  }
  return 0;
}

bool valid_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

TermDecl parse_term(const std::string& raw, int line) {
  TermDecl t;
  t.text = trim(raw);
  std::string body = t.text;
  std::size_t tilde = body.find('~');
  if (tilde != std::string::npos) {
    std::string flag = trim(body.substr(tilde + 1));
    if (flag != "nl") throw ParseError("unknown term flag '~" + flag + "' (only ~nl)", line);
    t.nonlinear_in_w = true;
    body = trim(body.substr(0, tilde));
  }
  for (const auto& v : split_top(body, '*')) {
    if (!valid_identifier(v)) throw ParseError("bad term '" + t.text + "'", line);
    t.vars.push_back(v);
  }
  return t;
}

}  // namespace

ScmSpec parse_scm(const std::string& text) {
  ScmSpec spec;
  spec.source = text;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool in_terms = false;
  std::set<std::string> names;
  struct PendingEndo {
    std::string name;
    Role role;
    std::string expr;
    bool has_parents = false;
    std::vector<std::string> parents;
    int line;
  };
  std::vector<PendingEndo> pending;
  std::vector<std::pair<std::string, int>> term_lines;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string l = raw;
    std::size_t hash = l.find('#');
    if (hash != std::string::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;

    if (in_terms && (raw[0] == ' ' || raw[0] == '\t')) {
      term_lines.emplace_back(l, line_no);
      continue;
    }
    in_terms = false;

    std::istringstream ls(l);
    std::string kw;
    ls >> kw;
    if (kw == "scm") {
      std::string nm;
      ls >> nm;
      if (nm.empty()) throw ParseError("scm needs a name", line_no);
      spec.name = nm;
    } else if (kw == "exo") {
      std::size_t tilde = l.find('~');
      if (tilde == std::string::npos) throw ParseError("exo line needs '~ <distribution>'", line_no);
      std::string nm = trim(l.substr(3, tilde - 3));
      if (!valid_identifier(nm)) throw ParseError("bad exogenous name '" + nm + "'", line_no);
      if (!names.insert(nm).second) throw ParseError("duplicate name '" + nm + "'", line_no);
      ExoVar e;
      e.name = nm;
      try {
        e.dist = Distribution::parse(l.substr(tilde + 1));
      } catch (const ParseError& err) {
        throw ParseError(err.what(), line_no);
      }
      spec.exo.push_back(std::move(e));
    } else if (kw == "endo") {
      std::size_t assign = l.find(":=");
      if (assign == std::string::npos) throw ParseError("endo line needs ':= <expression>'", line_no);
      std::istringstream hs(l.substr(4, assign - 4));
      PendingEndo p;
      p.line = line_no;
      p.expr = trim(l.substr(assign + 2));
      bool has_role = false;
      std::string tok;
      hs >> p.name;
      while (hs >> tok) {
        if (tok.rfind("role=", 0) == 0) {
          try {
            p.role = parse_role(tok.substr(5));
          } catch (const ParseError& err) {
            throw ParseError(err.what(), line_no);
          }
          has_role = true;
        } else if (tok.rfind("parents=", 0) == 0) {
          p.has_parents = true;
          std::string list = tok.substr(8);
          if (list != "-")
            for (const auto& v : split_top(list, ',')) p.parents.push_back(v);
        } else {
          throw ParseError("unexpected token '" + tok + "' in endo line", line_no);
        }
      }
      if (!valid_identifier(p.name)) throw ParseError("bad variable name '" + p.name + "'", line_no);
      if (!has_role) throw ParseError("endo " + p.name + " needs role=<X|Z|W|Y>", line_no);
      if (!names.insert(p.name).second) throw ParseError("duplicate name '" + p.name + "'", line_no);
      pending.push_back(std::move(p));
    } else if (kw == "terms:") {
      spec.terms.present = true;
      in_terms = true;
    } else if (kw == "corr" || kw == "cov") {
      throw ParseError(
          "correlated exogenous noise is not supported; only Markovian models with "
          "independent exogenous variables are accepted",
          line_no);
    } else {
      throw ParseError("unknown directive '" + kw + "'", line_no);
    }
  }
  if (spec.name.empty()) spec.name = "unnamed";
  if (pending.empty()) throw ParseError("model declares no endogenous variables");

  // Endogenous variables and their mechanisms.
  std::map<std::string, int> exo_owner;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto& p = pending[i];
    EndoVar v;
    v.name = p.name;
    v.role = p.role;
    try {
      v.mech = Expr::parse(p.expr);
    } catch (const ParseError& err) {
      throw ParseError(err.what(), p.line);
    }
    if (i > 0 && role_rank(p.role) < role_rank(spec.endo.back().role))
      throw ParseError("variable " + p.name + " (role " + role_name(p.role) +
                           ") declared after a " + role_name(spec.endo.back().role) +
                           " variable; order must be Z, X, W, Y",
                       p.line);
    std::set<int> parents;
    std::vector<int> exo_refs;
    for (const auto& id : v.mech.identifiers()) {
      int ei = -1;
      for (std::size_t k = 0; k < i; ++k)
        if (pending[k].name == id) ei = static_cast<int>(k);
      if (ei >= 0) {
        parents.insert(ei);
        continue;
      }
      int xi = spec.exo_index(id);
      if (xi >= 0) {
        auto [it, fresh] = exo_owner.emplace(id, static_cast<int>(i));
        if (!fresh && it->second != static_cast<int>(i))
          throw ParseError("exogenous " + id + " is shared by " + pending[it->second].name +
                               " and " + p.name + "; shared noise makes the model non-Markovian",
                           p.line);
        exo_refs.push_back(xi);
        continue;
      }
      bool later = false;
      for (std::size_t k = i; k < pending.size(); ++k)
        if (pending[k].name == id) later = true;
      if (later)
        throw ParseError(p.name + " references " + id +
                             ", which is not declared earlier (variables must be in topological order)",
                         p.line);
      throw ParseError(p.name + " references undeclared name '" + id + "'", p.line);
    }
    v.parents.assign(parents.begin(), parents.end());
    for (int par : v.parents) {
      if (role_rank(pending[par].role) > role_rank(p.role))
        throw ParseError(p.name + " (role " + role_name(p.role) + ") cannot depend on " +
                             pending[par].name + " (role " + role_name(pending[par].role) + ")",
                         p.line);
    }
    if (p.has_parents) {
      std::set<std::string> declared(p.parents.begin(), p.parents.end());
      std::set<std::string> actual;
      for (int par : v.parents) actual.insert(pending[par].name);
      if (declared != actual)
        throw ParseError("parents= list of " + p.name + " does not match the variables its mechanism reads",
                         p.line);
    }
    v.exo_refs = exo_refs;
    spec.endo.push_back(std::move(v));
  }

  // Implicit uniforms behind bernoulli(p) calls, then bind identifiers.
  for (std::size_t i = 0; i < spec.endo.size(); ++i) {
    auto& v = spec.endo[i];
    int nb = v.mech.bernoulli_count();
    for (int k = 0; k < nb; ++k) {
      ExoVar u;
      u.name = "U." + v.name + "." + std::to_string(k);
      u.dist = Distribution::unit_uniform();
      u.implicit = true;
      u.owner = static_cast<int>(i);
      spec.exo.push_back(u);
      int slot = static_cast<int>(spec.exo.size()) - 1;
      v.mech.bind_bernoulli(k, slot);
      v.exo_refs.push_back(slot);
    }
    v.mech.resolve([&](const std::string& id) -> std::pair<bool, int> {
      int ei = spec.index_of(id);
      if (ei >= 0) return {false, ei};
      return {true, spec.exo_index(id)};
    });
  }

  for (std::size_t i = 0; i < spec.endo.size(); ++i) {
    const auto& v = spec.endo[i];
    switch (v.role) {
      case Role::X:
        if (spec.x >= 0) throw ParseError("exactly one X variable is allowed");
        spec.x = static_cast<int>(i);
        break;
      case Role::Y:
        if (spec.y >= 0) throw ParseError("exactly one Y variable is allowed");
        spec.y = static_cast<int>(i);
        break;
      case Role::Z:
        spec.z.push_back(static_cast<int>(i));
        break;
      case Role::W:
        spec.w.push_back(static_cast<int>(i));
        break;
    }
  }
  if (spec.x < 0) throw ParseError("model needs exactly one X variable");
  if (spec.y < 0) throw ParseError("model needs exactly one Y variable");

  // terms: block.
  for (const auto& [l, ln] : term_lines) {
    std::size_t colon = l.find(':');
    if (colon == std::string::npos) throw ParseError("terms entry needs '<var>: <terms>'", ln);
    std::string key = trim(l.substr(0, colon));
    std::string rest = trim(l.substr(colon + 1));
    if (key == "link") {
      if (rest == "identity")
        spec.terms.link = Link::Identity;
      else if (rest == "log")
        spec.terms.link = Link::Log;
      else if (rest == "logit")
        spec.terms.link = Link::Logit;
      else
        throw ParseError("link must be identity, log or logit", ln);
      continue;
    }
    if (spec.index_of(key) < 0) throw ParseError("terms for unknown variable '" + key + "'", ln);
    if (spec.terms.terms.count(key)) throw ParseError("duplicate terms entry for " + key, ln);
    std::vector<TermDecl> list;
    if (rest != "-" && !rest.empty())
      for (const auto& t : split_top(rest, ',')) list.push_back(parse_term(t, ln));
    for (const auto& t : list)
      for (const auto& v : t.vars) {
        int vi = spec.index_of(v);
        if (vi < 0) throw ParseError("term '" + t.text + "' names unknown variable " + v, ln);
      }
    spec.terms.terms[key] = std::move(list);
  }
  if (spec.terms.present) {
    for (const auto& v : spec.endo) {
      std::set<std::string> declared;
      auto it = spec.terms.terms.find(v.name);
      if (it != spec.terms.terms.end())
        for (const auto& t : it->second) declared.insert(t.vars.begin(), t.vars.end());
      std::set<std::string> actual;
      for (int p : v.parents) actual.insert(spec.endo[p].name);
      if (declared != actual) {
        std::string a, d;
        for (const auto& s : actual) a += (a.empty() ? "" : ",") + s;
        for (const auto& s : declared) d += (d.empty() ? "" : ",") + s;
        throw ParseError("terms of " + v.name + " cover {" + d + "} but its mechanism reads {" + a + "}");
      }
    }
    if (spec.terms.link != Link::Identity && !spec.endo[spec.y].mech.is_bernoulli_call())
      throw ParseError("link: " + link_name(spec.terms.link) + " requires Y := bernoulli(...)");
  }
  return spec;
}

ScmSpec load_scm(const std::string& path_or_name) {
  std::ifstream f(path_or_name);
  if (!f) {
    auto names = builtin_names();
    std::string key = path_or_name;
    if (key.rfind("builtin:", 0) == 0) key = key.substr(8);
    if (std::find(names.begin(), names.end(), key) != names.end() || key.rfind("C-", 0) == 0)
      return builtin_scm(key);
    throw Error("cannot open SCM file '" + path_or_name + "'");
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scm(ss.str());
}

}  // namespace variata
