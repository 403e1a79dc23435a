#include <map>

#include "variata/error.hpp"
#include "variata/scm.hpp"

namespace variata {

namespace {

// Shared pieces of the synthetic models.
const char* kGaussianZ = R"(exo eZ1 ~ normal(0, 1)
exo eZ2 ~ normal(0, 1)
exo eZ3 ~ normal(0, 1)
)";

const char* kNoise = R"(exo e1 ~ normal(0, 1)
exo e2 ~ normal(0, 1)
exo e3 ~ normal(0, 1)
exo eta ~ normal(0, 1)
)";

const char* kZ = R"(endo Z1 role=Z := eZ1
endo Z2 role=Z := eZ2
endo Z3 role=Z := eZ3
)";

const char* kX = "endo X role=X := bernoulli(expit(0.3*Z1 - 0.2*Z2 + 0.5*Z3 + 0.2*Z1^2))\n";

const char* kW_linear = R"(endo W1 role=W := 0.4*Z1 + 0.1*Z2 - 0.3*Z3 + 0.5*X + e1
endo W2 role=W := 0.2*Z1 - 0.1*Z2 + 0.3*Z3 + 0.4*X + e2
endo W3 role=W := 0.3*Z1 - 0.2*Z2 + 0.1*Z3 + 0.3*X + e3
)";

const char* kW_sparse = R"(endo W1 role=W := 0.3*Z1^2 + e1
endo W2 role=W := 0.5*Z2 + e2
endo W3 role=W := 0.4*X + e3
)";

const char* kTerms_linear = R"(terms:
  X: Z1, Z2, Z3
  W1: Z1, Z2, Z3, X
  W2: Z1, Z2, Z3, X
  W3: Z1, Z2, Z3, X
)";

const char* kTerms_sparse = R"(terms:
  X: Z1, Z2, Z3
  W1: Z1
  W2: Z2
  W3: X
)";

std::string m1() {
  return std::string("scm M1\n") + kGaussianZ + kNoise + kZ + kX + kW_linear +
         "endo Y role=Y := 0.5*W1 + 0.4*W2 + 0.3*W3 + 0.2*Z1 + 0.1*Z2 + 0.4*Z3 + 0.7*X + 0.2*X*W1 + eta\n" +
         kTerms_linear + "  Y: W1, W2, W3, Z1, Z2, Z3, X, X*W1\n";
}

std::string m2() {
  return std::string(R"(scm M2
exo eZ1 ~ exponential(1)
exo eZ2 ~ normal(5, 1)
exo eZ3 ~ uniform(-2, 2)
)") + kNoise + kZ + kX +
         R"(endo W1 role=W := 0.3*Z1 - 0.5*Z2 + 0.2*Z3 + 0.2*X + e1
endo W2 role=W := -0.1*Z1 + 0.3*Z2 + 0.1*Z3 + 0.1*X + e2
endo W3 role=W := 0.2*Z1 + 0.2*Z2 - 0.3*Z3 + 0.4*X + e3
endo Y role=Y := 0.4*W1 + 0.3*W2 + 0.2*W3 + 0.1*Z1 + 0.3*Z2 + 0.2*Z3 + 0.4*X + (0.1*W1 - 0.3*W2 - 0.3*W3)*(0.1*Z1 - 0.2*Z2 + 0.2*Z3) + eta
)" + kTerms_linear +
         "  Y: W1, W2, W3, Z1, Z2, Z3, X, W1*Z1, W1*Z2, W1*Z3, W2*Z1, W2*Z2, W2*Z3, W3*Z1, W3*Z2, W3*Z3\n";
}

std::string m3() {
  return std::string("scm M3\n") + kGaussianZ + kNoise + kZ + kX + kW_sparse +
         "endo Y role=Y := 0.3*W1 + 0.2*W2 + 0.1*W3 + 0.2*Z1 + 0.1*Z2 + 0.3*Z3 + eta\n" +
         kTerms_sparse + "  Y: W1, W2, W3, Z1, Z2, Z3\n";
}

std::string m4() {
  return std::string("scm M4\n") + kGaussianZ + kNoise + kZ + kX + kW_linear +
         "endo Y role=Y := 0.5*W1 + 0.4*W2 + 0.3*W3 + 0.2*Z1 + 0.1*Z2 + 0.4*Z3 + 0.3*X*Z1 + eta\n" +
         kTerms_linear + "  Y: W1, W2, W3, Z1, Z2, Z3, X*Z1\n";
}

std::string m5() {
  return std::string("scm M5\n") + kGaussianZ + kNoise + kZ + kX + kW_sparse +
         "endo Y role=Y := 0.4*W1 + 0.3*W2 + 0.2*W3 + 0.2*Z1 + 0.1*Z2 + 0.3*Z3 + 0.5*X*Z1*W3 - 0.4*Z2*W3 + X*Z3 + eta\n" +
         kTerms_sparse + "  Y: W1, W2, W3, Z1, Z2, Z3, X*Z1*W3, Z2*W3, X*Z3\n";
}

// Small binary fixtures share Z <- Bern(0.5), X <- Bern(0.5 + 0.2 Z).
std::string fixture(const std::string& name, const std::string& w, const std::string& y,
                    const std::string& w_terms, const std::string& y_terms) {
  std::string s = "scm " + name + "\n";
  s += "endo Z role=Z := bernoulli(0.5)\n";
  s += "endo X role=X := bernoulli(0.5 + 0.2*Z)\n";
  if (!w.empty()) s += "endo W role=W := " + w + "\n";
  s += "endo Y role=Y := " + y + "\n";
  s += "terms:\n  X: Z\n";
  if (!w.empty()) s += "  W: " + w_terms + "\n";
  s += "  Y: " + y_terms + "\n";
  return s;
}

struct Entry {
  std::string canonical;
  std::string alias;
  std::string text;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = {
      {"M1", "", m1()},
      {"M2", "", m2()},
      {"M3", "", m3()},
      {"M4", "", m4()},
      {"M5", "", m5()},
      {"C1", "C-te-se", fixture("C-te-se", "", "X + Z + X*Z", "", "X, Z, X*Z")},
      {"C2", "C-de-ie", R"(scm C-de-ie
endo X role=X := bernoulli(0.5)
endo W role=W := bernoulli(0.5 + 0.1*X)
endo Y role=Y := X + W + X*W
terms:
  W: X
  Y: X, W, X*W
)"},
      {"C3", "C-ie-se-a", fixture("C-ie-se-a", "X + Z", "Z*W", "X, Z", "Z*W")},
      {"C4", "C-ie-se-b", fixture("C-ie-se-b", "X + Z", "W^2", "X, Z", "W~nl")},
      {"C5", "C-ie-se-c", fixture("C-ie-se-c", "X*Z", "W", "X*Z", "W")},
      {"C6", "C-de-ie-se-a", fixture("C-de-ie-se-a", "X + Z", "X*Z*W", "X, Z", "X*Z*W")},
      {"C7", "C-de-ie-se-b", fixture("C-de-ie-se-b", "X + Z", "X*W^2", "X, Z", "X*W~nl")},
      {"C8", "C-de-ie-se-c", fixture("C-de-ie-se-c", "X*Z", "X*W", "X*Z", "X*W")},
      {"C9", "C-ex2-m1", R"(scm C-ex2-m1
endo Z role=Z := bernoulli(0.5)
endo X role=X := bernoulli(0.5)
endo Y role=Y := X + Z + X*Z
terms:
  Y: X, Z, X*Z
)"},
      {"C10", "C-ex2-m2", R"(scm C-ex2-m2
endo Z role=Z := bernoulli(0.5)
endo X role=X := bernoulli(0.5 + 0.1*Z)
endo Y role=Y := X + Z
terms:
  X: Z
  Y: X, Z
)"},
      {"C11", "C-ex2-m3", R"(scm C-ex2-m3
endo X role=X := bernoulli(0.5)
endo W role=W := bernoulli(0.5)
endo Y role=Y := X + W + X*W
terms:
  Y: X, W, X*W
)"},
      {"C12", "C-ex2-m4", R"(scm C-ex2-m4
endo X role=X := bernoulli(0.5)
endo W role=W := bernoulli(0.5 + 0.1*X)
endo Y role=Y := X + W
terms:
  W: X
  Y: X, W
)"},
      {"C13", "C-ex4", R"(scm C-ex4
exo eZ ~ normal(0, 1)
exo eW ~ normal(0, 1)
endo Z role=Z := eZ
endo X role=X := bernoulli(expit(Z))
endo W role=W := eW + Z
endo Y role=Y := W + X*W^2
terms:
  X: Z
  W: Z
  Y: W~nl, X*W~nl
)"},
      {"C14", "C-ex7", R"(scm C-ex7
endo Z role=Z := bernoulli(0.5)
endo X role=X := bernoulli(0.5)
endo W role=W := 1 - X
endo Y role=Y := (2*Z - 1)*X*W
terms:
  W: X
  Y: Z*X*W
)"},
      {"C15", "C-ex13", R"(scm C-ex13
endo Z role=Z := bernoulli(0.5)
endo X role=X := bernoulli(0.5)
endo W role=W := bernoulli(0.5 + 0.1*X)
endo Y role=Y := bernoulli(exp(X + X*Z + W - 3))
terms:
  W: X
  Y: X, X*Z, W
  link: log
)"},
      {"C16", "C-ex7-noisy", R"(scm C-ex7-noisy
endo Z role=Z := bernoulli(0.5)
endo X role=X := bernoulli(0.5)
endo W role=W := bernoulli(0.9 - 0.8*X)
endo Y role=Y := (2*Z - 1)*X*W
terms:
  W: X
  Y: Z*X*W
)"},
  };
  return r;
}

const Entry& find(const std::string& name) {
  for (const auto& e : registry())
    if (e.canonical == name || (!e.alias.empty() && e.alias == name)) return e;
  throw Error("unknown builtin SCM '" + name + "'");
}

}  // namespace

std::string builtin_source(const std::string& name) { return find(name).text; }

ScmSpec builtin_scm(const std::string& name) { return parse_scm(find(name).text); }

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) {
    out.push_back(e.canonical);
    if (!e.alias.empty()) out.push_back(e.alias);
  }
  return out;
}

}  // namespace variata
