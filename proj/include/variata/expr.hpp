#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace variata {

using Rational = boost::multiprecision::cpp_rational;

enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Lt, Le, Gt, Ge, Eq, Ne, Call };
enum class Fn { Exp, Log, Logit, Expit, Sqrt, Abs, Ind, Min, Max, Bernoulli };

struct Node {
  Op op = Op::Num;
  Fn fn = Fn::Exp;
  std::vector<int> kids;
  double num = 0.0;
  Rational rnum = 0;
  std::string name;  // identifier for Var nodes
  int slot = -1;     // resolved slot (Var) or implicit-uniform slot (bernoulli)
  bool exo = false;  // Var refers to an exogenous slot
};

// Parsed arithmetic expression. Grammar (lowest to highest precedence):
//   cmp   := add [(< | <= | > | >= | == | !=) add]
//   add   := mul {(+ | -) mul}
//   mul   := unary {(* | /) unary}
//   unary := - unary | pow
//   pow   := primary [^ unary]
//   primary := number | ident | ident ( args ) | ( cmp )
// Functions: exp log logit expit sqrt abs ind min max bernoulli.
class Expr {
 public:
  Expr() = default;
  static Expr parse(const std::string& text);

  const std::string& text() const { return text_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

  // Unique identifiers in order of first appearance.
  std::vector<std::string> identifiers() const;
  int bernoulli_count() const;
  // True if the whole expression is a single bernoulli(p) call.
  bool is_bernoulli_call() const;

  // Binds every identifier to (is_exogenous, slot). Throws on unknown names.
  void resolve(const std::function<std::pair<bool, int>(const std::string&)>& lookup);
  // Binds the k-th bernoulli call (in parse order) to an exogenous uniform slot.
  void bind_bernoulli(int k, int exo_slot);

 private:
  std::string text_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Parses a decimal literal ("0.25", "3", "1e-3") into an exact rational.
Rational parse_decimal(const std::string& s);

}  // namespace variata
