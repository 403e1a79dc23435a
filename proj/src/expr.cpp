#include "variata/expr.hpp"

#include <cctype>
#include <map>
#include <set>

#include "variata/error.hpp"

namespace variata {

Rational parse_decimal(const std::string& s) {
  std::size_t i = 0;
  boost::multiprecision::cpp_int mant = 0;
  int scale = 0;
  bool any = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    mant = mant * 10 + (s[i] - '0');
    ++i;
    any = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      mant = mant * 10 + (s[i] - '0');
      --scale;
      ++i;
      any = true;
    }
  }
  if (!any) throw ParseError("malformed number '" + s + "'");
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    int sign = 1;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      if (s[i] == '-') sign = -1;
      ++i;
    }
    int e = 0;
    bool digits = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      e = e * 10 + (s[i] - '0');
      ++i;
      digits = true;
    }
    if (!digits) throw ParseError("malformed exponent in '" + s + "'");
    scale += sign * e;
  }
  if (i != s.size()) throw ParseError("malformed number '" + s + "'");
  boost::multiprecision::cpp_int p10 = 1;
  for (int k = 0; k < (scale < 0 ? -scale : scale); ++k) p10 *= 10;
  if (scale >= 0) return Rational(mant * p10);
  return Rational(mant, p10);
}

namespace {

const std::map<std::string, Fn>& functions() {
  static const std::map<std::string, Fn> f = {
      {"exp", Fn::Exp},     {"log", Fn::Log}, {"logit", Fn::Logit}, {"expit", Fn::Expit},
      {"sqrt", Fn::Sqrt},   {"abs", Fn::Abs}, {"ind", Fn::Ind},     {"min", Fn::Min},
      {"max", Fn::Max},     {"bernoulli", Fn::Bernoulli}};
  return f;
}

int arity(Fn f) {
  switch (f) {
    case Fn::Min:
    case Fn::Max:
      return 2;
    default:
      return 1;
  }
}

class Parser {
 public:
  Parser(const std::string& s, std::vector<Node>& out) : s_(s), nodes_(out) {}

  int parse() {
    int r = cmp();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  const std::string& s_;
  std::vector<Node>& nodes_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError("expression '" + s_ + "': " + msg + " at column " + std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(const char* tok) {
    skip();
    std::size_t len = std::char_traits<char>::length(tok);
    if (s_.compare(pos_, len, tok) == 0) {
      pos_ += len;
      return true;
    }
    return false;
  }

  int add_node(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int binary(Op op, int a, int b) {
    Node n;
    n.op = op;
    n.kids = {a, b};
    return add_node(std::move(n));
  }

  int cmp() {
    int a = add();
    static const std::pair<const char*, Op> ops[] = {{"<=", Op::Le}, {">=", Op::Ge}, {"==", Op::Eq},
                                                     {"!=", Op::Ne}, {"<", Op::Lt},  {">", Op::Gt}};
    for (const auto& [tok, op] : ops) {
      if (eat(tok)) return binary(op, a, add());
    }
    return a;
  }

  int add() {
    int a = mul();
    for (;;) {
      if (eat("+"))
        a = binary(Op::Add, a, mul());
      else if (eat("-"))
        a = binary(Op::Sub, a, mul());
      else
        return a;
    }
  }

  int mul() {
    int a = unary();
    for (;;) {
      if (eat("*"))
        a = binary(Op::Mul, a, unary());
      else if (eat("/"))
        a = binary(Op::Div, a, unary());
      else
        return a;
    }
  }

  int unary() {
    if (eat("-")) {
      Node n;
      n.op = Op::Neg;
      n.kids = {unary()};
      return add_node(std::move(n));
    }
    if (eat("+")) return unary();
    return power();
  }

  int power() {
    int base = primary();
    if (eat("^")) return binary(Op::Pow, base, unary());
    return base;
  }

  int primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      int r = cmp();
      if (!eat(")")) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      Node n;
      n.op = Op::Num;
      n.rnum = parse_decimal(s_.substr(start, pos_ - start));
      n.num = static_cast<double>(n.rnum);
      return add_node(std::move(n));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        auto it = functions().find(id);
        if (it == functions().end()) fail("unknown function '" + id + "'");
        ++pos_;
        Node n;
        n.op = Op::Call;
        n.fn = it->second;
        n.name = id;
        n.kids.push_back(cmp());
        while (eat(",")) n.kids.push_back(cmp());
        if (!eat(")")) fail("expected ')' after arguments of " + id);
        if (static_cast<int>(n.kids.size()) != arity(n.fn))
          fail(id + " takes " + std::to_string(arity(n.fn)) + " argument(s)");
        return add_node(std::move(n));
      }
      Node n;
      n.op = Op::Var;
      n.name = id;
      return add_node(std::move(n));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.text_ = text;
  Parser p(text, e.nodes_);
  e.root_ = p.parse();
  return e;
}

std::vector<std::string> Expr::identifiers() const {
  // Nodes are created children-first, so scanning in creation order does not
  // give source order; walk the tree instead.
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::function<void(int)> walk = [&](int i) {
    const Node& n = nodes_[i];
    if (n.op == Op::Var && seen.insert(n.name).second) out.push_back(n.name);
    for (int k : n.kids) walk(k);
  };
  if (root_ >= 0) walk(root_);
  return out;
}

int Expr::bernoulli_count() const {
  int c = 0;
  for (const auto& n : nodes_)
    if (n.op == Op::Call && n.fn == Fn::Bernoulli) ++c;
  return c;
}

bool Expr::is_bernoulli_call() const {
  return root_ >= 0 && nodes_[root_].op == Op::Call && nodes_[root_].fn == Fn::Bernoulli;
}

void Expr::resolve(const std::function<std::pair<bool, int>(const std::string&)>& lookup) {
  for (auto& n : nodes_) {
    if (n.op != Op::Var) continue;
    auto [exo, slot] = lookup(n.name);
    n.exo = exo;
    n.slot = slot;
  }
}

void Expr::bind_bernoulli(int k, int exo_slot) {
  int c = 0;
  for (auto& n : nodes_) {
    if (n.op == Op::Call && n.fn == Fn::Bernoulli) {
      if (c == k) {
        n.slot = exo_slot;
        return;
      }
      ++c;
    }
  }
  throw Error("bind_bernoulli: index out of range");
}

}  // namespace variata
