#pragma once

// Expression evaluation, generic over the number type (double for sampling and
// Monte-Carlo, Rational for exact enumeration).

#include <cmath>
#include <exception>

#include "variata/error.hpp"
#include "variata/expr.hpp"

namespace variata::detail {

// Thrown when an exact rational evaluation meets an irrational operation; the
// caller retries in double precision.
struct NonRational : std::exception {
  const char* what() const noexcept override { return "non-rational operation"; }
};

template <class T>
struct Num;

template <>
struct Num<double> {
  static double lit(const Node& n) { return n.num; }
  static double exp(double a) { return std::exp(a); }
  static double log(double a) { return std::log(a); }
  static double logit(double a) { return std::log(a / (1.0 - a)); }
  static double expit(double a) {
    if (a >= 0) return 1.0 / (1.0 + std::exp(-a));
    double e = std::exp(a);
    return e / (1.0 + e);
  }
  static double sqrt(double a) { return std::sqrt(a); }
  static double abs(double a) { return std::fabs(a); }
  static double pow(double a, double b) { return std::pow(a, b); }
  static double div(double a, double b) { return a / b; }
  static double to_double(double a) { return a; }
};

template <>
struct Num<Rational> {
  static Rational lit(const Node& n) { return n.rnum; }
  static Rational exp(const Rational&) { throw NonRational(); }
  static Rational log(const Rational&) { throw NonRational(); }
  static Rational logit(const Rational&) { throw NonRational(); }
  static Rational expit(const Rational&) { throw NonRational(); }
  static Rational sqrt(const Rational&) { throw NonRational(); }
  static Rational abs(const Rational& a) { return a < 0 ? Rational(-a) : a; }
  static Rational pow(const Rational& a, const Rational& b) {
    if (boost::multiprecision::denominator(b) != 1) throw NonRational();
    boost::multiprecision::cpp_int e = boost::multiprecision::numerator(b);
    bool neg = e < 0;
    if (neg) e = -e;
    if (e > 64) throw NonRational();
    Rational r = 1;
    for (int k = 0; k < static_cast<int>(e); ++k) r *= a;
    if (neg) {
      if (r == 0) throw Error("division by zero in power");
      r = Rational(1) / r;
    }
    return r;
  }
  static Rational div(const Rational& a, const Rational& b) {
    if (b == 0) throw Error("division by zero");
    return a / b;
  }
  static double to_double(const Rational& a) { return static_cast<double>(a); }
};

// Ctx must provide:
//   T var(const Node& n)                      value of a Var node
//   T bernoulli(const Node& n, const T& p)    draw for a bernoulli(p) call
template <class T, class Ctx>
T eval_node(const Expr& e, int i, Ctx& ctx) {
  const Node& n = e.nodes()[i];
  using N = Num<T>;
  auto kid = [&](int k) { return eval_node<T>(e, n.kids[k], ctx); };
  switch (n.op) {
    case Op::Num:
      return N::lit(n);
    case Op::Var:
      return ctx.var(n);
    case Op::Neg:
      return T(-kid(0));
    case Op::Add:
      return T(kid(0) + kid(1));
    case Op::Sub:
      return T(kid(0) - kid(1));
    case Op::Mul:
      return T(kid(0) * kid(1));
    case Op::Div:
      return N::div(kid(0), kid(1));
    case Op::Pow:
      return N::pow(kid(0), kid(1));
    case Op::Lt:
      return kid(0) < kid(1) ? T(1) : T(0);
    case Op::Le:
      return kid(0) <= kid(1) ? T(1) : T(0);
    case Op::Gt:
      return kid(0) > kid(1) ? T(1) : T(0);
    case Op::Ge:
      return kid(0) >= kid(1) ? T(1) : T(0);
    case Op::Eq:
      return kid(0) == kid(1) ? T(1) : T(0);
    case Op::Ne:
      return kid(0) != kid(1) ? T(1) : T(0);
    case Op::Call:
      switch (n.fn) {
        case Fn::Exp:
          return N::exp(kid(0));
        case Fn::Log:
          return N::log(kid(0));
        case Fn::Logit:
          return N::logit(kid(0));
        case Fn::Expit:
          return N::expit(kid(0));
        case Fn::Sqrt:
          return N::sqrt(kid(0));
        case Fn::Abs:
          return N::abs(kid(0));
        case Fn::Ind:
          return kid(0) != T(0) ? T(1) : T(0);
        case Fn::Min: {
          T a = kid(0), b = kid(1);
          return a < b ? a : b;
        }
        case Fn::Max: {
          T a = kid(0), b = kid(1);
          return a < b ? b : a;
        }
        case Fn::Bernoulli: {
          T p = kid(0);
          return ctx.bernoulli(n, p);
        }
      }
  }
  throw Error("corrupt expression tree");
}

template <class T, class Ctx>
T eval_expr(const Expr& e, Ctx& ctx) {
  return eval_node<T>(e, e.root(), ctx);
}

}  // namespace variata::detail
