#pragma once

// Analytic expressions in the surface parameters u1,u2 and the ambient
// coordinates x1..xm: parsing, printing, symbolic differentiation and
// evaluation over any scalar type (double, Jet1, Jet2).
//
// Grammar (standard precedence, left-associative):
//
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := ('-' | '+') unary | power
//   power    := primary ('^' exponent)*
//   exponent := ('-' | '+')? primary          must fold to a constant
//   primary  := number | ident '(' expr ')' | ident | '(' expr ')'
//
// `pi` is the constant π. Any other identifier not followed by '(' is a
// variable; whether it is bound is only checked at evaluation time.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "psurf/error.hpp"
#include "psurf/jet.hpp"

namespace psurf {

enum class Func { sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, neg };
enum class BinOp { add, sub, mul, div, pow };

inline const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::tan: return "tan";
    case Func::sinh: return "sinh";
    case Func::cosh: return "cosh";
    case Func::tanh: return "tanh";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::neg: return "-";
  }
  return "?";
}

inline std::optional<Func> func_from_name(std::string_view name) {
  static constexpr Func all[] = {Func::sin,  Func::cos,  Func::tan, Func::sinh, Func::cosh,
                                 Func::tanh, Func::exp,  Func::log, Func::sqrt};
  for (Func f : all)
    if (name == func_name(f)) return f;
  return std::nullopt;
}

/// Evaluation slot of a variable name: u1 -> 0, u2 -> 1, xk -> k + 1.
/// Returns -1 for names that can never be bound.
inline int variable_slot(std::string_view name) {
  if (name == "u1") return 0;
  if (name == "u2") return 1;
  if (name.size() >= 2 && name[0] == 'x' && name[1] != '0') {
    int k = 0;
    for (char c : name.substr(1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
      k = k * 10 + (c - '0');
      if (k > 4096) return -1;
    }
    return k + 1;
  }
  return -1;
}

inline std::string coordinate_name(int k) { return "x" + std::to_string(k); }

/// Immutable expression tree. Copies share structure.
class Expr {
public:
  enum class Kind { constant, variable, unary, binary };

  struct Node {
    Kind kind = Kind::constant;
    double value = 0.0;
    std::string name;
    int slot = -1;
    Func func = Func::neg;
    BinOp op = BinOp::add;
    std::shared_ptr<const Node> lhs, rhs;
  };

  Expr() : Expr(constant(0.0)) {}

  // Raw constructors; no folding.
  static Expr constant(double c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = c;
    return Expr(std::move(n));
  }
  static Expr variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->slot = variable_slot(name);
    n->name = std::move(name);
    return Expr(std::move(n));
  }
  static Expr unary(Func f, const Expr& a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::unary;
    n->func = f;
    n->lhs = a.node_;
    return Expr(std::move(n));
  }
  static Expr binary(BinOp op, const Expr& a, const Expr& b) {
    if (op == BinOp::pow && !b.is_constant())
      throw Error("exponent of '^' must be a constant");
    auto n = std::make_shared<Node>();
    n->kind = Kind::binary;
    n->op = op;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expr(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  bool is_constant() const { return node_->kind == Kind::constant; }
  bool is_constant(double c) const { return is_constant() && node_->value == c; }
  double constant_value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  int slot() const { return node_->slot; }
  Func func() const { return node_->func; }
  BinOp op() const { return node_->op; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }

  const Node* raw() const { return node_.get(); }

private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Folding constructors: constant folding plus the 0/1 identities.

namespace detail {

inline bool integral_exponent(double c, int& n) {
  if (std::floor(c) != c || std::fabs(c) > 1e9) return false;
  n = static_cast<int>(c);
  return true;
}

inline std::optional<double> fold_unary(Func f, double a) {
  switch (f) {
    case Func::sin: return std::sin(a);
    case Func::cos: return std::cos(a);
    case Func::tan: return std::tan(a);
    case Func::sinh: return std::sinh(a);
    case Func::cosh: return std::cosh(a);
    case Func::tanh: return std::tanh(a);
    case Func::exp: return std::exp(a);
    case Func::log: if (a > 0.0) return std::log(a); break;
    case Func::sqrt: if (a >= 0.0) return std::sqrt(a); break;
    case Func::neg: return -a;
  }
  return std::nullopt;  // leave domain errors for evaluation time
}

}  // namespace detail

inline Expr apply(Func f, const Expr& a) {
  if (a.is_constant())
    if (auto v = detail::fold_unary(f, a.constant_value())) return Expr::constant(*v);
  if (f == Func::neg && a.kind() == Expr::Kind::unary && a.func() == Func::neg) return a.lhs();
  return Expr::unary(f, a);
}

inline Expr neg(const Expr& a) { return apply(Func::neg, a); }

inline Expr add(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.constant_value() + b.constant_value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::binary(BinOp::add, a, b);
}

inline Expr sub(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.constant_value() - b.constant_value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return neg(b);
  return Expr::binary(BinOp::sub, a, b);
}

inline Expr mul(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.constant_value() * b.constant_value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return neg(b);
  if (b.is_constant(-1.0)) return neg(a);
  return Expr::binary(BinOp::mul, a, b);
}

inline Expr div(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
    return Expr::constant(a.constant_value() / b.constant_value());
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  return Expr::binary(BinOp::div, a, b);
}

inline Expr pow(const Expr& a, double c) {
  if (c == 0.0) return Expr::constant(1.0);
  if (c == 1.0) return a;
  if (a.is_constant()) {
    int n;
    const double base = a.constant_value();
    if (detail::integral_exponent(c, n)) {
      if (!(n < 0 && base == 0.0)) return Expr::constant(std::pow(base, n));
    } else if (base > 0.0) {
      return Expr::constant(std::exp(c * std::log(base)));
    }
  }
  return Expr::binary(BinOp::pow, a, Expr::constant(c));
}

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }

/// Rebuilds `e` bottom-up through the folding constructors.
inline Expr fold_constants(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::constant:
    case Expr::Kind::variable:
      return e;
    case Expr::Kind::unary:
      return apply(e.func(), fold_constants(e.lhs()));
    case Expr::Kind::binary: {
      const Expr a = fold_constants(e.lhs());
      const Expr b = fold_constants(e.rhs());
      switch (e.op()) {
        case BinOp::add: return add(a, b);
        case BinOp::sub: return sub(a, b);
        case BinOp::mul: return mul(a, b);
        case BinOp::div: return div(a, b);
        case BinOp::pow: return pow(a, b.constant_value());
      }
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline void print_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (v < 0.0 || (v == 0.0 && std::signbit(v))) {
    out += "(";
    out += buf;
    out += ")";
  } else {
    out += buf;
  }
}

inline void print(std::string& out, const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      print_number(out, e.constant_value());
      return;
    case Expr::Kind::variable:
      out += e.name();
      return;
    case Expr::Kind::unary:
      if (e.func() == Func::neg) {
        out += "(-";
        print(out, e.lhs());
        out += ")";
      } else {
        out += func_name(e.func());
        out += "(";
        print(out, e.lhs());
        out += ")";
      }
      return;
    case Expr::Kind::binary: {
      static constexpr const char* sym[] = {"+", "-", "*", "/", "^"};
      out += "(";
      print(out, e.lhs());
      out += sym[static_cast<int>(e.op())];
      print(out, e.rhs());
      out += ")";
      return;
    }
  }
}

}  // namespace detail

/// Deterministic, fully parenthesized serialization that re-parses to an
/// identically evaluating tree.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print(out, e);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse_all() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expression");
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < s_.size()) fail("operator or end of input");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& expected) const {
    // Offsets are reported 1-based; end of input is size() + 1.
    const std::size_t offset = pos_ + 1;
    std::string found = pos_ < s_.size() ? "'" + std::string(1, s_[pos_]) + "'" : "end of input";
    throw ParseError(offset, expected,
                     "syntax error at offset " + std::to_string(offset) + ": expected " +
                         expected + ", found " + found);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("\"") + c + "\"");
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = add(lhs, parse_term());
      else if (accept('-')) lhs = sub(lhs, parse_term());
      else return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = mul(lhs, parse_unary());
      else if (accept('/')) lhs = div(lhs, parse_unary());
      else return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return neg(parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    while (accept('^')) {
      skip_ws();
      const std::size_t at = pos_;
      bool negate = false;
      if (accept('-')) negate = true;
      else accept('+');
      Expr ex = parse_primary();
      if (negate) ex = neg(ex);
      if (!ex.is_constant()) {
        pos_ = at;
        fail("constant exponent");
      }
      base = pow(base, ex.constant_value());
    }
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("number, variable, function or \"(\"");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string ident(s_.substr(start, pos_ - start));
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        auto f = func_from_name(ident);
        if (!f) {
          const std::size_t offset = start + 1;
          throw ParseError(offset, "function name",
                           "unknown function '" + ident + "' at offset " + std::to_string(offset));
        }
        ++pos_;
        Expr arg = parse_expr();
        expect(')');
        return apply(*f, arg);
      }
      if (func_from_name(ident)) fail("\"(\" after function name");
      if (ident == "pi") return Expr::constant(M_PI);
      return Expr::variable(ident);
    }
    fail("number, variable, function or \"(\"");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail("digit");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("exponent digits");
    }
    const std::string token(s_.substr(start, pos_ - start));
    return Expr::constant(std::strtod(token.c_str(), nullptr));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text`; constants are folded during construction.
inline Expr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Differentiation

/// Exact partial derivative of `e` with respect to the variable `var`.
inline Expr differentiate(const Expr& e, const std::string& var) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return Expr::constant(0.0);
    case Expr::Kind::variable:
      return Expr::constant(e.name() == var ? 1.0 : 0.0);
    case Expr::Kind::unary: {
      const Expr a = e.lhs();
      const Expr da = differentiate(a, var);
      if (da.is_constant(0.0)) return da;
      switch (e.func()) {
        case Func::neg: return neg(da);
        case Func::sin: return da * apply(Func::cos, a);
        case Func::cos: return neg(da * apply(Func::sin, a));
        case Func::tan: return da / pow(apply(Func::cos, a), 2);
        case Func::sinh: return da * apply(Func::cosh, a);
        case Func::cosh: return da * apply(Func::sinh, a);
        case Func::tanh: return da * (Expr::constant(1.0) - pow(e, 2));
        case Func::exp: return da * e;
        case Func::log: return da / a;
        case Func::sqrt: return da / (Expr::constant(2.0) * e);
      }
      break;
    }
    case Expr::Kind::binary: {
      const Expr a = e.lhs();
      const Expr b = e.rhs();
      const Expr da = differentiate(a, var);
      switch (e.op()) {
        case BinOp::add: return da + differentiate(b, var);
        case BinOp::sub: return da - differentiate(b, var);
        case BinOp::mul: return da * b + a * differentiate(b, var);
        case BinOp::div: {
          const Expr db = differentiate(b, var);
          return da / b - a * db / pow(b, 2);
        }
        case BinOp::pow: {
          const double c = b.constant_value();
          return Expr::constant(c) * pow(a, c - 1.0) * da;
        }
      }
      break;
    }
  }
  return Expr::constant(0.0);
}

/// Names of all variables appearing in `e`.
inline std::set<std::string> variables(const Expr& e) {
  std::set<std::string> out;
  auto walk = [&](auto&& self, const Expr& n) -> void {
    switch (n.kind()) {
      case Expr::Kind::constant: return;
      case Expr::Kind::variable: out.insert(n.name()); return;
      case Expr::Kind::unary: self(self, n.lhs()); return;
      case Expr::Kind::binary: self(self, n.lhs()); self(self, n.rhs()); return;
    }
  };
  walk(walk, e);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Variable bindings for evaluation over scalar type T.
template <class T>
class Env {
public:
  Env& bind(std::string_view name, T v) {
    const int slot = variable_slot(name);
    if (slot < 0) throw EvalError("cannot bind variable '" + std::string(name) + "'");
    if (static_cast<std::size_t>(slot) >= slots_.size()) slots_.resize(slot + 1);
    slots_[slot] = std::move(v);
    return *this;
  }
  Env& bind_u(T u1, T u2) {
    bind("u1", std::move(u1));
    return bind("u2", std::move(u2));
  }
  /// Binds x1..xn to the given values.
  template <class Range>
  Env& bind_x(const Range& xs) {
    int k = 1;
    for (const auto& v : xs) bind(coordinate_name(k++), T(v));
    return *this;
  }

  const T* lookup(int slot) const {
    if (slot < 0 || static_cast<std::size_t>(slot) >= slots_.size() || !slots_[slot]) return nullptr;
    return &*slots_[slot];
  }

private:
  std::vector<std::optional<T>> slots_;
};

namespace detail {

[[noreturn]] inline void domain_error(const char* what, const Expr& sub) {
  throw EvalError(std::string("domain error: ") + what + " in " + to_string(sub));
}

inline double pow_int(double a, int n) { return std::pow(a, n); }
inline double pow_real(double a, double c) { return std::pow(a, c); }

template <class T>
T evaluate(const Expr& e, const Env<T>& env) {
  using std::cos; using std::cosh; using std::exp; using std::log; using std::sin;
  using std::sinh; using std::sqrt; using std::tan; using std::tanh;
  switch (e.kind()) {
    case Expr::Kind::constant:
      return T(e.constant_value());
    case Expr::Kind::variable: {
      const T* v = env.lookup(e.slot());
      if (!v) throw EvalError("unbound variable '" + e.name() + "'");
      return *v;
    }
    case Expr::Kind::unary: {
      const T a = evaluate(e.lhs(), env);
      const double av = value(a);
      switch (e.func()) {
        case Func::neg: return -a;
        case Func::sin: return sin(a);
        case Func::cos: return cos(a);
        case Func::tan: return tan(a);
        case Func::sinh: return sinh(a);
        case Func::cosh: return cosh(a);
        case Func::tanh: return tanh(a);
        case Func::exp: return exp(a);
        case Func::log:
          if (!(av > 0.0)) domain_error("log of non-positive value", e);
          return log(a);
        case Func::sqrt:
          if (av < 0.0) domain_error("sqrt of negative value", e);
          if constexpr (!std::is_same_v<T, double>)
            if (av == 0.0) domain_error("sqrt derivative at zero", e);
          return sqrt(a);
      }
      break;
    }
    case Expr::Kind::binary: {
      const T a = evaluate(e.lhs(), env);
      if (e.op() == BinOp::pow) {
        const double c = e.rhs().constant_value();
        int n;
        if (integral_exponent(c, n)) {
          if (n < 0 && value(a) == 0.0) domain_error("division by zero", e);
          return pow_int(a, n);
        }
        if (!(value(a) > 0.0)) domain_error("non-integer power of non-positive base", e);
        return pow_real(a, c);
      }
      const T b = evaluate(e.rhs(), env);
      switch (e.op()) {
        case BinOp::add: return a + b;
        case BinOp::sub: return a - b;
        case BinOp::mul: return a * b;
        case BinOp::div:
          if (value(b) == 0.0) domain_error("division by zero", e);
          return a / b;
        case BinOp::pow: break;
      }
      break;
    }
  }
  throw EvalError("malformed expression");
}

}  // namespace detail

/// IEEE double evaluation.
inline double eval(const Expr& e, const Env<double>& env) { return detail::evaluate(e, env); }

/// Evaluation over an arbitrary scalar (Jet1, Jet2, ...).
template <class T>
T eval_as(const Expr& e, const Env<T>& env) {
  return detail::evaluate(e, env);
}

/// Second-order jet of `e` at the parameter point (u1, u2). `extra` may bind
/// further variables (e.g. ambient coordinates) to jets; u1/u2 are always
/// bound to the coordinate jets at the point.
inline Jet2 eval_jet(const Expr& e, double u1, double u2, Env<Jet2> extra = {}) {
  extra.bind_u(Jet2::seed_u1(u1), Jet2::seed_u2(u2));
  return detail::evaluate(e, extra);
}

inline double eval_at(const Expr& e, double u1, double u2) {
  Env<double> env;
  env.bind_u(u1, u2);
  return eval(e, env);
}

}  // namespace psurf
