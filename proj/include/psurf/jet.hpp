#pragma once

// Truncated Taylor arithmetic in the two surface parameters (u1, u2).
//
// Jet1 carries a value and its two first partials; Jet2 additionally carries
// the three second partials (the mixed partial is stored once). Every
// operation applies the exact product/chain rule truncated at the jet order.
//
// Second order is the deepest demand anywhere in the library: a nested
// bracket {f,{h,k}} differentiates {h,k} once, and {h,k} itself consumes
// only first partials of h and k, so the nested bracket needs second
// partials of the embedding and nothing beyond.

#include <cmath>
#include <ostream>
#include <type_traits>

#include "psurf/error.hpp"

namespace psurf {

struct Jet1 {
  double val = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  constexpr Jet1() = default;
  constexpr Jet1(double v) : val(v) {}  // NOLINT: constants promote implicitly
  constexpr Jet1(double v, double a, double b) : val(v), d1(a), d2(b) {}

  constexpr double d(int a) const { return a == 0 ? d1 : d2; }

  static constexpr Jet1 constant(double c) { return Jet1{c}; }
  static constexpr Jet1 seed_u1(double u1) { return {u1, 1.0, 0.0}; }
  static constexpr Jet1 seed_u2(double u2) { return {u2, 0.0, 1.0}; }
};

struct Jet2 {
  double val = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d12 = 0.0;
  double d22 = 0.0;

  constexpr Jet2() = default;
  constexpr Jet2(double v) : val(v) {}  // NOLINT
  constexpr Jet2(double v, double a, double b, double aa, double ab, double bb)
      : val(v), d1(a), d2(b), d11(aa), d12(ab), d22(bb) {}

  constexpr double d(int a) const { return a == 0 ? d1 : d2; }
  constexpr double dd(int a, int b) const {
    if (a != b) return d12;
    return a == 0 ? d11 : d22;
  }

  static constexpr Jet2 constant(double c) { return Jet2{c}; }
  static constexpr Jet2 seed_u1(double u1) { return {u1, 1.0, 0.0, 0.0, 0.0, 0.0}; }
  static constexpr Jet2 seed_u2(double u2) { return {u2, 0.0, 1.0, 0.0, 0.0, 0.0}; }
};

/// Drops the second-order slots.
constexpr Jet1 truncate(const Jet2& j) { return {j.val, j.d1, j.d2}; }

/// The first partial ∂_a of a second-order jet, as a first-order jet.
constexpr Jet1 partial(const Jet2& j, int a) {
  return a == 0 ? Jet1{j.d1, j.d11, j.d12} : Jet1{j.d2, j.d12, j.d22};
}

constexpr double value(double x) { return x; }
constexpr double value(const Jet1& x) { return x.val; }
constexpr double value(const Jet2& x) { return x.val; }

// ---------------------------------------------------------------------------
// Chain rule: f0 = f(a), f1 = f'(a), f2 = f''(a)

constexpr Jet1 chain(const Jet1& a, double f0, double f1, double /*f2*/) {
  return {f0, f1 * a.d1, f1 * a.d2};
}

constexpr Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
  return {f0,
          f1 * a.d1,
          f1 * a.d2,
          f2 * a.d1 * a.d1 + f1 * a.d11,
          f2 * a.d1 * a.d2 + f1 * a.d12,
          f2 * a.d2 * a.d2 + f1 * a.d22};
}

// ---------------------------------------------------------------------------
// Jet1 arithmetic

constexpr Jet1 operator+(const Jet1& a) { return a; }
constexpr Jet1 operator-(const Jet1& a) { return {-a.val, -a.d1, -a.d2}; }
constexpr Jet1 operator+(const Jet1& a, const Jet1& b) {
  return {a.val + b.val, a.d1 + b.d1, a.d2 + b.d2};
}
constexpr Jet1 operator-(const Jet1& a, const Jet1& b) {
  return {a.val - b.val, a.d1 - b.d1, a.d2 - b.d2};
}
constexpr Jet1 operator*(const Jet1& a, const Jet1& b) {
  return {a.val * b.val, a.d1 * b.val + a.val * b.d1, a.d2 * b.val + a.val * b.d2};
}

// ---------------------------------------------------------------------------
// Jet2 arithmetic

constexpr Jet2 operator+(const Jet2& a) { return a; }
constexpr Jet2 operator-(const Jet2& a) {
  return {-a.val, -a.d1, -a.d2, -a.d11, -a.d12, -a.d22};
}
constexpr Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.val + b.val, a.d1 + b.d1, a.d2 + b.d2,
          a.d11 + b.d11, a.d12 + b.d12, a.d22 + b.d22};
}
constexpr Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.val - b.val, a.d1 - b.d1, a.d2 - b.d2,
          a.d11 - b.d11, a.d12 - b.d12, a.d22 - b.d22};
}
constexpr Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.val * b.val,
          a.d1 * b.val + a.val * b.d1,
          a.d2 * b.val + a.val * b.d2,
          a.d11 * b.val + 2.0 * a.d1 * b.d1 + a.val * b.d11,
          a.d12 * b.val + a.d1 * b.d2 + a.d2 * b.d1 + a.val * b.d12,
          a.d22 * b.val + 2.0 * a.d2 * b.d2 + a.val * b.d22};
}

// ---------------------------------------------------------------------------
// Shared between both orders

template <class J>
concept JetType = std::is_same_v<J, Jet1> || std::is_same_v<J, Jet2>;

template <JetType J>
J reciprocal(const J& a) {
  if (a.val == 0.0) throw EvalError("jet division by zero");
  const double r = 1.0 / a.val;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}

template <JetType J>
J operator/(const J& a, const J& b) {
  return a * reciprocal(b);
}

template <JetType J>
J& operator+=(J& a, const J& b) { return a = a + b; }
template <JetType J>
J& operator-=(J& a, const J& b) { return a = a - b; }
template <JetType J>
J& operator*=(J& a, const J& b) { return a = a * b; }
template <JetType J>
J& operator/=(J& a, const J& b) { return a = a / b; }

// Mixed jet/double arithmetic without materializing a constant jet.
template <JetType J>
J operator*(double s, J a) {
  a.val *= s; a.d1 *= s; a.d2 *= s;
  if constexpr (std::is_same_v<J, Jet2>) { a.d11 *= s; a.d12 *= s; a.d22 *= s; }
  return a;
}
template <JetType J>
J operator*(const J& a, double s) { return s * a; }
template <JetType J>
J operator+(J a, double s) { a.val += s; return a; }
template <JetType J>
J operator+(double s, J a) { a.val += s; return a; }
template <JetType J>
J operator-(J a, double s) { a.val -= s; return a; }
template <JetType J>
J operator-(double s, const J& a) { return (-a) + s; }
template <JetType J>
J operator/(const J& a, double s) {
  if (s == 0.0) throw EvalError("jet division by zero");
  return (1.0 / s) * a;
}
template <JetType J>
J operator/(double s, const J& a) { return s * reciprocal(a); }

template <JetType J>
J sin(const J& a) {
  const double s = std::sin(a.val), c = std::cos(a.val);
  return chain(a, s, c, -s);
}
template <JetType J>
J cos(const J& a) {
  const double s = std::sin(a.val), c = std::cos(a.val);
  return chain(a, c, -s, -c);
}
template <JetType J>
J tan(const J& a) {
  const double t = std::tan(a.val);
  const double sec2 = 1.0 + t * t;
  return chain(a, t, sec2, 2.0 * t * sec2);
}
template <JetType J>
J sinh(const J& a) {
  const double s = std::sinh(a.val), c = std::cosh(a.val);
  return chain(a, s, c, s);
}
template <JetType J>
J cosh(const J& a) {
  const double s = std::sinh(a.val), c = std::cosh(a.val);
  return chain(a, c, s, c);
}
template <JetType J>
J tanh(const J& a) {
  const double t = std::tanh(a.val);
  const double s = 1.0 - t * t;
  return chain(a, t, s, -2.0 * t * s);
}
template <JetType J>
J exp(const J& a) {
  const double e = std::exp(a.val);
  return chain(a, e, e, e);
}
template <JetType J>
J log(const J& a) {
  if (!(a.val > 0.0)) throw EvalError("jet log of non-positive value");
  const double r = 1.0 / a.val;
  return chain(a, std::log(a.val), r, -r * r);
}
template <JetType J>
J sqrt(const J& a) {
  if (!(a.val > 0.0)) throw EvalError("jet sqrt of non-positive value");
  const double s = std::sqrt(a.val);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.val));
}

/// a^n for integer n; defined for negative bases.
template <JetType J>
J pow_int(const J& a, int n) {
  if (n == 0) return J{1.0};
  if (n < 0 && a.val == 0.0) throw EvalError("jet division by zero");
  const double f0 = std::pow(a.val, n);
  const double f1 = n * std::pow(a.val, n - 1);
  const double f2 = n == 1 ? 0.0 : double(n) * (n - 1) * std::pow(a.val, n - 2);
  return chain(a, f0, f1, f2);
}

/// a^c for real c, defined as exp(c·log a).
template <JetType J>
J pow_real(const J& a, double c) {
  if (!(a.val > 0.0)) throw EvalError("jet power of non-positive base");
  const double f0 = std::pow(a.val, c);
  return chain(a, f0, c * f0 / a.val, c * (c - 1.0) * f0 / (a.val * a.val));
}

inline std::ostream& operator<<(std::ostream& os, const Jet1& j) {
  return os << "Jet1{" << j.val << "; " << j.d1 << ", " << j.d2 << "}";
}
inline std::ostream& operator<<(std::ostream& os, const Jet2& j) {
  return os << "Jet2{" << j.val << "; " << j.d1 << ", " << j.d2 << "; " << j.d11 << ", "
            << j.d12 << ", " << j.d22 << "}";
}

}  // namespace psurf
