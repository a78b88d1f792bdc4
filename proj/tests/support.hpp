#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "psurf/ambient.hpp"
#include "psurf/classical.hpp"
#include "psurf/expr.hpp"

namespace psurf::fixtures {

inline const double kPi = std::acos(-1.0);

inline SurfaceSpec surface(const std::vector<std::string>& coords, AmbientManifold ambient,
                           Density density = Density::sqrt_g(), std::string label = "") {
  SurfaceSpec s;
  s.ambient = std::move(ambient);
  for (const auto& c : coords) s.embedding.push_back(parse(c));
  s.density = std::move(density);
  s.label = std::move(label);
  s.validate();
  return s;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline SurfaceSpec sphere(double R, Density d = Density::sqrt_g()) {
  const std::string r = num(R);
  return surface({r + "*sin(u1)*cos(u2)", r + "*sin(u1)*sin(u2)", r + "*cos(u1)"},
                 AmbientManifold::euclidean(3), std::move(d), "sphere");
}

inline SurfaceSpec plane(Density d = Density::sqrt_g()) {
  return surface({"u1", "u2", "0"}, AmbientManifold::euclidean(3), std::move(d), "plane");
}

inline SurfaceSpec torus(Density d = Density::sqrt_g()) {
  return surface({"(2+cos(u1))*cos(u2)", "(2+cos(u1))*sin(u2)", "sin(u1)"},
                 AmbientManifold::euclidean(3), std::move(d), "torus");
}

inline SurfaceSpec catenoid(Density d = Density::sqrt_g()) {
  return surface({"cosh(u1)*cos(u2)", "cosh(u1)*sin(u2)", "u1"}, AmbientManifold::euclidean(3),
                 std::move(d), "catenoid");
}

inline SurfaceSpec clifford(Density d = Density::sqrt_g()) {
  return surface({"cos(u1)", "sin(u1)", "cos(u2)", "sin(u2)"}, AmbientManifold::euclidean(4),
                 std::move(d), "clifford");
}

/// A graph surface in R^5 with a non-trivial normal connection.
inline SurfaceSpec graph_r5(Density d = Density::sqrt_g()) {
  return surface({"u1", "u2", "u1^2", "u1*u2", "u2^2 + u1^3/3"}, AmbientManifold::euclidean(5),
                 std::move(d), "graph in R^5");
}

/// Upper half-space model of H^3.
inline AmbientManifold hyperbolic3() {
  std::vector<std::vector<Expr>> t(3, std::vector<Expr>(3, Expr::constant(0.0)));
  for (int i = 0; i < 3; ++i) t[i][i] = parse("1/x3^2");
  return AmbientManifold::from_metric(3, t);
}

inline SurfaceSpec horosphere(Density d = Density::sqrt_g()) {
  return surface({"u1", "u2", "1"}, hyperbolic3(), std::move(d), "horosphere");
}

/// Euclidean unit sphere centred at height 3: a geodesic sphere of H^3 with
/// hyperbolic radius ln(2)/2, so K = 1/sinh^2(r) = 8.
inline SurfaceSpec hyperbolic_sphere(Density d = Density::sqrt_g()) {
  return surface({"sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "3+cos(u1)"}, hyperbolic3(), std::move(d),
                 "sphere in H^3");
}

/// A non-diagonal, position-dependent metric on R^3.
inline AmbientManifold warped3() {
  std::vector<std::vector<Expr>> t(3, std::vector<Expr>(3, Expr::constant(0.0)));
  t[0][0] = parse("1 + x3^2");
  t[1][1] = parse("exp(x1/3)");
  t[2][2] = parse("1 + x1^2/4");
  t[0][1] = t[1][0] = parse("x3/5");
  return AmbientManifold::from_metric(3, t);
}

inline std::vector<Density> densities() {
  return {Density::sqrt_g(), Density::unit(), Density::custom(parse("1 + u1^2 + u2^2"))};
}

/// Random expression tree over u1, u2 using every node kind.
inline Expr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> cst(-2.0, 2.0);
  if (depth == 0 || pick(rng) < 2) {
    switch (pick(rng) % 3) {
      case 0: return Expr::variable("u1");
      case 1: return Expr::variable("u2");
      default: return Expr::constant(std::round(cst(rng) * 100) / 100);
    }
  }
  const int kind = pick(rng);
  if (kind < 4) {
    static const Func fs[] = {Func::sin, Func::cos, Func::tan, Func::sinh, Func::cosh,
                              Func::tanh, Func::exp, Func::log, Func::sqrt, Func::neg};
    return Expr::unary(fs[std::uniform_int_distribution<int>(0, 9)(rng)], random_tree(rng, depth - 1));
  }
  if (kind == 9) {
    const double c = std::uniform_int_distribution<int>(-2, 3)(rng);
    return Expr::binary(BinOp::pow, random_tree(rng, depth - 1), Expr::constant(c));
  }
  static const BinOp ops[] = {BinOp::add, BinOp::sub, BinOp::mul, BinOp::div};
  return Expr::binary(ops[std::uniform_int_distribution<int>(0, 3)(rng)], random_tree(rng, depth - 1),
                      random_tree(rng, depth - 1));
}

inline bool finite_and_moderate(double v) { return std::isfinite(v) && std::fabs(v) < 1e4; }

/// Value at u if the tree is defined, smooth-looking and moderate on a small
/// neighbourhood; otherwise nullopt.
inline std::optional<double> safe_eval(const Expr& e, double u1, double u2) {
  try {
    const double v = eval_at(e, u1, u2);
    return finite_and_moderate(v) ? std::optional<double>(v) : std::nullopt;
  } catch (const EvalError&) {
    return std::nullopt;
  }
}


}  // namespace psurf::fixtures
