#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "psurf/ambient.hpp"
#include "support.hpp"

using namespace psurf;
using fixtures::hyperbolic3;
using fixtures::warped3;

namespace {

/// R̄(X,Y,Y,X) for constant curvature −1: −(|X|²|Y|² − ⟨X,Y⟩²).
double hyperbolic_closed_form(const MatD& g, const VecD& X, const VecD& Y) {
  const double xx = inner(X, g, X), yy = inner(Y, g, Y), xy = inner(X, g, Y);
  return -(xx * yy - xy * xy);
}

VecD random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0), h(0.5, 2.0);
  return VecD{d(rng), d(rng), h(rng)};
}

}  // namespace

TEST(Metric, Euclidean) {
  const auto M = AmbientManifold::euclidean(3);
  const auto mt = M.metric_at(VecD{1, -2, 5});
  EXPECT_EQ(max_abs(mt.g - MatD::identity(3)), 0.0);
  EXPECT_EQ(max_abs(mt.g_inv - MatD::identity(3)), 0.0);
  EXPECT_TRUE(M.is_euclidean());
}

TEST(Metric, HyperbolicSubstitution) {
  const auto mt = hyperbolic3().metric_at(VecD{0, 0, 2});
  EXPECT_LT(max_abs(mt.g - 0.25 * MatD::identity(3)), 1e-15);
  EXPECT_LT(max_abs(mt.g * mt.g_inv - MatD::identity(3)), 1e-10);
}

TEST(Metric, HyperbolicBoundaryIsADomainError) {
  EXPECT_THROW(hyperbolic3().metric_at(VecD{0, 0, 0}), EvalError);
}

TEST(Metric, RejectsIndefinite) {
  std::vector<std::vector<Expr>> t(3, std::vector<Expr>(3, Expr::constant(0.0)));
  t[0][0] = t[1][1] = Expr::constant(1.0);
  t[2][2] = parse("x1");
  const auto M = AmbientManifold::from_metric(3, t);
  EXPECT_NO_THROW(M.metric_at(VecD{1, 0, 0}));
  EXPECT_THROW(M.metric_at(VecD{-1, 0, 0}), Error);
}

TEST(Metric, RejectsAsymmetricTable) {
  std::vector<std::vector<Expr>> t(3, std::vector<Expr>(3, Expr::constant(0.0)));
  for (int i = 0; i < 3; ++i) t[i][i] = Expr::constant(1.0);
  t[0][1] = parse("x1/10");
  EXPECT_THROW(AmbientManifold::from_metric(3, t), Error);
}

TEST(Metric, RejectsSurfaceVariablesAndBadDims) {
  std::vector<std::vector<Expr>> t(3, std::vector<Expr>(3, Expr::constant(0.0)));
  for (int i = 0; i < 3; ++i) t[i][i] = Expr::constant(1.0);
  t[2][2] = parse("1 + u1^2");
  EXPECT_THROW(AmbientManifold::from_metric(3, t), Error);
  t[2][2] = parse("1 + x4^2");
  EXPECT_THROW(AmbientManifold::from_metric(3, t), Error);
  EXPECT_THROW(AmbientManifold::euclidean(2), Error);
  EXPECT_THROW(AmbientManifold::euclidean(9), Error);
}

TEST(Christoffel, EuclideanVanishes) {
  const auto G = AmbientManifold::euclidean(4).christoffel(VecD{1, 2, 3, 4});
  for (double v : G.data) EXPECT_EQ(v, 0.0);
}

TEST(Christoffel, ConstantDiagonalMetricVanishes) {
  std::vector<std::vector<Expr>> t(3, std::vector<Expr>(3, Expr::constant(0.0)));
  t[0][0] = Expr::constant(2.0);
  t[1][1] = Expr::constant(3.0);
  t[2][2] = Expr::constant(0.5);
  const auto G = AmbientManifold::from_metric(3, t).christoffel(VecD{1, 1, 1});
  for (double v : G.data) EXPECT_EQ(v, 0.0);
}

TEST(Christoffel, Hyperbolic) {
  for (double c : {0.5, 1.0, 3.0}) {
    const auto G = hyperbolic3().christoffel(VecD{0.3, -0.2, c});
    EXPECT_NEAR(G(0, 0, 2), -1.0 / c, 1e-14);
    EXPECT_NEAR(G(2, 0, 0), 1.0 / c, 1e-14);
    EXPECT_NEAR(G(2, 2, 2), -1.0 / c, 1e-14);
    EXPECT_NEAR(G(0, 0, 0), 0.0, 1e-15);
  }
}

TEST(Christoffel, SymmetricAndMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  const auto M = warped3();
  for (int trial = 0; trial < 20; ++trial) {
    const VecD x = random_point(rng);
    const auto G = M.christoffel(x);
    const auto mt = M.metric_at(x);
    // ∂_k ḡ_ij by central differences.
    const double h = 1e-5;
    std::vector<MatD> dg;
    for (int k = 0; k < 3; ++k) {
      VecD xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      dg.push_back((1.0 / (2 * h)) * (M.metric_at(xp).g - M.metric_at(xm).g));
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          EXPECT_NEAR(G(i, j, k), G(i, k, j), 1e-12);
          double fd = 0.0;
          for (int l = 0; l < 3; ++l)
            fd += 0.5 * mt.g_inv(i, l) * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
          EXPECT_NEAR(G(i, j, k), fd, 1e-6);
        }
  }
}

TEST(Riemann, EuclideanVanishes) {
  EXPECT_EQ(AmbientManifold::euclidean(3).riemann_term(VecD{1, 2, 3}, VecD{1, 0, 0}, VecD{0, 1, 0}), 0.0);
}

TEST(Riemann, HyperbolicConstantCurvature) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const auto M = hyperbolic3();
  const VecD x{0.1, 0.2, 1.7};
  const double c = x[2];
  // Orthonormal pair: ḡ = δ/c², so c·∂_i is unit.
  EXPECT_NEAR(M.riemann_term(x, VecD{c, 0, 0}, VecD{0, c, 0}), -1.0, 1e-12);
  EXPECT_NEAR(M.riemann_term(x, VecD{0, c, 0}, VecD{0, 0, c}), -1.0, 1e-12);
  const auto g = M.metric_at(x).g;
  for (int trial = 0; trial < 10; ++trial) {
    const VecD X{d(rng), d(rng), d(rng)}, Y{d(rng), d(rng), d(rng)};
    EXPECT_NEAR(M.riemann_term(x, X, Y), hyperbolic_closed_form(g, X, Y), 1e-10);
    EXPECT_NEAR(M.riemann_term(x, X, Y), M.riemann_term(x, Y, X), 1e-10);
    EXPECT_NEAR(M.riemann_term(x, X, X), 0.0, 1e-12);
  }
}

TEST(Riemann, SymmetriesOfTheLoweredTensor) {
  std::mt19937_64 rng(14);
  for (const auto& M : {hyperbolic3(), warped3()}) {
    for (int trial = 0; trial < 5; ++trial) {
      const VecD x = random_point(rng);
      const auto R = M.riemann(x);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
              const double r = R(i, j, k, l);
              EXPECT_NEAR(r, -R(j, i, k, l), 1e-9);
              EXPECT_NEAR(r, -R(i, j, l, k), 1e-9);
              EXPECT_NEAR(r, R(k, l, i, j), 1e-9);
              EXPECT_NEAR(r + R(i, k, l, j) + R(i, l, j, k), 0.0, 1e-9);
            }
    }
  }
}

TEST(MetricAlong, ChainRule) {
  // x(u) = (u1, u2, 1 + u1 u2) in H^3: ∂_1 ḡ_33 = −2 x3^-3 · ∂_1 x3.
  const double u1 = 0.4, u2 = 0.7;
  std::vector<Jet1> x{Jet1::seed_u1(u1), Jet1::seed_u2(u2), Jet1{1 + u1 * u2, u2, u1}};
  const auto g = hyperbolic3().metric_along(x);
  const double x3 = 1 + u1 * u2;
  EXPECT_NEAR(g(2, 2).val, 1 / (x3 * x3), 1e-15);
  EXPECT_NEAR(g(2, 2).d1, -2 / (x3 * x3 * x3) * u2, 1e-14);
  EXPECT_NEAR(g(2, 2).d2, -2 / (x3 * x3 * x3) * u1, 1e-14);
  EXPECT_EQ(g(0, 1).val, 0.0);
}
