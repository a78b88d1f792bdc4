#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "psurf/classical.hpp"
#include "support.hpp"

using namespace psurf;
using namespace psurf::fixtures;

TEST(Frame, SphereMetric) {
  const auto fp = frame_at(sphere(2.0), {kPi / 3, 0.7});
  EXPECT_NEAR(fp.g, 12.0, 1e-12);
  EXPECT_NEAR(fp.g_ab(0, 0), 4.0, 1e-14);
  EXPECT_NEAR(fp.g_ab(1, 1), 3.0, 1e-13);
  EXPECT_NEAR(fp.g_ab(0, 1), 0.0, 1e-14);
  EXPECT_NEAR(fp.sqrt_g(), std::sqrt(12.0), 1e-13);
  EXPECT_NEAR(fp.rho.val, std::sqrt(12.0), 1e-13);
  EXPECT_EQ(fp.p, 1);
}

TEST(Frame, NormalsAreOrthonormalAndNormal) {
  for (const auto& s : {sphere(2.0), torus(), clifford(), graph_r5(), horosphere(), hyperbolic_sphere()}) {
    const auto fp = frame_at(s, {0.4, 0.9});
    for (int A = 0; A < fp.p; ++A) {
      for (int a = 0; a < 2; ++a) EXPECT_NEAR(fp.inner(fp.normal_val[A], fp.e_val[a]), 0.0, 1e-12) << s.label;
      for (int B = 0; B < fp.p; ++B)
        EXPECT_NEAR(fp.inner(fp.normal_val[A], fp.normal_val[B]), A == B ? 1.0 : 0.0, 1e-12) << s.label;
      EXPECT_LT(max_abs(fp.h[A] - transpose(fp.h[A])), 1e-10) << s.label;
    }
    EXPECT_EQ(fp.seed_order.size(), static_cast<std::size_t>(fp.p));
  }
}

TEST(Frame, PlaneIsTotallyGeodesic) {
  const auto fp = frame_at(plane(), {0.3, -0.8});
  EXPECT_EQ(max_abs(fp.h[0]), 0.0);
  EXPECT_EQ(classical_gaussian_curvature(fp), 0.0);
  EXPECT_EQ(max_abs(classical_mean_curvature(fp)), 0.0);
}

TEST(Frame, HorosphereUmbilic) {
  const auto fp = frame_at(horosphere(), {0.5, -1.2});
  EXPECT_LT(max_abs(fp.h[0] - fp.g_ab), 1e-12);
  const auto terms = classical_gaussian_curvature_terms(fp);
  EXPECT_NEAR(terms[0], -1.0, 1e-12);
  EXPECT_NEAR(terms[1], 1.0, 1e-12);
  EXPECT_NEAR(classical_gaussian_curvature(fp), 0.0, 1e-12);
  EXPECT_NEAR(fp.norm(classical_mean_curvature(fp)), 1.0, 1e-12);
}

TEST(Curvature, Values) {
  EXPECT_NEAR(classical_gaussian_curvature(frame_at(sphere(2.0), {1.1, 2.0})), 0.25, 1e-12);
  EXPECT_NEAR(classical_gaussian_curvature(frame_at(torus(), {0.0, 0.0})), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(classical_gaussian_curvature(frame_at(torus(), {kPi, 0.0})), -1.0, 1e-12);
  EXPECT_NEAR(classical_gaussian_curvature(frame_at(clifford(), {0.3, 1.4})), 0.0, 1e-12);
  EXPECT_NEAR(classical_gaussian_curvature(frame_at(hyperbolic_sphere(), {1.0, 0.5})), 8.0, 1e-9);
  const auto cat = frame_at(catenoid(), {0.7, 0.2});
  EXPECT_NEAR(classical_gaussian_curvature(cat), -1.0 / std::pow(std::cosh(0.7), 4), 1e-12);
}

TEST(Curvature, TorusFormulaEverywhere) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(0.0, 2 * kPi);
  const auto s = torus();
  for (int k = 0; k < 20; ++k) {
    const double u1 = d(rng), u2 = d(rng);
    EXPECT_NEAR(classical_gaussian_curvature(frame_at(s, {u1, u2})), std::cos(u1) / (2 + std::cos(u1)),
                1e-11);
  }
}

TEST(MeanCurvature, Values) {
  EXPECT_NEAR(max_abs(classical_mean_curvature(frame_at(catenoid(), {0.4, 1.0}))), 0.0, 1e-12);
  const auto fp = frame_at(sphere(2.0), {kPi / 3, 0.7});
  const VecD H = classical_mean_curvature(fp);
  EXPECT_NEAR(fp.norm(H), 0.5, 1e-12);
  EXPECT_NEAR(fp.inner(H, 0.5 * fp.x), -0.5, 1e-12);
  const auto cl = frame_at(clifford(), {0.3, 1.4});
  EXPECT_NEAR(cl.norm(classical_mean_curvature(cl)), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(ComplexStructure, PlaneAndSquares) {
  const auto pl = frame_at(plane(), {0.0, 0.0});
  const auto j1 = classical_complex_structure(pl, {1.0, 0.0});
  EXPECT_NEAR(j1[0], 0.0, 1e-15);
  EXPECT_NEAR(j1[1], -1.0, 1e-15);
  for (const auto& s : {sphere(2.0), torus(), graph_r5()}) {
    const auto fp = frame_at(s, {0.6, 0.3});
    for (const TangentComponents X : {TangentComponents{1, 0}, TangentComponents{0.3, -2}}) {
      const auto JX = classical_complex_structure(fp, X);
      const auto JJX = classical_complex_structure(fp, JX);
      EXPECT_NEAR(JJX[0], -X[0], 1e-12);
      EXPECT_NEAR(JJX[1], -X[1], 1e-12);
      const VecD x = fp.tangent(X), jx = fp.tangent(JX);
      EXPECT_NEAR(fp.inner(x, jx), 0.0, 1e-12);
      EXPECT_NEAR(fp.inner(jx, jx), fp.inner(x, x), 1e-12);
    }
  }
}

TEST(Frame, DegeneratePole) {
  EXPECT_THROW(frame_at(sphere(1.0), {0.0, 0.3}), DegenerateError);
  EXPECT_THROW(frame_at(sphere(1.0), {kPi, 0.3}), DegenerateError);
}

TEST(Frame, VanishingDensity) {
  EXPECT_THROW(frame_at(sphere(1.0, Density::custom(parse("0"))), {1.0, 0.3}), InputError);
  EXPECT_THROW(frame_at(plane(Density::custom(parse("u1"))), {0.0, 0.3}), InputError);
}

TEST(Frame, SeedOrderReplays) {
  const auto s = graph_r5();
  const auto fp = frame_at(s, {0.3, -0.4});
  const auto again = frame_at(s, {0.3, -0.4}, fp.seed_order);
  for (int A = 0; A < fp.p; ++A) EXPECT_EQ(max_abs(fp.normal_val[A] - again.normal_val[A]), 0.0);
}

TEST(Frame, JetsMatchFiniteDifferences) {
  const double h = 1e-5;
  for (const auto& s : {sphere(2.0), graph_r5(), hyperbolic_sphere(), clifford()}) {
    const UPoint u{0.7, 0.4};
    const auto fp = frame_at(s, u);
    for (int b = 0; b < 2; ++b) {
      UPoint up = u, um = u;
      up[b] += h;
      um[b] -= h;
      const auto fpp = frame_at(s, up, fp.seed_order), fpm = frame_at(s, um, fp.seed_order);
      for (int A = 0; A < fp.p; ++A) {
        const VecD fd = (1.0 / (2 * h)) * (fpp.normal_val[A] - fpm.normal_val[A]);
        EXPECT_LT(max_abs(fd - partials(fp.normals[A], b)), 1e-6) << s.label;
      }
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          EXPECT_NEAR((fpp.g_ab(i, j) - fpm.g_ab(i, j)) / (2 * h), fp.g_jet(i, j).d(b), 1e-6) << s.label;
      EXPECT_NEAR((fpp.rho.val - fpm.rho.val) / (2 * h), fp.rho.d(b), 1e-6) << s.label;
    }
  }
}

TEST(Property, RandomSpherePoints) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> a(0.1, kPi - 0.1), b(0.0, 2 * kPi), r(0.5, 3.0);
  for (int k = 0; k < 20; ++k) {
    const double R = r(rng);
    const auto fp = frame_at(sphere(R), {a(rng), b(rng)});
    EXPECT_NEAR(classical_gaussian_curvature(fp), 1 / (R * R), 1e-10);
    EXPECT_NEAR(fp.norm(classical_mean_curvature(fp)), 1 / R, 1e-10);
    // Umbilic, W = ±I/R with the sign set by the chosen normal.
    EXPECT_NEAR(std::fabs(fp.W[0](0, 0)), 1 / R, 1e-10);
    EXPECT_LT(max_abs(fp.W[0] - fp.W[0](0, 0) * MatD::identity(2)), 1e-10);
  }
}

TEST(InducedChristoffel, PlanePolar) {
  const auto s = surface({"u1*cos(u2)", "u1*sin(u2)", "0"}, AmbientManifold::euclidean(3));
  const auto G = induced_christoffel(frame_at(s, {2.0, 0.3}));
  EXPECT_NEAR(G[0][1][1], -2.0, 1e-13);
  EXPECT_NEAR(G[1][0][1], 0.5, 1e-13);
  EXPECT_NEAR(G[1][1][0], 0.5, 1e-13);
  EXPECT_NEAR(G[0][0][0], 0.0, 1e-14);
}

TEST(Spec, ValidateRejectsBadEmbeddings) {
  EXPECT_THROW(surface({"u1", "u2"}, AmbientManifold::euclidean(3)), Error);
  EXPECT_THROW(surface({"u1", "u2", "x1"}, AmbientManifold::euclidean(3)), Error);
}
