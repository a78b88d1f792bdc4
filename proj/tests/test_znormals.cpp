#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "psurf/znormals.hpp"
#include "support.hpp"

using namespace psurf;
using namespace psurf::fixtures;

namespace {

SurfaceSpec curved_r4_surface() {
  std::vector<std::vector<Expr>> t(4, std::vector<Expr>(4, Expr::constant(0.0)));
  for (int i = 0; i < 4; ++i) t[i][i] = parse("1 + x1^2");
  return surface({"u1", "u2", "u1*u2", "u1^2"}, AmbientManifold::from_metric(4, t));
}

std::vector<SurfaceSpec> flat_zoo(const Density& d) {
  return {sphere(2.0, d), torus(d), catenoid(d), clifford(d), graph_r5(d),
          surface({"u1", "u2", "u1^2 - u2^2", "u1*u2", "sin(u1)", "cos(u2)"},
                  AmbientManifold::euclidean(6), d, "graph in R^6")};
}

const UPoint kAt{0.7, 0.4};

}  // namespace

TEST(MultiIndex, Enumeration) {
  const auto I = enumerate_multi_indices(3, 2);
  ASSERT_EQ(I.size(), 9u);
  EXPECT_EQ(I.front(), (MultiIndex{0, 0}));
  EXPECT_EQ(I[1], (MultiIndex{0, 1}));
  EXPECT_EQ(I.back(), (MultiIndex{2, 2}));
  EXPECT_EQ(enumerate_multi_indices(4, 0).size(), 1u);
}

TEST(MultiIndex, DistinctCount) {
  for (int p = 1; p <= 6; ++p)
    EXPECT_EQ(count_distinct_z_vectors(p + 2, p), static_cast<std::size_t>(p * (p + 1) * (p + 2) / 6));
}

TEST(ZFrame, SphereGivesTheNormal) {
  const auto fp = frame_at(sphere(2.0), {kPi / 3, 0.7});
  const PoissonGeometry pg(fp);
  const auto zf = z_frame(pg);
  ASSERT_EQ(zf.z_vectors.size(), 1u);
  EXPECT_NEAR(std::fabs(fp.inner(zf.z_vectors[0], fp.normal_val[0])), 1.0, 1e-12);
  EXPECT_NEAR(zf.eigenvalues[0], 1.0, 1e-12);
  EXPECT_LT(zf.identity_residual, 1e-12);
}

TEST(ZFrame, PlaneGivesE3) {
  const auto fp = frame_at(plane(), {0.1, 0.2});
  const auto zf = z_frame(PoissonGeometry(fp));
  EXPECT_LT(max_abs(zf.z_vectors[0] - VecD{0, 0, 1}), 1e-15);
}

TEST(ZFrame, CliffordProjector) {
  const auto fp = frame_at(clifford(), {0.3, 1.1});
  const auto zf = z_frame(PoissonGeometry(fp));
  ASSERT_EQ(zf.eigenvalues.size(), 4u);
  EXPECT_NEAR(zf.eigenvalues[0], 1.0, 1e-12);
  EXPECT_NEAR(zf.eigenvalues[1], 1.0, 1e-12);
  EXPECT_NEAR(zf.eigenvalues[2], 0.0, 1e-12);
  EXPECT_NEAR(zf.eigenvalues[3], 0.0, 1e-12);
  EXPECT_LT(max_abs(zf.zmatrix * zf.zmatrix - zf.zmatrix), 1e-12);
}

TEST(ZFrame, ProjectorAndFrame) {
  for (const auto& d : densities())
    for (const auto& s : flat_zoo(d)) {
      const auto fp = frame_at(s, kAt);
      const PoissonGeometry pg(fp);
      const auto zf = z_frame(pg);
      EXPECT_EQ(zf.reduced, fp.m >= 6) << s.label;
      EXPECT_EQ(zf.indices.size(), zf.reduced ? count_distinct_z_vectors(fp.m, fp.p)
                                              : static_cast<std::size_t>(std::pow(fp.m, fp.p - 1)));
      EXPECT_LT(max_abs(zf.zmatrix * zf.zmatrix - zf.zmatrix), 1e-9) << s.label;
      EXPECT_NEAR(trace(zf.zmatrix), fp.p, 1e-9) << s.label;
      EXPECT_LT(zf.identity_residual, 1e-9) << s.label;
      for (const auto& z : zf.z_vectors)
        for (int a = 0; a < 2; ++a) EXPECT_NEAR(fp.inner(z, fp.e_val[a]), 0.0, 1e-10) << s.label;
      ASSERT_EQ(zf.nhat.size(), static_cast<std::size_t>(fp.p));
      for (int A = 0; A < fp.p; ++A)
        for (int B = 0; B < fp.p; ++B)
          EXPECT_NEAR(fp.inner(zf.nhat[A], zf.nhat[B]), A == B ? 1.0 : 0.0, 1e-9) << s.label;
      EXPECT_LT(max_abs(normal_projector(fp, zf.nhat) - normal_projector(fp, fp.normal_val)), 1e-9)
          << s.label;
    }
}

TEST(ZFrame, ReducedSpectrumMatchesFullTupleSpace) {
  for (const auto& s : {clifford(), graph_r5()}) {
    const auto fp = frame_at(s, kAt);
    const PoissonGeometry pg(fp);
    const auto zf = z_frame(pg);
    ASSERT_FALSE(zf.reduced);
    const auto sets = increasing_multi_indices(fp.m, fp.p - 1);
    MatD red(sets.size(), sets.size());
    for (std::size_t a = 0; a < sets.size(); ++a)
      for (std::size_t b = 0; b < sets.size(); ++b)
        red(a, b) = factorial(fp.p - 1) * fp.inner(z_vector(pg, sets[a]), z_vector(pg, sets[b]));
    const auto eig = sym_eigen(red);
    for (std::size_t k = 0; k < zf.eigenvalues.size(); ++k) {
      const double r = k < eig.values.size() ? eig.values[k] : 0.0;
      EXPECT_NEAR(zf.eigenvalues[k], r, 1e-10) << s.label;
    }
    // Swapping two entries of I flips the sign of Z_I.
    if (fp.p == 3) {
      EXPECT_LT(max_abs(z_vector(pg, {0, 1}) + z_vector(pg, {1, 0})), 1e-14);
    }
  }
}

TEST(ZFrame, LargestAmbient) {
  std::vector<std::string> coords{"u1", "u2"};
  for (int k = 3; k <= 8; ++k) coords.push_back("sin(" + std::to_string(k) + "*u1/7 + u2*u1/" + std::to_string(k) + ")");
  const auto s = surface(coords, AmbientManifold::euclidean(8));
  const auto fp = frame_at(s, kAt);
  const auto zf = z_frame(PoissonGeometry(fp));
  EXPECT_TRUE(zf.reduced);
  EXPECT_EQ(zf.indices.size(), 56u);
  EXPECT_NEAR(trace(zf.zmatrix), 6.0, 1e-9);
  EXPECT_LT(zf.identity_residual, 1e-9);
  EXPECT_LT(max_abs(normal_projector(fp, zf.nhat) - normal_projector(fp, fp.normal_val)), 1e-9);
  EXPECT_NEAR(k_nested(fp), classical_gaussian_curvature(fp), 1e-9);
}

TEST(ZFrame, CurvedCodimensionOne) {
  for (const auto& s : {horosphere(), hyperbolic_sphere()}) {
    const auto fp = frame_at(s, kAt);
    const auto zf = z_frame(PoissonGeometry(fp));
    EXPECT_NEAR(std::fabs(fp.inner(zf.nhat[0], fp.normal_val[0])), 1.0, 1e-10) << s.label;
    EXPECT_LT(zf.identity_residual, 1e-9) << s.label;
  }
}

TEST(ZFrame, CurvedHigherCodimensionRejected) {
  const auto fp = frame_at(curved_r4_surface(), kAt);
  EXPECT_THROW(z_frame(PoissonGeometry(fp)), Error);
}

TEST(ZVector, RejectsWrongIndexLength) {
  const auto fp = frame_at(clifford(), kAt);
  EXPECT_THROW(z_vector(PoissonGeometry(fp), MultiIndex{0, 1}), Error);
}

TEST(Smovef, ExamplesAndProperty) {
  const std::vector<std::pair<Expr, Expr>> fh{
      {parse("1"), parse("1")}, {parse("u1"), parse("u2")}, {parse("exp(u1)"), parse("sin(u2) + 2")},
      {parse("u1^2*u2"), parse("cos(u1*u2)")}};
  for (const auto& d : densities())
    for (const auto& s : {sphere(2.0, d), graph_r5(d), clifford(d), hyperbolic_sphere(d)}) {
      const auto fp = frame_at(s, kAt);
      for (const auto& [f, h] : fh)
        for (int A = 0; A < fp.p; ++A)
          for (int B = 0; B < fp.p; ++B) {
            const auto sides = smovef_sides(fp, fp.normals[A], fp.normals[B], f, h);
            EXPECT_NEAR(sides.lhs, sides.rhs, 1e-10 * (1 + std::fabs(sides.rhs))) << s.label;
          }
    }
}

TEST(Smovef, MatchesTraceOfS) {
  const auto fp = frame_at(torus(), kAt);
  const PoissonGeometry pg(fp);
  const auto sides = smovef_sides(fp, fp.normals[0], fp.normals[0], parse("1"), parse("1"));
  EXPECT_NEAR(sides.rhs, trace(pg.s_map(0).mixed * pg.s_map(0).mixed), 1e-12);
}

TEST(Nested, CurvatureMatchesClassical) {
  for (const auto& d : densities())
    for (const auto& s : flat_zoo(d)) {
      const auto fp = frame_at(s, kAt);
      EXPECT_NEAR(k_nested(fp), classical_gaussian_curvature(fp), 1e-9) << s.label;
      EXPECT_LT(max_abs(h_nested(fp) - classical_mean_curvature(fp)), 1e-9) << s.label;
    }
  EXPECT_NEAR(k_nested(frame_at(sphere(2.0), {1.0, 2.0})), 0.25, 1e-12);
  EXPECT_NEAR(k_nested(frame_at(torus(), {kPi, 0.0})), -1.0, 1e-12);
}

TEST(Nested, ProofLineOrderDiffers) {
  const auto fp = frame_at(sphere(1.0), {1.0, 0.5});
  const double stmt = k_nested(fp, NestedOrder::statement);
  const double alt = k_nested(fp, NestedOrder::proof_line);
  EXPECT_NEAR(stmt, 1.0, 1e-12);
  EXPECT_GT(std::fabs(alt - stmt), 0.1);
}

TEST(Nested, CurvedAmbientRejected) {
  const auto fp = frame_at(horosphere(), kAt);
  EXPECT_THROW(k_nested(fp), Error);
  EXPECT_THROW(h_nested(fp), Error);
}

TEST(Property, RandomGraphsInR5) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::string> coords{"u1", "u2"};
    for (int k = 0; k < 3; ++k)
      coords.push_back(num(c(rng)) + "*u1^2 + " + num(c(rng)) + "*u1*u2 + " + num(c(rng)) +
                       "*u2^2 + " + num(c(rng)) + "*u1^3");
    const auto s = surface(coords, AmbientManifold::euclidean(5));
    const auto fp = frame_at(s, {c(rng) * 0.5, c(rng) * 0.5});
    const PoissonGeometry pg(fp);
    const double K = classical_gaussian_curvature(fp);
    EXPECT_NEAR(k_nested(fp), K, 1e-9 * (1 + std::fabs(K)));
    EXPECT_LT(max_abs(h_nested(fp) - classical_mean_curvature(fp)), 1e-9);
    EXPECT_LT(z_frame(pg).identity_residual, 1e-9);
  }
}
