#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "psurf/harness.hpp"
#include "psurf/table.hpp"
#include "support.hpp"

using namespace psurf;

namespace {

LoadedSpec golden(const std::string& name) {
  return load_spec(std::string(PSURF_SPECS_DIR) + "/" + name + ".psurf");
}

LoadedSpec small(const SurfaceSpec& s, AxisSpec u1, AxisSpec u2) {
  return {s, GridSpec{u1, u2}};
}

const CheckRecord& record(const Report& rep, const std::string& name) {
  for (const auto& c : rep.checks)
    if (c.name == name) return c;
  throw std::logic_error("no check " + name);
}

const std::vector<std::string> kGolden{"plane", "sphere", "torus", "catenoid", "clifford", "horosphere"};

}  // namespace

TEST(Catalog, NamesAreUniqueAndIndexed) {
  const auto& cat = check_catalog();
  ASSERT_EQ(cat.size(), static_cast<std::size_t>(kCheckCount));
  std::set<std::string> names;
  for (int k = 0; k < kCheckCount; ++k) {
    EXPECT_TRUE(names.insert(cat[k].name).second) << cat[k].name;
    EXPECT_EQ(check_index(cat[k].name), k);
    EXPECT_GT(cat[k].tolerance, 0.0);
    EXPECT_FALSE(std::string(cat[k].summary).empty());
  }
  EXPECT_EQ(check_index("no.such.check"), -1);
}

TEST(Tolerances, Overrides) {
  Tolerances t;
  t.apply("curvature.k=1e-3");
  EXPECT_DOUBLE_EQ(t[CheckId::curvature_k], 1e-3);
  EXPECT_DOUBLE_EQ(t[CheckId::trace_p], check_catalog()[static_cast<int>(CheckId::trace_p)].tolerance);
  t.apply("all=2e-5");
  for (int k = 0; k < kCheckCount; ++k) EXPECT_DOUBLE_EQ(t[k], 2e-5);
  EXPECT_THROW(t.apply("curvature.k"), InputError);
  EXPECT_THROW(t.apply("=1"), InputError);
  EXPECT_THROW(t.apply("curvature.k=abc"), InputError);
  EXPECT_THROW(t.apply("curvature.k=1e-3x"), InputError);
  EXPECT_THROW(t.apply("curvature.k=-1"), InputError);
  EXPECT_THROW(t.apply("curvature.k=0"), InputError);
  EXPECT_THROW(t.apply("bogus=1"), InputError);
}

TEST(RunChecks, GoldenSpecsPass) {
  for (const auto& name : kGolden) {
    const Report rep = run_checks(golden(name));
    EXPECT_TRUE(rep.passed()) << name << "\n" << report_text(rep);
    EXPECT_EQ(rep.evaluated, 400u) << name;
    EXPECT_TRUE(rep.skipped.empty()) << name;
  }
}

TEST(RunChecks, CurvedAmbientMarksFlatOnlyChecksNotApplicable) {
  const Report rep = run_checks(golden("horosphere"));
  EXPECT_FALSE(record(rep, "curvature.k_flat").applicable());
  EXPECT_FALSE(record(rep, "nested.k").applicable());
  EXPECT_FALSE(record(rep, "nested.h").applicable());
  EXPECT_TRUE(record(rep, "curvature.k").applicable());
  EXPECT_TRUE(record(rep, "z.identity").applicable());
  EXPECT_NE(report_text(rep).find("n/a"), std::string::npos);
}

TEST(RunChecks, TightToleranceFails) {
  RunOptions opt;
  opt.tolerances.set("all", 1e-16);
  const Report rep = run_checks(golden("torus"), opt);
  EXPECT_FALSE(rep.passed());
  EXPECT_GT(rep.failures(), 0u);
  EXPECT_NE(report_text(rep).find("result    FAIL"), std::string::npos);
  EXPECT_FALSE(report_json(rep)["passed"].get<bool>());
}

TEST(RunChecks, ReportsAreByteIdenticalAndIndependentOfJobs) {
  for (const auto& name : {"sphere", "clifford", "horosphere"}) {
    const LoadedSpec s = golden(name);
    RunOptions one, four;
    four.jobs = 4;
    const Report a = run_checks(s, one), b = run_checks(s, one), c = run_checks(s, four);
    EXPECT_EQ(report_text(a), report_text(b)) << name;
    EXPECT_EQ(report_text(a), report_text(c)) << name;
    EXPECT_EQ(report_json(a).dump(2), report_json(c).dump(2)) << name;
  }
}

TEST(RunChecks, DegeneratePointsAreSkippedNotFailed) {
  const auto s = small(fixtures::sphere(1.0), {0.0, fixtures::kPi, 5}, {0.0, 1.0, 3});
  const Report rep = run_checks(s);
  EXPECT_EQ(rep.skipped.size(), 6u);
  EXPECT_EQ(rep.evaluated, 9u);
  EXPECT_TRUE(rep.passed()) << report_text(rep);
  EXPECT_NE(report_text(rep).find("skipped (0, 0)"), std::string::npos);
  EXPECT_EQ(report_json(rep)["skipped"].size(), 6u);
}

TEST(RunChecks, DensityOverrideChangesOnlyTheDensity) {
  const auto s = golden("catenoid");
  RunOptions opt;
  opt.density = parse_density("1 + u1^2 + u2^2");
  const Report rep = run_checks(s, opt);
  EXPECT_EQ(rep.density, to_string(parse("1 + u1^2 + u2^2")));
  EXPECT_TRUE(rep.passed()) << report_text(rep);
  EXPECT_FALSE(record(rep, "curvature.sqrt_g").applicable());
}

TEST(RunChecks, HigherCodimension) {
  const auto s = small(fixtures::graph_r5(), {-0.8, 0.8, 4}, {-0.5, 0.9, 4});
  const Report rep = run_checks(s);
  EXPECT_TRUE(rep.passed()) << report_text(rep);
  EXPECT_TRUE(record(rep, "connection.oracle").applicable());
}

TEST(RunChecks, CurvedAmbientWithNonDiagonalMetric) {
  const auto s = small(fixtures::surface({"u1", "u2", "1 + u1*u2/3"}, fixtures::warped3()), {-0.8, 0.8, 4},
                       {-0.5, 0.9, 4});
  const Report rep = run_checks(s);
  EXPECT_TRUE(rep.passed()) << report_text(rep);
}

TEST(RunChecks, EvaluationErrorsPropagate) {
  const auto s = small(fixtures::surface({"u1", "u2", "sqrt(u1)"}, AmbientManifold::euclidean(3)),
                       {-1.0, 1.0, 3}, {0.0, 1.0, 2});
  EXPECT_THROW(run_checks(s), EvalError);
}

TEST(ReportJson, Shape) {
  const Report rep = run_checks(golden("plane"));
  const auto j = report_json(rep);
  EXPECT_EQ(j["label"], rep.label);
  EXPECT_EQ(j["checks"].size(), static_cast<std::size_t>(kCheckCount));
  EXPECT_EQ(j["grid"]["u1"]["count"], 20);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["checks"][0]["status"], "pass");
  const auto round = nlohmann::ordered_json::parse(j.dump());
  EXPECT_EQ(round, j);
}

TEST(ParallelMap, OrderAndExceptions) {
  const auto v = parallel_map<int>(100, 4, [](std::size_t k) { return static_cast<int>(k * k); });
  for (int k = 0; k < 100; ++k) EXPECT_EQ(v[k], k * k);
  EXPECT_THROW(parallel_map<int>(10, 3,
                                 [](std::size_t k) -> int {
                                   if (k == 7) throw InputError("boom");
                                   return 0;
                                 }),
               InputError);
}

TEST(Table, RowsAndCsv) {
  const auto s = small(fixtures::sphere(2.0), {0.0, 1.0, 3}, {0.0, 1.0, 2});
  const auto rows = table_rows(s.surface, s.grid, 2);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_TRUE(rows[0].degenerate);
  EXPECT_NEAR(rows[2].K_poisson, 0.25, 1e-12);
  ASSERT_TRUE(rows[2].K_nested.has_value());
  EXPECT_NEAR(*rows[2].K_nested, 0.25, 1e-12);
  EXPECT_NEAR(rows[2].H_poisson, 0.5, 1e-12);
  const std::string csv = table_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kTableHeader);
  EXPECT_NE(csv.find("\n0,0,,,,,,,\n"), std::string::npos) << csv;
}

TEST(Table, HorosphereHasNoNestedColumn) {
  const auto rows = table_rows(fixtures::horosphere(), GridSpec{{-1, 1, 2}, {-1, 1, 2}});
  for (const auto& r : rows) {
    EXPECT_FALSE(r.K_nested.has_value());
    EXPECT_NEAR(r.K_classical, 0.0, 1e-12);
  }
  EXPECT_NE(table_csv(rows).find(",,"), std::string::npos);
}

TEST(PointDigest, Contents) {
  const std::string d = point_digest(fixtures::sphere(2.0), {fixtures::kPi / 3, 0.7});
  EXPECT_NE(d.find("g                 12\n"), std::string::npos) << d;
  EXPECT_NE(d.find("K                 classical 0.25  poisson 0.25  nested 0.25"), std::string::npos) << d;
  EXPECT_NE(d.find("Z eigenvalues     (1)"), std::string::npos) << d;
  EXPECT_THROW(point_digest(fixtures::sphere(2.0), {0.0, 0.0}), DegenerateError);
}
