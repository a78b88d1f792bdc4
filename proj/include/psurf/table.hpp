#pragma once

// Per-point curvature table and single-point digest.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "psurf/classical.hpp"
#include "psurf/error.hpp"
#include "psurf/harness.hpp"
#include "psurf/poisson.hpp"
#include "psurf/specfile.hpp"
#include "psurf/znormals.hpp"

namespace psurf {

inline constexpr const char* kTableHeader =
    "u1,u2,K_classical,K_poisson,K_nested,H_norm_classical,H_norm_poisson,sqrt_g,rho";

struct TableRow {
  UPoint u{};
  bool degenerate = false;
  double K_classical = 0.0, K_poisson = 0.0;
  std::optional<double> K_nested;
  double H_classical = 0.0, H_poisson = 0.0;
  double sqrt_g = 0.0, rho = 0.0;
};

inline TableRow table_row(const SurfaceSpec& spec, const UPoint& u) {
  TableRow row;
  row.u = u;
  std::optional<FramePoint> fp;
  try {
    fp.emplace(frame_at(spec, u));
  } catch (const DegenerateError&) {
    row.degenerate = true;
    return row;
  }
  const PoissonGeometry pg(*fp);
  row.K_classical = classical_gaussian_curvature(*fp);
  row.K_poisson = pg.gaussian_curvature();
  if (fp->flat_ambient) row.K_nested = k_nested(*fp);
  row.H_classical = fp->norm(classical_mean_curvature(*fp));
  row.H_poisson = fp->norm(pg.mean_curvature());
  row.sqrt_g = fp->sqrt_g();
  row.rho = fp->rho.val;
  return row;
}

/// Rows in grid order (u1 slow).
inline std::vector<TableRow> table_rows(const SurfaceSpec& spec, const GridSpec& grid, int jobs = 1) {
  const auto pts = grid.points();
  return parallel_map<TableRow>(pts.size(), jobs,
                                [&](std::size_t k) { return table_row(spec, pts[k]); });
}

/// CSV with 17 significant digits; degenerate rows keep u1,u2 and leave every
/// other field empty.
inline std::string table_csv(const std::vector<TableRow>& rows) {
  auto num = [](double v) { return detail::format("%.17g", v); };
  std::string out = std::string(kTableHeader) + "\n";
  for (const auto& r : rows) {
    out += num(r.u[0]) + "," + num(r.u[1]);
    if (r.degenerate) {
      out += ",,,,,,,\n";
      continue;
    }
    out += "," + num(r.K_classical) + "," + num(r.K_poisson) + "," +
           (r.K_nested ? num(*r.K_nested) : std::string()) + "," + num(r.H_classical) + "," +
           num(r.H_poisson) + "," + num(r.sqrt_g) + "," + num(r.rho) + "\n";
  }
  return out;
}

namespace detail {

inline std::string fmt_vec(const VecD& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + format("%.12g", v[k]);
  return s + ")";
}

inline std::string fmt_mat(const MatD& a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.rows(); ++i) {
    s += i ? "; " : "";
    for (std::size_t j = 0; j < a.cols(); ++j) s += (j ? ", " : "") + format("%.12g", a(i, j));
  }
  return s + "]";
}

inline std::string fmt_traces(const TangentMap& t, const FramePoint& fp) {
  std::string s = "Tr " + format("%.12g", trace(t.mixed)) + "  tr ";
  try {
    s += format("%.12g", trace(restrict_to_surface(t, fp)));
  } catch (const Error&) {
    s += "(image not tangent)";
  }
  return s;
}

}  // namespace detail

/// Everything computed at one point, as text. Throws DegenerateError for a
/// degenerate point.
inline std::string point_digest(const SurfaceSpec& spec, const UPoint& u) {
  using detail::fmt_mat;
  using detail::fmt_vec;
  using detail::format;
  const FramePoint fp = frame_at(spec, u);
  const PoissonGeometry pg(fp);
  std::string out;
  auto line = [&](const std::string& key, const std::string& value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-18s", key.c_str());
    out += buf + value + "\n";
  };

  line("surface", spec.label.empty() ? "(unlabeled)" : spec.label);
  line("density", spec.density.describe());
  line("u", fmt_vec(VecD{u[0], u[1]}));
  line("x", fmt_vec(fp.x));
  line("e_1", fmt_vec(fp.e_val[0]));
  line("e_2", fmt_vec(fp.e_val[1]));
  line("g_ab", fmt_mat(fp.g_ab));
  line("g", format("%.12g", fp.g));
  line("sqrt_g", format("%.12g", fp.sqrt_g()));
  line("rho", format("%.12g", fp.rho.val));
  for (int A = 0; A < fp.p; ++A) {
    const std::string a = std::to_string(A + 1);
    line("N_" + a, fmt_vec(fp.normal_val[A]));
    line("h_" + a, fmt_mat(fp.h[A]));
    line("W_" + a, fmt_mat(fp.W[A]));
  }
  line("ambient_term/g", format("%.12g", fp.ambient_term / fp.g));

  std::string k = "classical " + format("%.12g", classical_gaussian_curvature(fp)) + "  poisson " +
                  format("%.12g", pg.gaussian_curvature()) + "  nested ";
  k += fp.flat_ambient ? format("%.12g", k_nested(fp)) : std::string("n/a");
  line("K", k);
  const VecD Hc = classical_mean_curvature(fp), Hp = pg.mean_curvature();
  line("H classical", fmt_vec(Hc));
  line("H poisson", fmt_vec(Hp));
  if (fp.flat_ambient) line("H nested", fmt_vec(h_nested(fp)));
  line("|H|", "classical " + format("%.12g", fp.norm(Hc)) + "  poisson " +
                  format("%.12g", fp.norm(Hp)));

  line("P^2", detail::fmt_traces(compose(pg.p_map(), pg.p_map(), fp), fp));
  for (int A = 0; A < fp.p; ++A) {
    const std::string a = std::to_string(A + 1);
    line("S_" + a + "^2", detail::fmt_traces(compose(pg.s_map(A), pg.s_map(A), fp), fp));
    line("B_" + a, detail::fmt_traces(pg.b_map(A), fp));
  }
  if (fp.flat_ambient || fp.p == 1) {
    try {
      line("Z eigenvalues", fmt_vec(z_frame(pg).eigenvalues));
    } catch (const DegenerateError& e) {
      line("Z eigenvalues", std::string("unavailable: ") + e.what());
    }
  } else {
    line("Z eigenvalues", "n/a (curved ambient, codimension > 1)");
  }
  return out;
}

}  // namespace psurf
