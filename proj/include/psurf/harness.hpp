#pragma once

// Grid harness: every invariant of the classical, Poisson and Z-vector layers
// evaluated at every grid point, reduced to one record per named check.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <initializer_list>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "psurf/classical.hpp"
#include "psurf/error.hpp"
#include "psurf/expr.hpp"
#include "psurf/poisson.hpp"
#include "psurf/specfile.hpp"
#include "psurf/tensor.hpp"
#include "psurf/znormals.hpp"

namespace psurf {

enum class CheckId : int {
  frame_metric,
  frame_orthonormal,
  frame_h_symmetric,
  frame_weingarten_symmetric,
  frame_jet_fd,
  bracket_antisymmetry,
  bracket_jacobi,
  bracket_kahler,
  map_tangent_image,
  map_p_squared,
  map_s_covariant,
  map_compound,
  map_b_weingarten,
  trace_p,
  trace_p_squared,
  trace_s_squared,
  trace_ab,
  trace_ab_squared,
  curvature_k,
  curvature_k_flat,
  curvature_h,
  curvature_h_flat,
  curvature_sqrt_g,
  connection_antisymmetry,
  connection_oracle,
  theorem_weingarten,
  theorem_gauss,
  complex_projection,
  complex_j_squared,
  complex_oracle,
  complex_projected_frame,
  z_tangent,
  z_idempotent,
  z_eigenvalues,
  z_orthonormal,
  z_identity,
  z_projector,
  lemma_smovef,
  nested_k,
  nested_h,
  rho_invariance,
  count_
};

inline constexpr int kCheckCount = static_cast<int>(CheckId::count_);

struct CheckDef {
  const char* name;
  double tolerance;
  const char* summary;
};

/// Names, default tolerances and one-line descriptions, indexed by CheckId.
inline const std::vector<CheckDef>& check_catalog() {
  static const std::vector<CheckDef> defs = {
      {"frame.metric", 1e-10, "g(e_a, e_b) equals the induced metric"},
      {"frame.orthonormal", 1e-10, "normal frame orthonormal and orthogonal to e_a"},
      {"frame.h_symmetric", 1e-8, "second fundamental forms symmetric"},
      {"frame.weingarten_symmetric", 1e-8, "g W_A symmetric"},
      {"frame.jet_fd", 1e-5, "normal-frame jet slots vs central differences"},
      {"bracket.antisymmetry", 1e-12, "{x^i, x^j} antisymmetric"},
      {"bracket.jacobi", 1e-8, "Jacobi identity on random polynomials (relative)"},
      {"bracket.kahler", 1e-12, "(rho/sqrt g) {f,h} equals the Kahler bracket (relative)"},
      {"map.tangent_image", 1e-9, "P and S_A map into the tangent plane"},
      {"map.p_squared", 1e-9, "P^2(Y) = -(g/rho^2) Y on tangents"},
      {"map.s_covariant", 1e-12, "S_A from brackets vs covariant form"},
      {"map.compound", 1e-12, "A_A, B_A compositions vs component formulas"},
      {"map.b_weingarten", 1e-9, "B_A(Y) = (g/rho^2) W_A(Y) on tangents"},
      {"trace.p", 1e-12, "Tr P = tr P = 0"},
      {"trace.p_squared", 1e-9, "Tr P^2 = tr P^2 = -2g/rho^2"},
      {"trace.s_squared", 1e-9, "Tr S_A^2 = -(2/rho^2) det h_A"},
      {"trace.ab", 1e-9, "Tr/tr of A_A and B_A equal (g/rho^2) tr W_A"},
      {"trace.ab_squared", 1e-9, "Tr/tr of A_A^2 and B_A^2 equal (g/rho^2)^2 tr W_A^2"},
      {"curvature.k", 1e-9, "bracket Gaussian curvature vs oracle"},
      {"curvature.k_flat", 1e-10, "flat-space bracket form vs general form"},
      {"curvature.h", 1e-9, "bracket mean curvature vs oracle"},
      {"curvature.h_flat", 1e-9, "flat-space bracket form of H vs oracle"},
      {"curvature.sqrt_g", 1e-12, "rho = sqrt g simplified paths vs general"},
      {"connection.antisymmetry", 1e-9, "(D_X)_AB + (D_X)_BA = 0"},
      {"connection.oracle", 1e-9, "(D_X)_AB vs g(N_A, D_X N_B) from jets"},
      {"theorem.weingarten", 1e-8, "grad N_A reconstructed from B_A vs jets"},
      {"theorem.gauss", 1e-8, "Gauss-formula rewrite vs induced Christoffels"},
      {"complex.projection", 1e-9, "-J^2 fixes tangents and kills normals"},
      {"complex.j_squared", 1e-9, "J^2 = -id on the tangent plane"},
      {"complex.oracle", 1e-9, "J_M vs intrinsic complex structure"},
      {"complex.projected_frame", 1e-8, "projected normal frame spans the normal space"},
      {"z.tangent", 1e-9, "Z-vectors orthogonal to e_a"},
      {"z.idempotent", 1e-9, "Z-matrix squared equals itself, trace p"},
      {"z.eigenvalues", 1e-7, "Z-matrix eigenvalues in {0, 1}"},
      {"z.orthonormal", 1e-8, "normal frame from Z eigenvectors orthonormal"},
      {"z.identity", 1e-9, "sum Z Z = g^-1 + (rho^2/g) P^2"},
      {"z.projector", 1e-8, "span of Z frame equals classical normal space"},
      {"lemma.smovef", 1e-8, "Tr S(fN) S(hN') = f h Tr S(N) S(N') (relative)"},
      {"nested.k", 1e-8, "nested-bracket K vs oracle"},
      {"nested.h", 1e-8, "nested-bracket H vs oracle"},
      {"rho.invariance", 1e-8, "K, H, grad N, normal span agree across densities"},
  };
  return defs;
}

inline int check_index(const std::string& name) {
  const auto& defs = check_catalog();
  for (int k = 0; k < kCheckCount; ++k)
    if (name == defs[k].name) return k;
  return -1;
}

/// Per-check tolerances; starts at the catalog defaults.
class Tolerances {
public:
  Tolerances() {
    for (const auto& d : check_catalog()) tol_.push_back(d.tolerance);
  }

  double operator[](int k) const { return tol_.at(k); }
  double operator[](CheckId id) const { return tol_.at(static_cast<int>(id)); }

  void set(const std::string& name, double value) {
    if (!(value > 0.0) || !std::isfinite(value))
      throw InputError("tolerance for '" + name + "' must be a positive number");
    if (name == "all") {
      std::fill(tol_.begin(), tol_.end(), value);
      return;
    }
    const int k = check_index(name);
    if (k < 0) throw InputError("unknown check '" + name + "'");
    tol_[k] = value;
  }

  /// Applies "name=value".
  void apply(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InputError("tolerance override must look like name=value, got '" + assignment + "'");
    const std::string name = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw InputError("bad tolerance value '" + text + "'");
    set(name, v);
  }

private:
  std::vector<double> tol_;
};

/// The densities of the ρ-independence sweep.
inline std::vector<Density> rho_sweep() {
  return {Density::sqrt_g(), Density::unit(), Density::custom(parse("1 + u1^2 + u2^2"))};
}

/// Outcome of all checks at one grid point. NaN marks "not applicable".
struct PointResult {
  UPoint u{};
  bool degenerate = false;
  std::string message;
  std::vector<double> dev;
};

namespace detail {

constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

/// Random polynomial of total degree ≤ 3 in u1, u2 with coefficients in [−1, 1].
inline Expr random_polynomial(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const Expr u1 = Expr::variable("u1"), u2 = Expr::variable("u2");
  Expr out = Expr::constant(coef(rng));
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b) {
      if (a + b == 0) continue;
      out = out + Expr::constant(coef(rng)) * pow(u1, a) * pow(u2, b);
    }
  return out;
}

class Collector {
public:
  explicit Collector(PointResult& r) : r_(r) { r_.dev.assign(kCheckCount, kNotApplicable); }

  void put(CheckId id, double dev) {
    double& slot = r_.dev[static_cast<int>(id)];
    if (std::isnan(dev)) dev = std::numeric_limits<double>::infinity();
    slot = std::isnan(slot) ? dev : std::max(slot, dev);
  }

  /// Runs `f`; a library error inside marks every check in `ids` as failed.
  template <class F>
  void attempt(std::initializer_list<CheckId> ids, F&& f) {
    try {
      f();
    } catch (const Error&) {
      for (CheckId id : ids) put(id, std::numeric_limits<double>::infinity());
    }
  }

private:
  PointResult& r_;
};

inline double mat_dev(const MatD& a, const MatD& b) { return max_abs(a - b); }
inline double vec_dev(const VecD& a, const VecD& b) { return max_abs(a - b); }

/// Everything compared across densities.
struct RhoSignature {
  double K = 0.0;
  VecD H;
  std::vector<VecD> grad_normals;
  MatD span;
  std::optional<double> k_nested;
  std::optional<VecD> h_nested;
};

inline MatD normal_span(const PoissonGeometry& pg) {
  const FramePoint& fp = pg.frame();
  if (fp.flat_ambient || fp.p == 1) return normal_projector(fp, z_frame(pg).nhat);
  return normal_projector(fp, pg.projected_normal_frame());
}

inline RhoSignature rho_signature(const SurfaceSpec& spec, const UPoint& u) {
  const FramePoint fp = frame_at(spec, u);
  const PoissonGeometry pg(fp);
  RhoSignature s;
  s.K = pg.gaussian_curvature();
  s.H = pg.mean_curvature();
  for (int A = 0; A < fp.p; ++A)
    for (int a = 0; a < 2; ++a)
      s.grad_normals.push_back(pg.weingarten_reconstruct(A, {double(a == 0), double(a == 1)}));
  s.span = normal_span(pg);
  if (fp.flat_ambient) {
    s.k_nested = k_nested(fp);
    s.h_nested = h_nested(fp);
  }
  return s;
}

inline double signature_dev(const RhoSignature& a, const RhoSignature& b) {
  double d = std::max(std::fabs(a.K - b.K), vec_dev(a.H, b.H));
  for (std::size_t k = 0; k < a.grad_normals.size(); ++k)
    d = std::max(d, vec_dev(a.grad_normals[k], b.grad_normals[k]));
  d = std::max(d, mat_dev(a.span, b.span));
  if (a.k_nested && b.k_nested) d = std::max(d, std::fabs(*a.k_nested - *b.k_nested));
  if (a.h_nested && b.h_nested) d = std::max(d, vec_dev(*a.h_nested, *b.h_nested));
  return d;
}

inline void frame_checks(Collector& c, const SurfaceSpec& spec, const FramePoint& fp) {
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      c.put(CheckId::frame_metric, std::fabs(fp.inner(fp.e_val[a], fp.e_val[b]) - fp.g_ab(a, b)));
  for (int A = 0; A < fp.p; ++A) {
    for (int B = 0; B < fp.p; ++B)
      c.put(CheckId::frame_orthonormal,
            std::fabs(fp.inner(fp.normal_val[A], fp.normal_val[B]) - (A == B ? 1.0 : 0.0)));
    for (int a = 0; a < 2; ++a)
      c.put(CheckId::frame_orthonormal, std::fabs(fp.inner(fp.normal_val[A], fp.e_val[a])));
    c.put(CheckId::frame_h_symmetric, std::fabs(fp.h[A](0, 1) - fp.h[A](1, 0)));
    const MatD gW = fp.g_ab * fp.W[A];
    c.put(CheckId::frame_weingarten_symmetric, std::fabs(gW(0, 1) - gW(1, 0)));
  }

  c.attempt({CheckId::frame_jet_fd}, [&] {
    const double step = 1e-5;
    for (int b = 0; b < 2; ++b) {
      UPoint up = fp.u, dn = fp.u;
      up[b] += step;
      dn[b] -= step;
      const FramePoint fu = frame_at(spec, up, fp.seed_order);
      const FramePoint fd = frame_at(spec, dn, fp.seed_order);
      for (int A = 0; A < fp.p; ++A) {
        const VecD fdiff = (1.0 / (2.0 * step)) * (fu.normal_val[A] - fd.normal_val[A]);
        c.put(CheckId::frame_jet_fd, vec_dev(fdiff, partials(fp.normals[A], b)));
      }
    }
  });
}

inline void bracket_checks(Collector& c, const FramePoint& fp, const PoissonGeometry& pg,
                           std::mt19937_64& rng) {
  const MatD& Pc = pg.p_map().contra;
  c.put(CheckId::bracket_antisymmetry, max_abs(Pc + transpose(Pc)));

  c.attempt({CheckId::bracket_jacobi, CheckId::bracket_kahler}, [&] {
    for (int trial = 0; trial < 3; ++trial) {
      const Jet2 f = eval_jet(random_polynomial(rng), fp.u[0], fp.u[1]);
      const Jet2 g = eval_jet(random_polynomial(rng), fp.u[0], fp.u[1]);
      const Jet2 h = eval_jet(random_polynomial(rng), fp.u[0], fp.u[1]);
      const Jet1 gh = bracket_jet1(g, h, fp.rho);
      const Jet1 hf = bracket_jet1(h, f, fp.rho);
      const Jet1 fg = bracket_jet1(f, g, fp.rho);
      const double t1 = bracket(f, gh, fp.rho), t2 = bracket(g, hf, fp.rho), t3 = bracket(h, fg, fp.rho);
      const double scale = 1.0 + std::fabs(t1) + std::fabs(t2) + std::fabs(t3);
      c.put(CheckId::bracket_jacobi, std::fabs(t1 + t2 + t3) / scale);
      const double lhs = bracket(f, g, fp.rho) * fp.rho.val / fp.sqrt_g();
      const double rhs = kahler_bracket(fp, f, g);
      c.put(CheckId::bracket_kahler, std::fabs(lhs - rhs) / (1.0 + std::fabs(rhs)));
    }
  });
}

inline void map_checks(Collector& c, const FramePoint& fp, const PoissonGeometry& pg) {
  const double g_r2 = 1.0 / pg.rho2_over_g();

  for (int k = 0; k < fp.m; ++k) {
    const VecD dk = VecD::unit(fp.m, k);
    std::vector<VecD> images{pg.p_map()(dk)};
    for (int A = 0; A < fp.p; ++A) images.push_back(pg.s_map(A)(dk));
    for (const auto& y : images)
      for (int B = 0; B < fp.p; ++B)
        c.put(CheckId::map_tangent_image, std::fabs(fp.inner(y, fp.normal_val[B])));
  }
  for (int a = 0; a < 2; ++a) {
    const VecD& e = fp.e_val[a];
    c.put(CheckId::map_p_squared, vec_dev(pg.p_map()(pg.p_map()(e)), -g_r2 * e));
  }

  c.attempt({CheckId::trace_p, CheckId::trace_p_squared}, [&] {
    const Traces tp = traces(pg.p_map(), fp);
    c.put(CheckId::trace_p, std::max(std::fabs(tp.full), std::fabs(tp.restricted)));
    const Traces tp2 = traces(compose(pg.p_map(), pg.p_map(), fp), fp);
    c.put(CheckId::trace_p_squared, std::max(std::fabs(tp2.full + 2.0 * g_r2),
                                             std::fabs(tp2.restricted + 2.0 * g_r2)));
  });

  const double r2 = fp.rho.val * fp.rho.val;
  for (int A = 0; A < fp.p; ++A) {
    c.put(CheckId::map_s_covariant, mat_dev(pg.s_map(A).contra, pg.s_map_covariant(A).contra));
    const auto cmp = pg.compound_components(A);
    c.put(CheckId::map_compound, std::max(mat_dev(cmp[0], pg.a_map(A).mixed),
                                          mat_dev(cmp[1], pg.b_map(A).mixed)));
    for (int b = 0; b < 2; ++b) {
      const VecD We = fp.tangent({fp.W[A](0, b), fp.W[A](1, b)});
      c.put(CheckId::map_b_weingarten, vec_dev(pg.b_map(A)(fp.e_val[b]), g_r2 * We));
    }

    c.attempt({CheckId::trace_s_squared}, [&] {
      const double ts = trace(pg.s_map(A).mixed * pg.s_map(A).mixed);
      c.put(CheckId::trace_s_squared, std::fabs(ts + 2.0 / r2 * det(fp.h[A])));
    });
    c.attempt({CheckId::trace_ab, CheckId::trace_ab_squared}, [&] {
      const double trW = trace(fp.W[A]);
      const double trW2 = trace(fp.W[A] * fp.W[A]);
      for (const TangentMap* t : {&pg.a_map(A), &pg.b_map(A)}) {
        const Traces t1 = traces(*t, fp);
        c.put(CheckId::trace_ab, std::max(std::fabs(t1.full - g_r2 * trW),
                                          std::fabs(t1.restricted - g_r2 * trW)));
        const Traces t2 = traces(compose(*t, *t, fp), fp);
        const double expect = g_r2 * g_r2 * trW2;
        c.put(CheckId::trace_ab_squared,
              std::max(std::fabs(t2.full - expect), std::fabs(t2.restricted - expect)));
      }
    });
  }
}

inline void curvature_checks(Collector& c, const FramePoint& fp, const PoissonGeometry& pg) {
  const double Kc = classical_gaussian_curvature(fp);
  const double Kp = pg.gaussian_curvature();
  const VecD Hc = classical_mean_curvature(fp);
  const VecD Hp = pg.mean_curvature();
  c.put(CheckId::curvature_k, std::fabs(Kp - Kc));
  c.put(CheckId::curvature_h, vec_dev(Hp, Hc));
  if (fp.flat_ambient) {
    c.put(CheckId::curvature_k_flat, std::fabs(pg.gaussian_curvature_flat() - Kp));
    c.put(CheckId::curvature_h_flat, vec_dev(pg.mean_curvature_flat(), Hc));
  }
  if (fp.density_mode == DensityMode::sqrt_g) {
    c.put(CheckId::curvature_sqrt_g, std::fabs(pg.gaussian_curvature_sqrt_g() - Kp));
    c.put(CheckId::curvature_sqrt_g, vec_dev(pg.mean_curvature_sqrt_g(), Hp));
    for (int a = 0; a < 2; ++a) {
      const TangentComponents X{double(a == 0), double(a == 1)};
      for (int A = 0; A < fp.p; ++A)
        c.put(CheckId::curvature_sqrt_g,
              vec_dev(pg.weingarten_reconstruct_sqrt_g(A, X), pg.weingarten_reconstruct(A, X)));
      for (int b = 0; b < 2; ++b)
        c.put(CheckId::curvature_sqrt_g,
              vec_dev(pg.gauss_formula_rewrite_sqrt_g(X, b), pg.gauss_formula_rewrite(X, b)));
    }
  }
}

inline void theorem_checks(Collector& c, const FramePoint& fp, const PoissonGeometry& pg) {
  const auto ic = induced_christoffel(fp);
  for (int a = 0; a < 2; ++a) {
    const TangentComponents X{double(a == 0), double(a == 1)};
    const VecD Xv = fp.tangent(X);
    for (int A = 0; A < fp.p; ++A) {
      c.put(CheckId::theorem_weingarten,
            vec_dev(pg.weingarten_reconstruct(A, X), classical_normal_derivative(fp, A, X)));
      for (int B = 0; B < fp.p; ++B) {
        const double dab = pg.normal_connection(A, B, Xv);
        c.put(CheckId::connection_antisymmetry, std::fabs(dab + pg.normal_connection(B, A, Xv)));
        c.put(CheckId::connection_oracle, std::fabs(dab - classical_normal_connection(fp, A, B, X)));
      }
    }
    for (int b = 0; b < 2; ++b) {
      const VecD r = pg.gauss_formula_rewrite(X, b);
      c.put(CheckId::theorem_gauss, vec_dev(r, fp.tangent({ic[0][a][b], ic[1][a][b]})));
      for (int A = 0; A < fp.p; ++A)
        c.put(CheckId::theorem_gauss, std::fabs(fp.inner(r, fp.normal_val[A])));
    }
  }
}

inline void complex_checks(Collector& c, const FramePoint& fp, const PoissonGeometry& pg) {
  for (int a = 0; a < 2; ++a) {
    const VecD& e = fp.e_val[a];
    c.put(CheckId::complex_projection, vec_dev(pg.projection(e), e));
    c.put(CheckId::complex_j_squared, vec_dev(pg.complex_structure(pg.complex_structure(e)), -1.0 * e));
    const auto Jc = classical_complex_structure(fp, {double(a == 0), double(a == 1)});
    c.put(CheckId::complex_oracle, vec_dev(pg.complex_structure(e), fp.tangent(Jc)));
  }
  for (int A = 0; A < fp.p; ++A)
    c.put(CheckId::complex_projection, max_abs(pg.projection(fp.normal_val[A])));
  c.attempt({CheckId::complex_projected_frame}, [&] {
    const MatD ref = normal_projector(fp, fp.normal_val);
    c.put(CheckId::complex_projected_frame,
          mat_dev(normal_projector(fp, pg.projected_normal_frame()), ref));
  });
}

inline void z_checks(Collector& c, const FramePoint& fp, const PoissonGeometry& pg) {
  if (!fp.flat_ambient && fp.p > 1) return;
  c.attempt({CheckId::z_tangent, CheckId::z_idempotent, CheckId::z_eigenvalues,
             CheckId::z_orthonormal, CheckId::z_identity, CheckId::z_projector},
            [&] {
              const ZFrame zf = z_frame(pg);
              for (const auto& z : zf.z_vectors)
                for (int a = 0; a < 2; ++a)
                  c.put(CheckId::z_tangent, std::fabs(fp.inner(z, fp.e_val[a])));
              c.put(CheckId::z_idempotent, mat_dev(zf.zmatrix * zf.zmatrix, zf.zmatrix));
              c.put(CheckId::z_idempotent, std::fabs(trace(zf.zmatrix) - fp.p));
              for (std::size_t k = 0; k < zf.eigenvalues.size(); ++k) {
                const double mu = zf.eigenvalues[k];
                c.put(CheckId::z_eigenvalues, std::min(std::fabs(mu), std::fabs(mu - 1.0)));
              }
              for (std::size_t I = 0; I < zf.nhat.size(); ++I)
                for (std::size_t J = 0; J < zf.nhat.size(); ++J)
                  c.put(CheckId::z_orthonormal,
                        std::fabs(fp.inner(zf.nhat[I], zf.nhat[J]) - (I == J ? zf.eigenvalues[I] : 0.0)));
              c.put(CheckId::z_identity, zf.identity_residual);
              c.put(CheckId::z_projector,
                    mat_dev(normal_projector(fp, zf.nhat), normal_projector(fp, fp.normal_val)));
            });
}

inline void lemma_checks(Collector& c, const FramePoint& fp, std::mt19937_64& rng) {
  c.attempt({CheckId::lemma_smovef}, [&] {
    const auto& N = fp.normals.front();
    const auto& N2 = fp.normals.back();
    for (int trial = 0; trial < 10; ++trial) {
      const Expr f = random_polynomial(rng);
      const Expr h = random_polynomial(rng);
      const auto sides = smovef_sides(fp, N, N2, f, h);
      c.put(CheckId::lemma_smovef, std::fabs(sides.lhs - sides.rhs) / (1.0 + std::fabs(sides.rhs)));
    }
  });
}

inline void nested_checks(Collector& c, const FramePoint& fp) {
  if (!fp.flat_ambient) return;
  c.put(CheckId::nested_k, std::fabs(k_nested(fp) - classical_gaussian_curvature(fp)));
  c.put(CheckId::nested_h, vec_dev(h_nested(fp), classical_mean_curvature(fp)));
}

inline void rho_checks(Collector& c, const SurfaceSpec& spec, const UPoint& u) {
  c.attempt({CheckId::rho_invariance}, [&] {
    std::vector<RhoSignature> sigs;
    for (const auto& d : rho_sweep()) {
      SurfaceSpec s = spec;
      s.density = d;
      sigs.push_back(rho_signature(s, u));
    }
    for (std::size_t a = 0; a < sigs.size(); ++a)
      for (std::size_t b = a + 1; b < sigs.size(); ++b)
        c.put(CheckId::rho_invariance, signature_dev(sigs[a], sigs[b]));
  });
}

}  // namespace detail

/// Runs every check at `u`. A degenerate tangent plane yields a result with
/// `degenerate` set; other library errors propagate. `seed` feeds the random
/// test functions, so equal seeds give equal results.
inline PointResult evaluate_point(const SurfaceSpec& spec, const UPoint& u, std::uint64_t seed) {
  PointResult r;
  r.u = u;
  std::optional<FramePoint> fp;
  try {
    fp.emplace(frame_at(spec, u));
  } catch (const DegenerateError& e) {
    r.degenerate = true;
    r.message = e.what();
    return r;
  }
  const PoissonGeometry pg(*fp);
  std::mt19937_64 rng(seed);
  detail::Collector c(r);
  detail::frame_checks(c, spec, *fp);
  detail::bracket_checks(c, *fp, pg, rng);
  detail::map_checks(c, *fp, pg);
  detail::curvature_checks(c, *fp, pg);
  detail::theorem_checks(c, *fp, pg);
  detail::complex_checks(c, *fp, pg);
  detail::z_checks(c, *fp, pg);
  detail::lemma_checks(c, *fp, rng);
  detail::nested_checks(c, *fp);
  detail::rho_checks(c, spec, u);
  return r;
}

/// Evaluates fn(k) for k in [0, n) on `jobs` threads. Results land in
/// per-index slots; the first exception by index is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int jobs, F&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      try {
        out[k] = fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct CheckRecord {
  std::string name;
  double tolerance = 0.0;
  double max_deviation = 0.0;
  UPoint location{};
  std::size_t points = 0;  // points where the check applied
  bool applicable() const { return points > 0; }
  bool passed() const { return !applicable() || max_deviation <= tolerance; }
};

struct Report {
  std::string label;
  std::string density;
  GridSpec grid;
  std::size_t evaluated = 0;
  std::vector<UPoint> skipped;
  std::vector<CheckRecord> checks;

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += !c.passed();
    return n;
  }
  /// Skipped points are reported but do not fail the run.
  bool passed() const { return failures() == 0; }
};

struct RunOptions {
  Tolerances tolerances;
  std::optional<Density> density;  // overrides the spec's density
  int jobs = 1;
};

inline Report run_checks(const LoadedSpec& loaded, const RunOptions& opt = {}) {
  SurfaceSpec spec = loaded.surface;
  if (opt.density) spec.density = *opt.density;
  const auto pts = loaded.grid.points();
  const auto results = parallel_map<PointResult>(pts.size(), opt.jobs, [&](std::size_t k) {
    return evaluate_point(spec, pts[k], 0x9e3779b97f4a7c15ULL ^ k);
  });

  Report rep;
  rep.label = spec.label;
  rep.density = spec.density.describe();
  rep.grid = loaded.grid;
  const auto& defs = check_catalog();
  for (int k = 0; k < kCheckCount; ++k)
    rep.checks.push_back({defs[k].name, opt.tolerances[k], 0.0, {}, 0});
  for (const auto& r : results) {
    if (r.degenerate) {
      rep.skipped.push_back(r.u);
      continue;
    }
    ++rep.evaluated;
    for (int k = 0; k < kCheckCount; ++k) {
      const double d = r.dev[k];
      if (std::isnan(d)) continue;
      auto& rec = rep.checks[k];
      if (rec.points == 0 || d > rec.max_deviation) {
        rec.max_deviation = d;
        rec.location = r.u;
      }
      ++rec.points;
    }
  }
  return rep;
}

namespace detail {

inline std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

inline std::string format_point(const UPoint& u) {
  return "(" + format("%.6g", u[0]) + ", " + format("%.6g", u[1]) + ")";
}

}  // namespace detail

/// Human-readable report.
inline std::string report_text(const Report& rep) {
  std::string out;
  char line[256];
  out += "surface   " + (rep.label.empty() ? std::string("(unlabeled)") : rep.label) + "\n";
  out += "density   " + rep.density + "\n";
  std::snprintf(line, sizeof line, "grid      %d x %d, %zu evaluated, %zu skipped (degenerate)\n",
                rep.grid.u1.count, rep.grid.u2.count, rep.evaluated, rep.skipped.size());
  out += line;
  for (const auto& u : rep.skipped) out += "  skipped " + detail::format_point(u) + "\n";
  out += "\n";
  std::snprintf(line, sizeof line, "%-28s %-10s %-12s %-26s %7s  %s\n", "check", "tolerance",
                "max_dev", "at (u1, u2)", "points", "status");
  out += line;
  std::size_t na = 0;
  for (const auto& c : rep.checks) {
    const char* status = !c.applicable() ? "n/a" : c.passed() ? "pass" : "FAIL";
    na += !c.applicable();
    const std::string dev = c.applicable() ? detail::format("%.3e", c.max_deviation) : "-";
    const std::string at = c.applicable() ? detail::format_point(c.location) : "-";
    std::snprintf(line, sizeof line, "%-28s %-10s %-12s %-26s %7zu  %s\n", c.name.c_str(),
                  detail::format("%.1e", c.tolerance).c_str(), dev.c_str(), at.c_str(), c.points,
                  status);
    out += line;
  }
  std::snprintf(line, sizeof line, "\nresult    %s (%zu checks, %zu failed, %zu not applicable)\n",
                rep.passed() ? "PASS" : "FAIL", rep.checks.size(), rep.failures(), na);
  out += line;
  return out;
}

/// Machine-readable report.
inline nlohmann::ordered_json report_json(const Report& rep) {
  using nlohmann::ordered_json;
  auto axis = [](const AxisSpec& a) {
    return ordered_json{{"min", a.min}, {"max", a.max}, {"count", a.count}};
  };
  ordered_json j;
  j["label"] = rep.label;
  j["density"] = rep.density;
  j["grid"] = {{"u1", axis(rep.grid.u1)}, {"u2", axis(rep.grid.u2)}};
  j["evaluated"] = rep.evaluated;
  ordered_json skipped = ordered_json::array();
  for (const auto& u : rep.skipped) skipped.push_back({u[0], u[1]});
  j["skipped"] = skipped;
  ordered_json checks = ordered_json::array();
  for (const auto& c : rep.checks) {
    ordered_json r;
    r["name"] = c.name;
    r["tolerance"] = c.tolerance;
    r["points"] = c.points;
    if (c.applicable()) {
      r["max_deviation"] = std::isfinite(c.max_deviation) ? ordered_json(c.max_deviation)
                                                          : ordered_json("inf");
      r["location"] = {c.location[0], c.location[1]};
    } else {
      r["max_deviation"] = nullptr;
      r["location"] = nullptr;
    }
    r["status"] = !c.applicable() ? "n/a" : c.passed() ? "pass" : "fail";
    checks.push_back(std::move(r));
  }
  j["checks"] = checks;
  j["passed"] = rep.passed();
  return j;
}

}  // namespace psurf
