#pragma once

// Textbook differential geometry of an embedded surface, used as the
// independent reference for every bracket formula: tangent frame, induced
// metric, an orthonormal normal frame with its first u-derivatives, second
// fundamental forms, Weingarten maps and curvatures.
//
// Conventions:
//   ε^{12} = +1 in the (u1, u2) order of the surface description.
//   h_{A,ab} = −ḡ(e_a, ∇̄_b N_A),  (W_A)^a_b = g^{ac} h_{A,cb},
//   H = ½ Σ_A (tr W_A) N_A.
// The normal frame is the Gram-Schmidt completion of (e_1, e_2) by the
// coordinate vectors ∂_1..∂_m, taking at each step the coordinate vector with
// the largest remaining normal component (lowest index on ties). The chosen
// order is recorded in FramePoint::seed_order and can be replayed.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "psurf/ambient.hpp"
#include "psurf/error.hpp"
#include "psurf/expr.hpp"
#include "psurf/jet.hpp"
#include "psurf/tensor.hpp"

namespace psurf {

inline constexpr double kDegeneracyThreshold = 1e-10;  // on √g
inline constexpr double kNormalDropTol = 1e-8;

using UPoint = std::array<double, 2>;
/// Components X^a of a tangent vector in the basis e_1, e_2.
using TangentComponents = std::array<double, 2>;

enum class DensityMode { sqrt_g, unit, custom };

struct Density {
  DensityMode mode = DensityMode::sqrt_g;
  Expr expr;  // used when mode == custom

  static Density sqrt_g() { return {}; }
  static Density unit() { return {DensityMode::unit, Expr::constant(1.0)}; }
  static Density custom(Expr e) { return {DensityMode::custom, std::move(e)}; }

  std::string describe() const {
    switch (mode) {
      case DensityMode::sqrt_g: return "sqrt_g";
      case DensityMode::unit: return "one";
      case DensityMode::custom: return to_string(expr);
    }
    return "?";
  }
};

struct SurfaceSpec {
  AmbientManifold ambient = AmbientManifold::euclidean(3);
  std::vector<Expr> embedding;
  Density density;
  std::string label;

  int dim() const { return ambient.dim(); }
  int codim() const { return ambient.dim() - 2; }

  /// Dimension and variable checks; throws InputError.
  void validate() const {
    if (embedding.size() != static_cast<std::size_t>(dim()))
      throw InputError("embedding has " + std::to_string(embedding.size()) +
                       " coordinates but the ambient dimension is " + std::to_string(dim()));
    for (const auto& e : embedding)
      for (const auto& v : variables(e))
        if (v != "u1" && v != "u2")
          throw InputError("embedding coordinate uses '" + v + "'; only u1, u2 are allowed");
    if (density.mode == DensityMode::custom)
      for (const auto& v : variables(density.expr))
        if (v != "u1" && v != "u2")
          throw InputError("density uses '" + v + "'; only u1, u2 are allowed");
  }
};

struct FramePoint {
  UPoint u{};
  int m = 0;
  int p = 0;
  bool flat_ambient = true;
  DensityMode density_mode = DensityMode::sqrt_g;

  VecD x;
  std::vector<Jet2> x_jet;           // embedding coordinates through second order
  std::array<Vec<Jet1>, 2> e;        // e_a = ∂_a x with first u-derivatives
  std::array<VecD, 2> e_val;

  MatD gbar, gbar_inv;               // ḡ at x
  Mat<Jet1> gbar_jet;                // ḡ along the surface
  Christoffel gamma;                 // Γ̄ at x

  Mat<Jet1> g_jet = Mat<Jet1>(2, 2); // induced metric with first u-derivatives
  MatD g_ab = MatD(2, 2), g_inv = MatD(2, 2);
  double g = 0.0;                    // det g_ab
  Jet1 rho;

  std::vector<Vec<Jet1>> normals;
  std::vector<VecD> normal_val;
  std::vector<int> seed_order;       // coordinate vectors used for N_1..N_p
  std::vector<std::array<VecD, 2>> nabla_normals;  // ∇̄_b N_A
  std::vector<MatD> h, W;
  double ambient_term = 0.0;         // ḡ(R̄(e1,e2)e2, e1)

  double sqrt_g() const { return std::sqrt(g); }

  /// X^a e_a as an ambient vector.
  VecD tangent(const TangentComponents& X) const {
    VecD v(m);
    for (int i = 0; i < m; ++i) v[i] = X[0] * e_val[0][i] + X[1] * e_val[1][i];
    return v;
  }

  double inner(const VecD& a, const VecD& b) const { return psurf::inner(a, gbar, b); }
  double norm(const VecD& a) const { return std::sqrt(std::fabs(inner(a, a))); }
};

namespace detail {

inline Jet1 density_jet(const SurfaceSpec& spec, const UPoint& u, const Mat<Jet1>& g_jet) {
  switch (spec.density.mode) {
    case DensityMode::sqrt_g: return sqrt(det(g_jet));
    case DensityMode::unit: return Jet1(1.0);
    case DensityMode::custom: return truncate(eval_jet(spec.density.expr, u[0], u[1]));
  }
  return Jet1(1.0);
}

}  // namespace detail

/// All classically computed pointwise data at parameter point u. Pass
/// `seed_order` to replay a recorded normal-frame construction.
inline FramePoint frame_at(const SurfaceSpec& spec, const UPoint& u,
                           const std::optional<std::vector<int>>& seed_order = std::nullopt) {
  const int m = spec.dim();
  FramePoint fp;
  fp.u = u;
  fp.m = m;
  fp.p = m - 2;
  fp.flat_ambient = spec.ambient.is_euclidean();
  fp.density_mode = spec.density.mode;

  fp.x = VecD(m);
  std::vector<Jet1> x1(m);
  for (int i = 0; i < m; ++i) {
    fp.x_jet.push_back(eval_jet(spec.embedding.at(i), u[0], u[1]));
    fp.x[i] = fp.x_jet[i].val;
    x1[i] = truncate(fp.x_jet[i]);
  }
  for (int a = 0; a < 2; ++a) {
    fp.e[a] = Vec<Jet1>(m);
    for (int i = 0; i < m; ++i) fp.e[a][i] = partial(fp.x_jet[i], a);
    fp.e_val[a] = values(fp.e[a]);
  }

  const MetricAt mt = spec.ambient.metric_at(fp.x);
  fp.gbar = mt.g;
  fp.gbar_inv = mt.g_inv;
  fp.gbar_jet = spec.ambient.metric_along(x1);
  fp.gamma = spec.ambient.christoffel(fp.x);

  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) fp.g_jet(a, b) = psurf::inner(fp.e[a], fp.gbar_jet, fp.e[b]);
  fp.g_ab = values(fp.g_jet);
  fp.g = det(fp.g_ab);
  if (!(fp.g > 0.0) || std::sqrt(fp.g) < kDegeneracyThreshold)
    throw DegenerateError("degenerate tangent plane at u=(" + std::to_string(u[0]) + ", " +
                          std::to_string(u[1]) + "): sqrt(g) below threshold");
  fp.g_inv = inverse(fp.g_ab);

  fp.rho = detail::density_jet(spec, u, fp.g_jet);
  if (fp.rho.val == 0.0)
    throw InputError("density vanishes at u=(" + std::to_string(u[0]) + ", " +
                     std::to_string(u[1]) + ")");

  // Normal frame over jets.
  const auto tangent = gram_schmidt<Jet1>({fp.e[0], fp.e[1]}, fp.gbar_jet, kNormalDropTol);
  if (tangent.size() != 2) throw DegenerateError("tangent vectors are linearly dependent");
  std::vector<Vec<Jet1>> coords;
  for (int k = 0; k < m; ++k) coords.push_back(Vec<Jet1>::unit(m, k));
  if (seed_order) {
    fp.normals = extend_in_order(tangent, coords, *seed_order, fp.gbar_jet, kNormalDropTol);
    fp.seed_order = *seed_order;
  } else {
    auto [added, chosen] = extend_orthonormal(tangent, coords, fp.gbar_jet, fp.p, kNormalDropTol);
    fp.normals = std::move(added);
    fp.seed_order = std::move(chosen);
  }
  if (fp.normals.size() != static_cast<std::size_t>(fp.p))
    throw DegenerateError("normal frame construction produced fewer than p normals");

  for (int A = 0; A < fp.p; ++A) {
    fp.normal_val.push_back(values(fp.normals[A]));
    std::array<VecD, 2> nab;
    for (int b = 0; b < 2; ++b)
      nab[b] = partials(fp.normals[A], b) + fp.gamma.contract(fp.e_val[b], fp.normal_val[A]);
    fp.nabla_normals.push_back(nab);
    MatD hA(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) hA(a, b) = -psurf::inner(fp.e_val[a], fp.gbar, nab[b]);
    fp.W.push_back(fp.g_inv * hA);
    fp.h.push_back(std::move(hA));
  }
  fp.ambient_term = spec.ambient.riemann_term(fp.x, fp.e_val[0], fp.e_val[1]);
  return fp;
}

/// K = (1/g) ḡ(R̄(e1,e2)e2,e1) + Σ_A det(h_A)/g.
inline double classical_gaussian_curvature(const FramePoint& fp) {
  double s = fp.ambient_term;
  for (const auto& hA : fp.h) s += det(hA);
  return s / fp.g;
}

/// The two addends of classical_gaussian_curvature: ambient term/g and Σ det h/g.
inline std::array<double, 2> classical_gaussian_curvature_terms(const FramePoint& fp) {
  double d = 0.0;
  for (const auto& hA : fp.h) d += det(hA);
  return {fp.ambient_term / fp.g, d / fp.g};
}

/// H = ½ Σ_A (tr W_A) N_A.
inline VecD classical_mean_curvature(const FramePoint& fp) {
  VecD H(fp.m);
  for (int A = 0; A < fp.p; ++A) H += (0.5 * trace(fp.W[A])) * fp.normal_val[A];
  return H;
}

/// J(X)^a = (1/√g) ε^{ac} g_cb X^b.
inline TangentComponents classical_complex_structure(const FramePoint& fp,
                                                     const TangentComponents& X) {
  const double s = 1.0 / fp.sqrt_g();
  const double gX0 = fp.g_ab(0, 0) * X[0] + fp.g_ab(0, 1) * X[1];
  const double gX1 = fp.g_ab(1, 0) * X[0] + fp.g_ab(1, 1) * X[1];
  // ε^{12} = 1, ε^{21} = −1
  return {s * gX1, -s * gX0};
}

/// Christoffel symbols of the induced metric, Γ^c_{ab}, indexed [c][a][b].
inline std::array<std::array<std::array<double, 2>, 2>, 2> induced_christoffel(const FramePoint& fp) {
  std::array<std::array<std::array<double, 2>, 2>, 2> out{};
  auto dg = [&](int a, int b, int c) { return fp.g_jet(a, b).d(c); };  // ∂_c g_ab
  for (int c = 0; c < 2; ++c)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double s = 0.0;
        for (int d = 0; d < 2; ++d) s += fp.g_inv(c, d) * (dg(d, b, a) + dg(d, a, b) - dg(a, b, d));
        out[c][a][b] = 0.5 * s;
      }
  return out;
}

/// ∇̄_X N_A by direct differentiation of the normal frame jets.
inline VecD classical_normal_derivative(const FramePoint& fp, int A, const TangentComponents& X) {
  return X[0] * fp.nabla_normals[A][0] + X[1] * fp.nabla_normals[A][1];
}

/// (D_X)_{AB} = ḡ(N_A, ∇̄_X N_B) from the frame jets.
inline double classical_normal_connection(const FramePoint& fp, int A, int B,
                                          const TangentComponents& X) {
  return fp.inner(fp.normal_val[A], classical_normal_derivative(fp, B, X));
}

/// Orthogonal projector onto the normal space, as a mixed (1,1) table built
/// from the classical frame: Σ_A N_A ⊗ ḡ(N_A, ·).
inline MatD normal_projector(const FramePoint& fp, const std::vector<VecD>& normals) {
  MatD P(fp.m, fp.m);
  for (const auto& n : normals) {
    const VecD low = fp.gbar * n;
    for (int i = 0; i < fp.m; ++i)
      for (int j = 0; j < fp.m; ++j) P(i, j) += n[i] * low[j];
  }
  return P;
}

}  // namespace psurf
