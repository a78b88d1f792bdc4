#pragma once

// Differential geometry of an embedded surface expressed through the Poisson
// bracket {f,h} = (1/ρ) ε^{ab} ∂_a f ∂_b h on functions of the surface.
//
// Index conventions for maps TM → TM built from a contravariant table T^{ij}:
// the second index is lowered, T(X) = T^{ik} ḡ_{kj} X^j ∂_i, and the
// transpose is T^T(X) = ḡ_{ik} T^{kj} X^i ∂_j.

#include <array>
#include <cmath>
#include <vector>

#include "psurf/classical.hpp"
#include "psurf/error.hpp"
#include "psurf/jet.hpp"
#include "psurf/tensor.hpp"

namespace psurf {

/// {f,h} at a point from the first-order slots of f, h and the density ρ.
template <class F, class H, class R>
double bracket(const F& f, const H& h, const R& rho) {
  if (value(rho) == 0.0) throw EvalError("Poisson bracket with vanishing density");
  return (f.d1 * h.d2 - f.d2 * h.d1) / value(rho);
}

/// {f,h} together with its first u-partials. Needs second-order jets of the
/// arguments and a first-order jet of the density.
inline Jet1 bracket_jet1(const Jet2& f, const Jet2& h, const Jet1& rho) {
  if (rho.val == 0.0) throw EvalError("Poisson bracket with vanishing density");
  const Jet1 num = partial(f, 0) * partial(h, 1) - partial(f, 1) * partial(h, 0);
  return num / rho;
}

/// Value-level promotion so that nested brackets can be fed back as Jet2
/// arguments; second slots are left zero and must not be consumed.
inline Jet2 as_first_order_jet2(const Jet1& j) { return {j.val, j.d1, j.d2, 0.0, 0.0, 0.0}; }

/// Kähler bracket {f,h}_Ω = (1/√g) ε^{ab} ∂_a f ∂_b h.
template <class F, class H>
double kahler_bracket(const FramePoint& fp, const F& f, const H& h) {
  return bracket(f, h, fp.sqrt_g());
}

/// A map TM → TM in ambient coordinates.
struct TangentMap {
  MatD contra;  // T^{ij}
  MatD mixed;   // T^i_k = T^{ij} ḡ_{jk}

  static TangentMap from_contra(MatD c, const FramePoint& fp) {
    MatD mx = c * fp.gbar;
    return {std::move(c), std::move(mx)};
  }
  static TangentMap from_mixed(MatD mx, const FramePoint& fp) {
    MatD c = mx * fp.gbar_inv;
    return {std::move(c), std::move(mx)};
  }

  VecD operator()(const VecD& X) const { return mixed * X; }
};

inline TangentMap compose(const TangentMap& a, const TangentMap& b, const FramePoint& fp) {
  return TangentMap::from_mixed(a.mixed * b.mixed, fp);
}

struct Traces {
  double full = 0.0;        // Tr T = T^i_i
  double restricted = 0.0;  // tr T = T^a_a on TΣ
};

/// Components T^a_b of a map with tangent image, restricted to TΣ:
/// T(e_b) expanded as g^{ac} ḡ(T(e_b), e_c) e_a. Throws if an image has a
/// normal component above `tangent_tol` (relative to its size).
inline MatD restrict_to_surface(const TangentMap& t, const FramePoint& fp,
                                double tangent_tol = 1e-7) {
  MatD r(2, 2);
  for (int b = 0; b < 2; ++b) {
    const VecD y = t(fp.e_val[b]);
    for (int A = 0; A < fp.p; ++A)
      if (std::fabs(fp.inner(y, fp.normal_val[A])) > tangent_tol * (1.0 + fp.norm(y)))
        throw Error("restricted trace: map image has a normal component");
    const double c0 = fp.inner(y, fp.e_val[0]);
    const double c1 = fp.inner(y, fp.e_val[1]);
    for (int a = 0; a < 2; ++a) r(a, b) = fp.g_inv(a, 0) * c0 + fp.g_inv(a, 1) * c1;
  }
  return r;
}

inline Traces traces(const TangentMap& t, const FramePoint& fp) {
  return {trace(t.mixed), trace(restrict_to_surface(t, fp))};
}

/// The bracket-built maps P, S_A, A_A, B_A at one point, and every identity
/// expressed through them. Holds a pointer to `fp`, which must outlive it.
class PoissonGeometry {
public:
  explicit PoissonGeometry(const FramePoint& fp) : fp_(&fp) {
    const int m = fp.m;
    MatD pc(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) pc(i, j) = bracket(fp.x_jet[i], fp.x_jet[j], fp.rho);
    P_ = TangentMap::from_contra(std::move(pc), fp);

    for (int A = 0; A < fp.p; ++A) {
      const auto& n = fp.normals[A];
      MatD sc(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double s = bracket(fp.x_jet[i], n[j], fp.rho);
          for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) s += P_.contra(i, k) * fp.gamma(j, k, l) * n[l].val;
          sc(i, j) = s;
        }
      S_.push_back(TangentMap::from_contra(std::move(sc), fp));
      const MatD st_mixed = transpose(S_.back().contra) * fp.gbar;
      A_.push_back(TangentMap::from_mixed(-1.0 * (P_.mixed * st_mixed), fp));
      B_.push_back(TangentMap::from_mixed(P_.mixed * S_.back().mixed, fp));
    }
  }

  const FramePoint& frame() const { return *fp_; }
  int codim() const { return fp_->p; }

  /// P^{ij} = {x^i, x^j}.
  const TangentMap& p_map() const { return P_; }
  /// S_A^{ij} = {x^i, n_A^j} + {x^i, x^k} Γ̄^j_{kl} n_A^l.
  const TangentMap& s_map(int A) const { return S_.at(A); }
  /// A_A = −P S_A^T.
  const TangentMap& a_map(int A) const { return A_.at(A); }
  /// B_A = P S_A.
  const TangentMap& b_map(int A) const { return B_.at(A); }

  /// S_A from its covariant form (1/ρ) ε^{ab} (∂_a x^i)(∇̄_b N_A)^j.
  TangentMap s_map_covariant(int A) const {
    const FramePoint& fp = *fp_;
    MatD sc(fp.m, fp.m);
    const auto& nab = fp.nabla_normals[A];
    for (int i = 0; i < fp.m; ++i)
      for (int j = 0; j < fp.m; ++j)
        sc(i, j) = (fp.e_val[0][i] * nab[1][j] - fp.e_val[1][i] * nab[0][j]) / fp.rho.val;
    return TangentMap::from_contra(std::move(sc), fp);
  }

  /// (A_A)^i_k and (B_A)^i_k from their expanded bracket component formulas.
  std::array<MatD, 2> compound_components(int A) const {
    const FramePoint& fp = *fp_;
    const int m = fp.m;
    const auto& n = fp.normals[A];
    const MatD& G = fp.gbar;
    const MatD& Pc = P_.contra;
    MatD nx(m, m), xn(m, m), gn(m, m);  // {n^a, x^b}, {x^a, n^b}, Γ̄^a_{bl} n^l
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        nx(a, b) = bracket(n[a], fp.x_jet[b], fp.rho);
        xn(a, b) = bracket(fp.x_jet[a], n[b], fp.rho);
        double s = 0.0;
        for (int l = 0; l < m; ++l) s += fp.gamma(a, b, l) * n[l].val;
        gn(a, b) = s;
      }
    // (A)^i_k = P^{ij} ḡ_{jj'} {n^{j'}, x^{k'}} ḡ_{k'k} + P^{ij} ḡ_{jj'} Γ̄^{j'}_{ll'} n^{l'} P^{lk'} ḡ_{k'k}
    const MatD PG = Pc * G;
    MatD a_cmp = PG * nx * G + PG * gn * Pc * G;
    // (B)^i_k = P^{ij} ḡ_{jj'} {x^{j'}, n^{k'}} ḡ_{k'k} + P^{ij} ḡ_{jj'} P^{j'l} Γ̄^{k'}_{ll'} n^{l'} ḡ_{k'k}
    MatD b_cmp = PG * xn * G + PG * Pc * transpose(gn) * G;
    return {std::move(a_cmp), std::move(b_cmp)};
  }

  double rho2_over_g() const { return fp_->rho.val * fp_->rho.val / fp_->g; }

  /// K = (1/g) ḡ(R̄(e1,e2)e2,e1) − (ρ²/2g) Σ_A Tr S_A².
  double gaussian_curvature() const {
    double s = 0.0;
    for (const auto& S : S_) s += trace(S.mixed * S.mixed);
    return fp_->ambient_term / fp_->g - 0.5 * rho2_over_g() * s;
  }

  /// Flat-ambient form K = −(ρ²/2g) Σ_A Σ_ij {x^i, n_A^j}{x^j, n_A^i}.
  double gaussian_curvature_flat() const {
    const FramePoint& fp = *fp_;
    if (!fp.flat_ambient) throw Error("flat-space curvature formula needs a euclidean ambient");
    double s = 0.0;
    for (int A = 0; A < fp.p; ++A)
      for (int i = 0; i < fp.m; ++i)
        for (int j = 0; j < fp.m; ++j)
          s += bracket(fp.x_jet[i], fp.normals[A][j], fp.rho) *
               bracket(fp.x_jet[j], fp.normals[A][i], fp.rho);
    return -0.5 * rho2_over_g() * s;
  }

  /// H = (ρ²/2g) Σ_A (Tr B_A) N_A.
  VecD mean_curvature() const {
    VecD H(fp_->m);
    for (int A = 0; A < fp_->p; ++A)
      H += (0.5 * rho2_over_g() * trace(B_[A].mixed)) * fp_->normal_val[A];
    return H;
  }

  /// Flat-ambient form H = (ρ²/2g) Σ_A Σ_ijk {x^i,x^j}{x^j,n_A^i} n_A^k ∂_k.
  VecD mean_curvature_flat() const {
    const FramePoint& fp = *fp_;
    if (!fp.flat_ambient) throw Error("flat-space mean curvature formula needs a euclidean ambient");
    VecD H(fp.m);
    for (int A = 0; A < fp.p; ++A) {
      double s = 0.0;
      for (int i = 0; i < fp.m; ++i)
        for (int j = 0; j < fp.m; ++j)
          s += P_.contra(i, j) * bracket(fp.x_jet[j], fp.normals[A][i], fp.rho);
      H += (0.5 * rho2_over_g() * s) * fp.normal_val[A];
    }
    return H;
  }

  /// (D_X)_{AB} = (ρ²/g) ḡ(B_A(N_B), X) for tangent X.
  double normal_connection(int A, int B, const VecD& X) const {
    return rho2_over_g() * fp_->inner(B_.at(A)(fp_->normal_val.at(B)), X);
  }

  /// ∇̄_X N_A from B_A alone:
  ///   (g/ρ²) ∇̄_X N_A = −B_A(X) − Σ_B ḡ(B_A(N_B), X) N_B.
  /// The normal part enters with a minus sign: ḡ(B_A(N_B),X)·ρ²/g equals
  /// ḡ(N_A, ∇̄_X N_B) = −ḡ(N_B, ∇̄_X N_A), the negated N_B-component of ∇̄_X N_A.
  VecD weingarten_reconstruct(int A, const TangentComponents& Xc) const {
    const FramePoint& fp = *fp_;
    const VecD X = fp.tangent(Xc);
    VecD rhs = -B_.at(A)(X);
    for (int B = 0; B < fp.p; ++B)
      rhs -= fp.inner(B_[A](fp.normal_val[B]), X) * fp.normal_val[B];
    return rho2_over_g() * rhs;
  }

  /// ∇_X Y for Y = e_b: ∇̄_X e_b − (ρ²/g) Σ_A ḡ(B_A(X), e_b) N_A.
  VecD gauss_formula_rewrite(const TangentComponents& Xc, int b) const {
    const FramePoint& fp = *fp_;
    const VecD X = fp.tangent(Xc);
    VecD out = ambient_derivative_of_tangent(Xc, b);
    for (int A = 0; A < fp.p; ++A)
      out -= (rho2_over_g() * fp.inner(B_[A](X), fp.e_val[b])) * fp.normal_val[A];
    return out;
  }

  /// ∇̄_X e_b = X^a (∂_a e_b + Γ̄(e_a, e_b)).
  VecD ambient_derivative_of_tangent(const TangentComponents& Xc, int b) const {
    const FramePoint& fp = *fp_;
    VecD out(fp.m);
    for (int a = 0; a < 2; ++a)
      out += Xc[a] * (partials(fp.e[b], a) + fp.gamma.contract(fp.e_val[a], fp.e_val[b]));
    return out;
  }

  /// J_M(X) = (ρ/√g) P(X).
  VecD complex_structure(const VecD& X) const {
    return (fp_->rho.val / fp_->sqrt_g()) * P_(X);
  }

  /// −J_M²(X): orthogonal projection of X onto TΣ.
  VecD projection(const VecD& X) const { return -complex_structure(complex_structure(X)); }

  /// p orthonormal normals from Ỹ_k = ∂_k + J_M²(∂_k), orthonormalized under ḡ
  /// taking the largest remaining residual first.
  std::vector<VecD> projected_normal_frame() const {
    const FramePoint& fp = *fp_;
    std::vector<VecD> cands;
    for (int k = 0; k < fp.m; ++k) {
      const VecD dk = VecD::unit(fp.m, k);
      cands.push_back(dk - projection(dk));
    }
    auto [frame, chosen] = extend_orthonormal<double>({}, cands, fp.gbar, fp.p, kNormalDropTol);
    if (frame.size() != static_cast<std::size_t>(fp.p))
      throw DegenerateError("projected normal frame has fewer than p vectors");
    return frame;
  }

  // The ρ = √g specializations, where every ρ²/g prefactor is exactly 1.

  double gaussian_curvature_sqrt_g() const {
    require_sqrt_g();
    double s = 0.0;
    for (const auto& S : S_) s += trace(S.mixed * S.mixed);
    return fp_->ambient_term / fp_->g - 0.5 * s;
  }

  VecD mean_curvature_sqrt_g() const {
    require_sqrt_g();
    VecD H(fp_->m);
    for (int A = 0; A < fp_->p; ++A) H += (0.5 * trace(B_[A].mixed)) * fp_->normal_val[A];
    return H;
  }

  VecD weingarten_reconstruct_sqrt_g(int A, const TangentComponents& Xc) const {
    require_sqrt_g();
    const FramePoint& fp = *fp_;
    const VecD X = fp.tangent(Xc);
    VecD rhs = -B_.at(A)(X);
    for (int B = 0; B < fp.p; ++B) rhs -= fp.inner(B_[A](fp.normal_val[B]), X) * fp.normal_val[B];
    return rhs;
  }

  VecD gauss_formula_rewrite_sqrt_g(const TangentComponents& Xc, int b) const {
    require_sqrt_g();
    const FramePoint& fp = *fp_;
    const VecD X = fp.tangent(Xc);
    VecD out = ambient_derivative_of_tangent(Xc, b);
    for (int A = 0; A < fp.p; ++A) out -= fp.inner(B_[A](X), fp.e_val[b]) * fp.normal_val[A];
    return out;
  }

private:
  void require_sqrt_g() const {
    if (fp_->density_mode != DensityMode::sqrt_g)
      throw Error("simplified formulas require the density rho = sqrt(g)");
  }

  const FramePoint* fp_;
  TangentMap P_;
  std::vector<TangentMap> S_, A_, B_;
};

}  // namespace psurf
