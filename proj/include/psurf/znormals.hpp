#pragma once

// Normal frames built from brackets of the embedding coordinates alone.
//
//   Z_I = ρ / (2√(g (p−1)!)) ḡ^{ij} ε_{jklI} {x^k, x^l} ∂_i
//
// for multi-indices I of length p−1, summed over the full tuple space m^(p−1)
// in lexicographic order. ε is the Levi-Civita tensor of ḡ (√det ḡ times the
// permutation symbol). The Gram matrix 𝒵_IJ = ḡ(Z_I, Z_J) is an orthogonal
// projector of rank p; its unit-eigenvalue eigenvectors E turn the Z_I into
// an orthonormal normal frame N̂ = E·Z.
//
// Permuting I permutes Z_I up to sign and repeated entries give Z_I = 0.
// When m^(p−1) exceeds the dense-matrix limit (m ≥ 6) the tuple space is
// reduced to the increasing index sets: with S the ±1 incidence of tuples on
// sets, the full Gram matrix is S M Sᵀ and SᵀS = (p−1)!, so 𝒵̂ = (p−1)! M is
// again a rank-p projector with the same non-zero spectrum.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "psurf/classical.hpp"
#include "psurf/error.hpp"
#include "psurf/expr.hpp"
#include "psurf/poisson.hpp"
#include "psurf/tensor.hpp"

namespace psurf {

/// A multi-index of 0-based ambient indices.
using MultiIndex = std::vector<int>;

/// All tuples of `length` entries over 0..m−1, lexicographic.
inline std::vector<MultiIndex> enumerate_multi_indices(int m, int length) {
  std::vector<MultiIndex> out;
  MultiIndex cur(length, 0);
  for (;;) {
    out.push_back(cur);
    int k = length - 1;
    while (k >= 0 && cur[k] == m - 1) cur[k--] = 0;
    if (k < 0) break;
    ++cur[k];
  }
  return out;
}

/// Number of index sets {i_1 < ... < i_(p−1)} over m values; each one fixes up
/// to ordering the triple {j,k,l} of a non-vanishing ε_{jklI}.
/// The increasing index sets i_1 < ... < i_length over 0..m−1, lexicographic.
inline std::vector<MultiIndex> increasing_multi_indices(int m, int length) {
  std::vector<MultiIndex> out;
  for (auto& I : enumerate_multi_indices(m, length)) {
    bool increasing = true;
    for (std::size_t k = 1; k < I.size(); ++k) increasing = increasing && I[k - 1] < I[k];
    if (increasing) out.push_back(std::move(I));
  }
  return out;
}

/// Number of index sets {i_1 < ... < i_(p−1)} over m values; each one fixes up
/// to ordering the triple {j,k,l} of a non-vanishing ε_{jklI}.
inline std::size_t count_distinct_z_vectors(int m, int p) {
  return increasing_multi_indices(m, p - 1).size();
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

namespace detail {

/// ε_{jklI} for fixed I as a list of (j,k,l,sign) with sign ≠ 0.
struct EpsTriple {
  int j, k, l, sign;
};

/// Only the permutations of the complement of I survive, so this is at most
/// six entries; empty when I repeats an index.
inline std::vector<EpsTriple> eps_triples(int m, const MultiIndex& I) {
  std::vector<EpsTriple> out;
  std::vector<bool> used(m, false);
  for (int i : I) {
    if (used[i]) return out;
    used[i] = true;
  }
  std::vector<int> rest;
  for (int k = 0; k < m; ++k)
    if (!used[k]) rest.push_back(k);
  if (rest.size() != 3) return out;
  std::vector<int> idx(3 + I.size());
  for (std::size_t t = 0; t < I.size(); ++t) idx[3 + t] = I[t] + 1;
  std::sort(rest.begin(), rest.end());
  do {
    for (int t = 0; t < 3; ++t) idx[t] = rest[t] + 1;
    out.push_back({rest[0], rest[1], rest[2], levi_civita(idx)});
  } while (std::next_permutation(rest.begin(), rest.end()));
  return out;
}

}  // namespace detail

inline VecD z_vector(const PoissonGeometry& pg, const MultiIndex& I) {
  const FramePoint& fp = pg.frame();
  if (static_cast<int>(I.size()) != fp.p - 1)
    throw Error("multi-index must have length p-1 = " + std::to_string(fp.p - 1));
  const double vol = std::sqrt(det(fp.gbar));
  const double c = fp.rho.val / (2.0 * std::sqrt(fp.g * factorial(fp.p - 1)));
  VecD low(fp.m);
  for (const auto& t : detail::eps_triples(fp.m, I)) low[t.j] += t.sign * pg.p_map().contra(t.k, t.l);
  return (c * vol) * (fp.gbar_inv * low);
}

struct ZFrame {
  bool reduced = false;              // indices are increasing sets, not all tuples
  std::vector<MultiIndex> indices;
  std::vector<VecD> z_vectors;
  MatD zmatrix;                      // ḡ(Z_I, Z_J), times (p−1)! when reduced
  VecD eigenvalues;                  // descending
  MatD eigenvectors;                 // column k ↔ eigenvalues[k]; rows ↔ indices
  std::vector<VecD> nhat;            // the p vectors with eigenvalue above ½
  double identity_residual = 0.0;    // max |Σ_K Z_K^i Z_K^j − ḡ^{ij} − (ρ²/g)(P²)^{ij}|, K over all tuples
};

/// Builds the Z-vectors, 𝒵 and its eigen frame. With a curved ambient only
/// codimension one is supported (multi-index raising is then trivial).
inline ZFrame z_frame(const PoissonGeometry& pg) {
  const FramePoint& fp = pg.frame();
  if (!fp.flat_ambient && fp.p > 1)
    throw Error("z_frame in a curved ambient is implemented for codimension 1 only");
  ZFrame zf;
  zf.reduced = LeviCivitaTable::ipow(fp.m, fp.p - 1) > kMaxDim;
  const double mult = zf.reduced ? factorial(fp.p - 1) : 1.0;
  zf.indices = zf.reduced ? increasing_multi_indices(fp.m, fp.p - 1)
                          : enumerate_multi_indices(fp.m, fp.p - 1);
  for (const auto& I : zf.indices) zf.z_vectors.push_back(z_vector(pg, I));
  const std::size_t n = zf.indices.size();
  zf.zmatrix = MatD(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b)
      zf.zmatrix(a, b) = zf.zmatrix(b, a) = mult * fp.inner(zf.z_vectors[a], zf.z_vectors[b]);

  const EigenResult eig = sym_eigen(zf.zmatrix, 1e-12);
  zf.eigenvalues = eig.values;
  zf.eigenvectors = eig.vectors;
  const double scale = std::sqrt(mult);
  for (std::size_t k = 0; k < n; ++k) {
    if (eig.values[k] <= 0.5) continue;
    VecD v(fp.m);
    for (std::size_t J = 0; J < n; ++J) v += (scale * eig.vectors(J, k)) * zf.z_vectors[J];
    zf.nhat.push_back(std::move(v));
  }
  if (zf.nhat.size() != static_cast<std::size_t>(fp.p))
    throw DegenerateError("Z-matrix has " + std::to_string(zf.nhat.size()) +
                          " eigenvalues above 1/2, expected p = " + std::to_string(fp.p));

  const MatD& Pc = pg.p_map().contra;
  const MatD P2 = Pc * fp.gbar * Pc;
  const double r2g = pg.rho2_over_g();
  for (int i = 0; i < fp.m; ++i)
    for (int j = 0; j < fp.m; ++j) {
      double s = 0.0;
      for (const auto& z : zf.z_vectors) s += z[i] * z[j];
      zf.identity_residual =
          std::max(zf.identity_residual, std::fabs(mult * s - fp.gbar_inv(i, j) - r2g * P2(i, j)));
    }
  return zf;
}

/// S^{ij}(X) = (1/ρ) ε^{ab} (∂_a x^i)(∇̄_b X)^j for a jet-valued ambient field X,
/// as a mixed table.
inline MatD s_of_field(const FramePoint& fp, const Vec<Jet1>& X) {
  const VecD xv = values(X);
  std::array<VecD, 2> nab;
  for (int b = 0; b < 2; ++b) nab[b] = partials(X, b) + fp.gamma.contract(fp.e_val[b], xv);
  MatD sc(fp.m, fp.m);
  for (int i = 0; i < fp.m; ++i)
    for (int j = 0; j < fp.m; ++j)
      sc(i, j) = (fp.e_val[0][i] * nab[1][j] - fp.e_val[1][i] * nab[0][j]) / fp.rho.val;
  return sc * fp.gbar;
}

struct SmovefSides {
  double lhs = 0.0;  // Tr S(fN) S(hN′)
  double rhs = 0.0;  // f h Tr S(N) S(N′)
};

/// Both sides of Tr S(fN)S(hN′) = fh Tr S(N)S(N′) for normal fields N, N′ and
/// functions f, h of (u1, u2). The left side differentiates the products.
inline SmovefSides smovef_sides(const FramePoint& fp, const Vec<Jet1>& N, const Vec<Jet1>& N2,
                                const Expr& f, const Expr& h) {
  const Jet1 fj = truncate(eval_jet(f, fp.u[0], fp.u[1]));
  const Jet1 hj = truncate(eval_jet(h, fp.u[0], fp.u[1]));
  Vec<Jet1> fN(fp.m), hN(fp.m);
  for (int i = 0; i < fp.m; ++i) {
    fN[i] = fj * N[i];
    hN[i] = hj * N2[i];
  }
  const double lhs = trace(s_of_field(fp, fN) * s_of_field(fp, hN));
  const double rhs = fj.val * hj.val * trace(s_of_field(fp, N) * s_of_field(fp, N2));
  return {lhs, rhs};
}

/// Index placement inside the nested-bracket curvature sum. `statement` puts
/// the contracted pair on the inner bracket, {x^i,{x^k,x^l}}{x^j,{x^m,x^n}};
/// `proof_line` is the variant {x^i,{x^j,x^k}}{x^j,{x^m,x^n}}, which does not
/// reproduce the curvature and is kept only for regression comparison.
enum class NestedOrder { statement, proof_line };

namespace detail {

struct NestedData {
  int m, p;
  MatD P;                    // {x^k, x^l}
  std::vector<double> T;     // T[(i*m+k)*m+l] = {x^i, {x^k, x^l}}
  double prefactor;          // ρ⁴ / (8 g² (p−1)!)
  double t(int i, int k, int l) const { return T[(i * m + k) * m + l]; }
};

inline NestedData nested_data(const FramePoint& fp) {
  if (!fp.flat_ambient) throw Error("nested-bracket formulas need a euclidean ambient");
  const int m = fp.m;
  NestedData d{m, fp.p, MatD(m, m), std::vector<double>(static_cast<std::size_t>(m) * m * m), 0.0};
  std::vector<Jet1> inner(static_cast<std::size_t>(m) * m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      inner[k * m + l] = bracket_jet1(fp.x_jet[k], fp.x_jet[l], fp.rho);
      d.P(k, l) = inner[k * m + l].val;
    }
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) d.T[(i * m + k) * m + l] = bracket(fp.x_jet[i], inner[k * m + l], fp.rho);
  const double r2 = fp.rho.val * fp.rho.val;
  d.prefactor = r2 * r2 / (8.0 * fp.g * fp.g * factorial(fp.p - 1));
  return d;
}

}  // namespace detail

/// K = −ρ⁴/(8g²(p−1)!) Σ ε_{jklI} ε_{imnI} {x^i,{x^k,x^l}} {x^j,{x^m,x^n}}  (M = R^m).
inline double k_nested(const FramePoint& fp, NestedOrder order = NestedOrder::statement) {
  const auto d = detail::nested_data(fp);
  // The summand is symmetric under permutations of I.
  double s = 0.0;
  for (const auto& I : increasing_multi_indices(fp.m, fp.p - 1)) {
    const auto tri = detail::eps_triples(fp.m, I);
    for (const auto& a : tri)      // (j, k, l)
      for (const auto& b : tri) {  // (i, m, n)
        const double first = order == NestedOrder::statement ? d.t(b.j, a.k, a.l)
                                                             : d.t(b.j, a.j, a.k);
        s += a.sign * b.sign * first * d.t(a.j, b.k, b.l);
      }
  }
  return -d.prefactor * factorial(fp.p - 1) * s;
}

/// H = ρ⁴/(8g²(p−1)!) Σ ε_{iklI} ε_{k′mnI} {x^i,x^j}{x^j,{x^k,x^l}}{x^m,x^n} ∂_{k′}  (M = R^m).
inline VecD h_nested(const FramePoint& fp) {
  const auto d = detail::nested_data(fp);
  VecD H(fp.m);
  for (const auto& I : increasing_multi_indices(fp.m, fp.p - 1)) {
    const auto tri = detail::eps_triples(fp.m, I);
    double scalar = 0.0;  // Σ ε_{iklI} {x^i,x^j}{x^j,{x^k,x^l}}
    for (const auto& a : tri)
      for (int j = 0; j < fp.m; ++j) scalar += a.sign * d.P(a.j, j) * d.t(j, a.k, a.l);
    VecD v(fp.m);  // Σ ε_{k′mnI} {x^m,x^n}
    for (const auto& b : tri) v[b.j] += b.sign * d.P(b.k, b.l);
    H += (d.prefactor * factorial(fp.p - 1) * scalar) * v;
  }
  return H;
}

}  // namespace psurf
