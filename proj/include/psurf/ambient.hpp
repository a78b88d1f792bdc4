#pragma once

// The ambient Riemannian manifold M: a symmetric table of metric expressions
// in x1..xm, differentiated symbolically once at construction so that
// Christoffel symbols and curvature can be evaluated at any ambient point.
//
// Curvature convention:
//   R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z,
//   R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{km}Γ^m_{lj} − Γ^i_{lm}Γ^m_{kj},
// so that R(∂_k,∂_l)∂_j = R^i_{jkl} ∂_i and hyperbolic space has sectional
// curvature −1.

#include <cmath>
#include <string>
#include <vector>

#include "psurf/error.hpp"
#include "psurf/expr.hpp"
#include "psurf/jet.hpp"
#include "psurf/tensor.hpp"

namespace psurf {

/// Γ^i_{jk}, stored densely with i slowest.
struct Christoffel {
  int m = 0;
  std::vector<double> data;

  Christoffel() = default;
  explicit Christoffel(int dim) : m(dim), data(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}
  double& operator()(int i, int j, int k) { return data[(i * m + j) * m + k]; }
  double operator()(int i, int j, int k) const { return data[(i * m + j) * m + k]; }

  /// Γ^i_{jk} a^j b^k.
  VecD contract(const VecD& a, const VecD& b) const {
    VecD out(m);
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) s += (*this)(i, j, k) * a[j] * b[k];
      out[i] = s;
    }
    return out;
  }
};

/// Fully lowered R_{ijkl} = ḡ_{in} R^n_{jkl}.
struct RiemannTensor {
  int m = 0;
  std::vector<double> data;

  explicit RiemannTensor(int dim)
      : m(dim), data(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}
  double& operator()(int i, int j, int k, int l) { return data[((i * m + j) * m + k) * m + l]; }
  double operator()(int i, int j, int k, int l) const {
    return data[((i * m + j) * m + k) * m + l];
  }
};

struct MetricAt {
  MatD g;
  MatD g_inv;
};

class AmbientManifold {
public:
  /// Flat R^m with the identity metric.
  static AmbientManifold euclidean(int m) {
    check_dim(m);
    std::vector<Expr> entries(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) entries[i * m + j] = Expr::constant(i == j ? 1.0 : 0.0);
    AmbientManifold M(m, std::move(entries));
    M.euclidean_ = true;
    return M;
  }

  /// General metric from an m×m table of expressions in x1..xm. The table
  /// must be symmetric as printed expressions.
  static AmbientManifold from_metric(int m, const std::vector<std::vector<Expr>>& table) {
    check_dim(m);
    if (table.size() != static_cast<std::size_t>(m))
      throw InputError("metric table must have " + std::to_string(m) + " rows");
    std::vector<Expr> entries;
    for (int i = 0; i < m; ++i) {
      if (table[i].size() != static_cast<std::size_t>(m))
        throw InputError("metric table must be " + std::to_string(m) + "x" + std::to_string(m));
      for (int j = 0; j < m; ++j) {
        if (to_string(table[i][j]) != to_string(table[j][i]))
          throw InputError("metric table is not symmetric at (" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + ")");
        for (const auto& v : variables(table[i][j])) {
          const int slot = variable_slot(v);
          if (slot < 2 || slot > m + 1)
            throw InputError("metric entry uses '" + v + "'; only x1..x" + std::to_string(m) +
                             " are allowed");
        }
        entries.push_back(table[i][j]);
      }
    }
    return AmbientManifold(m, std::move(entries));
  }

  int dim() const { return m_; }
  bool is_euclidean() const { return euclidean_; }
  const Expr& metric_entry(int i, int j) const { return metric_[i * m_ + j]; }

  MetricAt metric_at(const VecD& x) const {
    if (x.size() != static_cast<std::size_t>(m_)) throw InputError("ambient point has wrong dimension");
    if (euclidean_) return {MatD::identity(m_), MatD::identity(m_)};
    const Env<double> env = bind(x);
    MatD g(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) g(i, j) = eval(metric_[i * m_ + j], env);
    check_positive_definite(g);
    MatD g_inv = inverse(g);
    // Symmetrize the inverse so downstream contractions see an exactly
    // symmetric table.
    for (int i = 0; i < m_; ++i)
      for (int j = i + 1; j < m_; ++j) g_inv(i, j) = g_inv(j, i) = 0.5 * (g_inv(i, j) + g_inv(j, i));
    return {std::move(g), std::move(g_inv)};
  }

  Christoffel christoffel(const VecD& x) const {
    Christoffel gam(m_);
    if (euclidean_) return gam;
    const MetricAt mt = metric_at(x);
    const Env<double> env = bind(x);
    const std::vector<double> dg = first_derivatives(env);
    const std::vector<double> lowered = lowered_christoffel(dg);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        for (int k = 0; k < m_; ++k) {
          double s = 0.0;
          for (int l = 0; l < m_; ++l) s += mt.g_inv(i, l) * lowered[idx3(l, j, k)];
          gam(i, j, k) = s;
        }
    return gam;
  }

  RiemannTensor riemann(const VecD& x) const {
    RiemannTensor R(m_);
    if (euclidean_) return R;
    const int m = m_;
    const MetricAt mt = metric_at(x);
    const Env<double> env = bind(x);
    const std::vector<double> dg = first_derivatives(env);
    const std::vector<double> ddg = second_derivatives(env);
    const std::vector<double> low = lowered_christoffel(dg);
    const Christoffel gam = christoffel(x);

    // ∂_n Γ_{ljk} (lowered), then ∂_n Γ^i_{jk} = ∂_n ḡ^{il} Γ_{ljk} + ḡ^{il} ∂_n Γ_{ljk}
    // with ∂_n ḡ^{-1} = −ḡ^{-1} (∂_n ḡ) ḡ^{-1}.
    std::vector<double> dlow(static_cast<std::size_t>(m) * m * m * m);
    for (int n = 0; n < m; ++n)
      for (int l = 0; l < m; ++l)
        for (int j = 0; j < m; ++j)
          for (int k = 0; k < m; ++k)
            dlow[((n * m + l) * m + j) * m + k] =
                0.5 * (ddg[idx4(l, k, j, n)] + ddg[idx4(l, j, k, n)] - ddg[idx4(j, k, l, n)]);
    std::vector<double> dginv(static_cast<std::size_t>(m) * m * m);
    for (int n = 0; n < m; ++n)
      for (int i = 0; i < m; ++i)
        for (int l = 0; l < m; ++l) {
          double s = 0.0;
          for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) s += mt.g_inv(i, a) * dg[idx3(a, b, n)] * mt.g_inv(b, l);
          dginv[(n * m + i) * m + l] = -s;
        }
    auto dgam = [&](int n, int i, int j, int k) {
      double s = 0.0;
      for (int l = 0; l < m; ++l)
        s += dginv[(n * m + i) * m + l] * low[idx3(l, j, k)] +
             mt.g_inv(i, l) * dlow[((n * m + l) * m + j) * m + k];
      return s;
    };

    std::vector<double> up(static_cast<std::size_t>(m) * m * m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            double s = dgam(k, i, l, j) - dgam(l, i, k, j);
            for (int q = 0; q < m; ++q) s += gam(i, k, q) * gam(q, l, j) - gam(i, l, q) * gam(q, k, j);
            up[((i * m + j) * m + k) * m + l] = s;
          }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            double s = 0.0;
            for (int n = 0; n < m; ++n) s += mt.g(i, n) * up[((n * m + j) * m + k) * m + l];
            R(i, j, k, l) = s;
          }
    return R;
  }

  /// ḡ(R̄(e1,e2)e2, e1) at x.
  double riemann_term(const VecD& x, const VecD& e1, const VecD& e2) const {
    if (euclidean_) return 0.0;
    const RiemannTensor R = riemann(x);
    // ḡ(R(X,Y)Z, W) = R_{ijkl} W^i Z^j X^k Y^l with X=e1, Y=e2, Z=e2, W=e1.
    double s = 0.0;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        for (int k = 0; k < m_; ++k)
          for (int l = 0; l < m_; ++l) s += R(i, j, k, l) * e1[i] * e2[j] * e1[k] * e2[l];
    return s;
  }

  /// ḡ_ij(x(u)) as first-order jets in u, given first-order jets of the
  /// embedding coordinates (chain rule through the symbolic x-derivatives).
  Mat<Jet1> metric_along(const std::vector<Jet1>& x) const {
    Mat<Jet1> g(m_, m_);
    if (euclidean_) {
      for (int i = 0; i < m_; ++i) g(i, i) = Jet1(1.0);
      return g;
    }
    VecD xv(m_);
    for (int i = 0; i < m_; ++i) xv[i] = x[i].val;
    const Env<double> env = bind(xv);
    const std::vector<double> dg = first_derivatives(env);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) {
        Jet1 v(eval(metric_[i * m_ + j], env));
        for (int k = 0; k < m_; ++k) {
          v.d1 += dg[idx3(i, j, k)] * x[k].d1;
          v.d2 += dg[idx3(i, j, k)] * x[k].d2;
        }
        g(i, j) = v;
      }
    return g;
  }

private:
  AmbientManifold(int m, std::vector<Expr> entries) : m_(m), metric_(std::move(entries)) {
    dmetric_.resize(static_cast<std::size_t>(m) * m * m);
    ddmetric_.resize(static_cast<std::size_t>(m) * m * m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          Expr d = differentiate(metric_[i * m + j], coordinate_name(k + 1));
          for (int l = 0; l < m; ++l)
            ddmetric_[idx4(i, j, k, l)] = differentiate(d, coordinate_name(l + 1));
          dmetric_[idx3(i, j, k)] = std::move(d);
        }
  }

  static void check_dim(int m) {
    if (m < 3 || m > 8) throw InputError("ambient dimension must be in 3..8");
  }

  static void check_positive_definite(const MatD& g) {
    // Cholesky pivots.
    const std::size_t n = g.rows();
    MatD L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      double d = g(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
      if (!(d > 0.0)) throw LinAlgError("ambient metric is not positive definite");
      L(j, j) = std::sqrt(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = g(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
        L(i, j) = s / L(j, j);
      }
    }
  }

  Env<double> bind(const VecD& x) const {
    Env<double> env;
    env.bind_x(x);
    return env;
  }

  std::size_t idx3(int i, int j, int k) const { return (static_cast<std::size_t>(i) * m_ + j) * m_ + k; }
  std::size_t idx4(int i, int j, int k, int l) const { return idx3(i, j, k) * m_ + l; }

  // dg[idx3(i,j,k)] = ∂_k ḡ_ij
  std::vector<double> first_derivatives(const Env<double>& env) const {
    std::vector<double> out(dmetric_.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = eval(dmetric_[n], env);
    return out;
  }
  // ddg[idx4(i,j,k,l)] = ∂_l ∂_k ḡ_ij
  std::vector<double> second_derivatives(const Env<double>& env) const {
    std::vector<double> out(ddmetric_.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = eval(ddmetric_[n], env);
    return out;
  }
  // Γ_{ljk} = ½(∂_j ḡ_lk + ∂_k ḡ_lj − ∂_l ḡ_jk)
  std::vector<double> lowered_christoffel(const std::vector<double>& dg) const {
    std::vector<double> out(static_cast<std::size_t>(m_) * m_ * m_);
    for (int l = 0; l < m_; ++l)
      for (int j = 0; j < m_; ++j)
        for (int k = 0; k < m_; ++k)
          out[idx3(l, j, k)] = 0.5 * (dg[idx3(l, k, j)] + dg[idx3(l, j, k)] - dg[idx3(j, k, l)]);
    return out;
  }

  int m_ = 0;
  bool euclidean_ = false;
  std::vector<Expr> metric_;
  std::vector<Expr> dmetric_;
  std::vector<Expr> ddmetric_;
};

}  // namespace psurf
