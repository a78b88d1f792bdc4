#pragma once

// Small dense linear algebra over a generic scalar (double, Jet1, Jet2).
// Sizes are tiny (at most 64), so everything is stored densely and row-major.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "psurf/error.hpp"
#include "psurf/jet.hpp"

namespace psurf {

inline constexpr std::size_t kMaxDim = 64;

template <class S>
concept Scalar = std::is_arithmetic_v<S> || JetType<S>;

template <class T>
class Vec {
public:
  Vec() = default;
  explicit Vec(std::size_t n, T fill = T(0.0)) : data_(n, fill) { check_dim(n); }
  Vec(std::initializer_list<T> xs) : data_(xs) { check_dim(data_.size()); }
  explicit Vec(std::vector<T> xs) : data_(std::move(xs)) { check_dim(data_.size()); }

  static Vec unit(std::size_t n, std::size_t k) {
    Vec v(n);
    v[k] = T(1.0);
    return v;
  }

  std::size_t size() const { return data_.size(); }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }
  const std::vector<T>& data() const { return data_; }

  Vec& operator+=(const Vec& o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) data_[i] += o[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) data_[i] -= o[i];
    return *this;
  }
  template <class S>
  Vec& operator*=(const S& s) {
    for (auto& x : data_) x = x * s;
    return *this;
  }

private:
  static void check_dim(std::size_t n) {
    if (n > kMaxDim) throw LinAlgError("vector dimension exceeds " + std::to_string(kMaxDim));
  }
  void check_same(const Vec& o) const {
    if (o.size() != size()) throw LinAlgError("vector dimension mismatch");
  }
  std::vector<T> data_;
};

template <class T>
Vec<T> operator+(Vec<T> a, const Vec<T>& b) { return a += b; }
template <class T>
Vec<T> operator-(Vec<T> a, const Vec<T>& b) { return a -= b; }
template <class T>
Vec<T> operator-(Vec<T> a) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = -a[i];
  return a;
}
template <class T, Scalar S>
Vec<T> operator*(const S& s, Vec<T> a) { return a *= s; }

template <class T>
class Mat {
public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, T fill = T(0.0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0 || rows > kMaxDim || cols > kMaxDim)
      throw LinAlgError("matrix dimensions must be in 1.." + std::to_string(kMaxDim));
  }
  Mat(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw LinAlgError("ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vec<T> row(std::size_t i) const {
    return Vec<T>(std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_));
  }
  Vec<T> col(std::size_t j) const {
    Vec<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Mat& operator+=(const Mat& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  template <class S>
  Mat& operator*=(const S& s) {
    for (auto& x : data_) x = x * s;
    return *this;
  }

private:
  void check_same(const Mat& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw LinAlgError("matrix dimension mismatch");
  }
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using VecD = Vec<double>;
using MatD = Mat<double>;

template <class T>
Mat<T> operator+(Mat<T> a, const Mat<T>& b) { return a += b; }
template <class T>
Mat<T> operator-(Mat<T> a, const Mat<T>& b) { return a -= b; }
template <class T, Scalar S>
Mat<T> operator*(const S& s, Mat<T> a) { return a *= s; }

template <class T>
Mat<T> operator*(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.rows()) throw LinAlgError("matrix product dimension mismatch");
  Mat<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class T>
Vec<T> operator*(const Mat<T>& a, const Vec<T>& x) {
  if (a.cols() != x.size()) throw LinAlgError("matrix-vector dimension mismatch");
  Vec<T> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

template <class T>
Mat<T> transpose(const Mat<T>& a) {
  Mat<T> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

template <class T>
T trace(const Mat<T>& a) {
  T s(0.0);
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
  return s;
}

/// Bilinear form x^T g y.
template <class T>
T inner(const Vec<T>& x, const Mat<T>& g, const Vec<T>& y) {
  T s(0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) s += x[i] * g(i, j) * y[j];
  return s;
}

inline double dot(const VecD& a, const VecD& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double max_abs(const VecD& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

inline double max_abs(const MatD& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
  return m;
}

inline double frobenius(const MatD& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline VecD values(const Vec<Jet1>& v) {
  VecD out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].val;
  return out;
}

inline MatD values(const Mat<Jet1>& a) {
  MatD out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j).val;
  return out;
}

/// Componentwise first partial ∂_a of a jet-valued vector.
inline VecD partials(const Vec<Jet1>& v, int a) {
  VecD out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].d(a);
  return out;
}

// ---------------------------------------------------------------------------
// Determinant and inverse

template <class T>
T det(const Mat<T>& a) {
  if (a.rows() != a.cols()) throw LinAlgError("determinant of non-square matrix");
  if (a.rows() == 1) return a(0, 0);
  if (a.rows() == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (a.rows() == 3)
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  // LU with partial pivoting for larger sizes.
  Mat<T> lu = a;
  const std::size_t n = a.rows();
  T d(1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(value(lu(i, k))) > std::fabs(value(lu(piv, k)))) piv = i;
    if (value(lu(piv, k)) == 0.0) return T(0.0);
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      d = -d;
    }
    d = d * lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const T f = lu(i, k) / lu(k, k);
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
    }
  }
  return d;
}

/// Gauss-Jordan inverse with partial pivoting (pivots chosen on values).
/// Throws when |det| < 1e-13 times the product of the row max-norms.
template <class T>
Mat<T> inverse(const Mat<T>& a) {
  if (a.rows() != a.cols()) throw LinAlgError("inverse of non-square matrix");
  const std::size_t n = a.rows();
  if (n > 8) throw LinAlgError("inverse supports dimensions up to 8");
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r = std::max(r, std::fabs(value(a(i, j))));
    scale *= r;
  }
  Mat<T> w = a;
  Mat<T> inv = Mat<T>::identity(n);
  double detv = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(value(w(i, k))) > std::fabs(value(w(piv, k)))) piv = i;
    detv *= value(w(piv, k));
    if (value(w(piv, k)) == 0.0) throw LinAlgError("matrix is singular");
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(w(k, j), w(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    const T p = w(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      w(k, j) = w(k, j) / p;
      inv(k, j) = inv(k, j) / p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const T f = w(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        w(i, j) -= f * w(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  if (std::fabs(detv) < 1e-13 * scale) throw LinAlgError("matrix is singular to working precision");
  return inv;
}

// ---------------------------------------------------------------------------
// Levi-Civita symbol

/// Sign of the permutation given by 1-based `indices` of length m (values
/// in 1..m); 0 if any index repeats.
inline int levi_civita(const std::vector<int>& indices) {
  const int m = static_cast<int>(indices.size());
  for (int x : indices)
    if (x < 1 || x > m) throw LinAlgError("Levi-Civita index out of range 1.." + std::to_string(m));
  std::vector<int> p(indices);
  int sign = 1;
  for (int i = 0; i < m; ++i) {
    while (p[i] != i + 1) {
      const int j = p[i] - 1;
      if (p[j] == p[i]) return 0;
      std::swap(p[i], p[j]);
      sign = -sign;
    }
  }
  return sign;
}

/// Dense table of the rank-m Levi-Civita symbol over 0-based indices,
/// addressed as `at(i1, ..., im)` through a flat offset.
class LeviCivitaTable {
public:
  explicit LeviCivitaTable(int m) : m_(m), table_(ipow(m, m), 0) {
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 1);
    do {
      std::size_t off = 0;
      for (int x : perm) off = off * m + (x - 1);
      table_[off] = static_cast<signed char>(levi_civita(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  int dim() const { return m_; }
  int operator[](std::size_t offset) const { return table_[offset]; }
  int at(const std::vector<int>& zero_based) const {
    std::size_t off = 0;
    for (int x : zero_based) off = off * m_ + x;
    return table_[off];
  }

  static std::size_t ipow(int base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(base);
    return r;
  }

private:
  int m_;
  std::vector<signed char> table_;
};

// ---------------------------------------------------------------------------
// Symmetric eigenproblem (cyclic Jacobi)

struct EigenResult {
  VecD values;        // descending
  MatD vectors;       // column k is the eigenvector of values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for real symmetric matrices. Eigenvalues come
/// back sorted descending; each eigenvector has its largest-magnitude
/// component positive (first such index on ties).
inline EigenResult sym_eigen(const MatD& a, double tol = 1e-12, int max_sweeps = 100) {
  if (a.rows() != a.cols()) throw LinAlgError("sym_eigen requires a square matrix");
  const std::size_t n = a.rows();
  const double norm = frobenius(a);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > 1e-12 * std::max(norm, 1e-300))
        throw LinAlgError("sym_eigen input is not symmetric");

  MatD w = a;
  MatD v = MatD::identity(n);
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += w(i, j) * w(i, j);
    return std::sqrt(s);
  };

  // The off-diagonal target sits well below `tol` so that residuals
  // ‖a v - μ v‖ land at roundoff level.
  const double target = std::min(tol, 1e-14) * norm;
  int sweep = 0;
  for (; sweep < max_sweeps && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (apq == 0.0) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double wkp = w(k, p), wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double wpk = w(p, k), wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  if (off_norm() > target && off_norm() > tol * norm)
    throw LinAlgError("sym_eigen did not converge in " + std::to_string(max_sweeps) +
                      " sweeps (off-diagonal residual " + std::to_string(off_norm()) + ")");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return w(i, i) > w(j, j); });

  EigenResult r{VecD(n), MatD(n, n), sweep};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    r.values[k] = w(src, src);
    std::size_t big = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::fabs(v(i, src)) > std::fabs(v(big, src)) + 1e-15) big = i;
    const double sign = v(big, src) < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) r.vectors(i, k) = sign * v(i, src);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Gram-Schmidt under a metric

namespace detail {

template <class T>
Vec<T> residual(Vec<T> v, const std::vector<Vec<T>>& basis, const Mat<T>& g) {
  // Two projection passes keep the output orthonormal to roundoff even for
  // nearly dependent inputs.
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) {
      const T c = inner(q, g, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
  return v;
}

template <class T>
Vec<T> normalize(Vec<T> v, const Mat<T>& g, double drop_tol, bool& dropped) {
  using std::sqrt;
  const T n2 = inner(v, g, v);
  const double n2v = value(n2);
  if (std::sqrt(std::fabs(n2v)) < drop_tol) {
    dropped = true;
    return v;
  }
  if (n2v <= 0.0) throw LinAlgError("Gram-Schmidt met a non-positive norm (indefinite metric)");
  dropped = false;
  const T inv = T(1.0) / sqrt(n2);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = v[i] * inv;
  return v;
}

}  // namespace detail

/// Orthonormalizes `vectors` in input order under the bilinear form `g`.
/// Vectors whose residual g-norm falls below `drop_tol` are skipped.
template <class T>
std::vector<Vec<T>> gram_schmidt(const std::vector<Vec<T>>& vectors, const Mat<T>& g,
                                 double drop_tol = 1e-8) {
  std::vector<Vec<T>> out;
  for (const auto& v : vectors) {
    bool dropped = false;
    Vec<T> q = detail::normalize(detail::residual(v, out, g), g, drop_tol, dropped);
    if (!dropped) out.push_back(std::move(q));
  }
  return out;
}

/// Extends the g-orthonormal set `basis` by up to `count` candidates, picking
/// at each step the candidate with the largest residual g-norm (lowest index
/// on ties). Returns the new vectors and the candidate index each came from.
template <class T>
std::pair<std::vector<Vec<T>>, std::vector<int>> extend_orthonormal(
    const std::vector<Vec<T>>& basis, const std::vector<Vec<T>>& candidates, const Mat<T>& g,
    std::size_t count, double drop_tol = 1e-8) {
  std::vector<Vec<T>> all = basis;
  std::vector<Vec<T>> added;
  std::vector<int> chosen;
  std::vector<bool> used(candidates.size(), false);
  while (added.size() < count) {
    int best = -1;
    double best_norm = 0.0;
    Vec<T> best_res;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (used[k]) continue;
      Vec<T> r = detail::residual(candidates[k], all, g);
      const double n = std::sqrt(std::fabs(value(inner(r, g, r))));
      if (best < 0 || n > best_norm * (1.0 + 1e-12)) {
        best = static_cast<int>(k);
        best_norm = n;
        best_res = std::move(r);
      }
    }
    if (best < 0) break;
    used[best] = true;
    bool dropped = false;
    Vec<T> q = detail::normalize(best_res, g, drop_tol, dropped);
    if (dropped) break;
    all.push_back(q);
    added.push_back(std::move(q));
    chosen.push_back(best);
  }
  return {std::move(added), std::move(chosen)};
}

/// Orthonormalizes candidates in the fixed `order` (indices into
/// `candidates`) on top of `basis`; used to replay a recorded pivot order.
template <class T>
std::vector<Vec<T>> extend_in_order(const std::vector<Vec<T>>& basis,
                                    const std::vector<Vec<T>>& candidates,
                                    const std::vector<int>& order, const Mat<T>& g,
                                    double drop_tol = 1e-8) {
  std::vector<Vec<T>> all = basis;
  std::vector<Vec<T>> added;
  for (int k : order) {
    bool dropped = false;
    Vec<T> q = detail::normalize(detail::residual(candidates.at(k), all, g), g, drop_tol, dropped);
    if (dropped) throw LinAlgError("replayed Gram-Schmidt order hit a dependent vector");
    all.push_back(q);
    added.push_back(std::move(q));
  }
  return added;
}

}  // namespace psurf
