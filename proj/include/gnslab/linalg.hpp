#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "gnslab/matrix.hpp"
#include "gnslab/tolerance.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// Eigen interop (float backend only)

inline Eigen::MatrixXcd to_eigen(const Mat<FloatScalar>& m) {
  Eigen::MatrixXcd e(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

inline Mat<FloatScalar> from_eigen(const Eigen::MatrixXcd& e) {
  Mat<FloatScalar> m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m(i, j) = e(i, j);
  return m;
}

// ---------------------------------------------------------------------------
// Row echelon with leftmost pivots (deterministic in both backends)

template <class K>
struct RrefResult {
  Mat<K> r;
  std::vector<int> pivots;
};

template <class K>
RrefResult<K> rref(Mat<K> m, const ToleranceConfig& tol = {}) {
  const int rows = m.rows, cols = m.cols;
  std::vector<int> pivots;
  double scale = 1.0;
  if constexpr (!is_exact_v<K>) scale = std::max(mat_scale(m), 1.0);
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pr = -1;
    if constexpr (is_exact_v<K>) {
      for (int i = r; i < rows; ++i)
        if (!is_zero(m(i, c))) {
          pr = i;
          break;
        }
    } else {
      double best = tol.rank_tol * scale;
      for (int i = r; i < rows; ++i)
        if (mag(m(i, c)) > best) {
          best = mag(m(i, c));
          pr = i;
        }
    }
    if (pr < 0) continue;
    if (pr != r)
      for (int j = 0; j < cols; ++j) std::swap(m(r, j), m(pr, j));
    K inv = scalar_from_int<K>(1) / m(r, c);
    for (int j = c; j < cols; ++j) m(r, j) = inv * m(r, j);
    for (int i = 0; i < rows; ++i) {
      if (i == r || is_zero(m(i, c))) continue;
      K f = m(i, c);
      for (int j = c; j < cols; ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

template <class K>
int rank_of(const Mat<K>& m, const ToleranceConfig& tol = {}) {
  return static_cast<int>(rref(m, tol).pivots.size());
}

// ---------------------------------------------------------------------------
// kernel_basis: basis of the right null space {x : m x = 0}

template <class K>
std::vector<Vec<K>> kernel_basis(const Mat<K>& m, const ToleranceConfig& tol = {}) {
  if constexpr (is_exact_v<K>) {
    auto [r, pivots] = rref(m, tol);
    std::vector<bool> is_pivot(m.cols, false);
    for (int p : pivots) is_pivot[p] = true;
    std::vector<Vec<K>> basis;
    for (int fc = 0; fc < m.cols; ++fc) {
      if (is_pivot[fc]) continue;
      Vec<K> v(m.cols, K{});
      v[fc] = scalar_from_int<K>(1);
      for (size_t t = 0; t < pivots.size(); ++t) v[pivots[t]] = -r(static_cast<int>(t), fc);
      basis.push_back(std::move(v));
    }
    return basis;
  } else {
    if (m.rows == 0) {
      std::vector<Vec<K>> basis;
      for (int j = 0; j < m.cols; ++j) basis.push_back(unit_vec<K>(m.cols, j));
      return basis;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double cutoff = tol.rank_tol * (sv.size() ? sv(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > cutoff) ++rank;
    std::vector<Vec<K>> basis;
    for (int j = rank; j < m.cols; ++j) {
      Vec<K> v(m.cols);
      for (int i = 0; i < m.cols; ++i) v[i] = svd.matrixV()(i, j);
      basis.push_back(std::move(v));
    }
    return basis;
  }
}

// ---------------------------------------------------------------------------
// Linear solves

// Solves a x = b for square a; empty result when a is singular.
template <class K>
std::optional<Mat<K>> solve(const Mat<K>& a, const Mat<K>& b, const ToleranceConfig& tol = {}) {
  if (a.rows != a.cols || a.rows != b.rows) fail("ShapeMismatch", "solve");
  const int n = a.rows;
  if (n == 0) return Mat<K>(0, b.cols);
  Mat<K> aug(n, n + b.cols);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    for (int j = 0; j < b.cols; ++j) aug(i, n + j) = b(i, j);
  }
  auto [r, pivots] = rref(std::move(aug), tol);
  if (static_cast<int>(pivots.size()) != n || pivots.back() != n - 1) return std::nullopt;
  for (size_t t = 0; t < pivots.size(); ++t)
    if (pivots[t] != static_cast<int>(t)) return std::nullopt;
  Mat<K> x(n, b.cols);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < b.cols; ++j) x(i, j) = r(i, n + j);
  return x;
}

template <class K>
std::optional<Vec<K>> solve(const Mat<K>& a, const Vec<K>& b, const ToleranceConfig& tol = {}) {
  Mat<K> bm(static_cast<int>(b.size()), 1);
  for (size_t i = 0; i < b.size(); ++i) bm(static_cast<int>(i), 0) = b[i];
  auto x = solve(a, bm, tol);
  if (!x) return std::nullopt;
  return column_of(*x, 0);
}

template <class K>
std::optional<Mat<K>> inverse(const Mat<K>& a, const ToleranceConfig& tol = {}) {
  return solve(a, Mat<K>::identity(a.rows), tol);
}

// ---------------------------------------------------------------------------
// Hermitian checks and PSD certification

template <class K>
bool is_hermitian(const Mat<K>& g, const ToleranceConfig& tol = {}) {
  if (g.rows != g.cols) return false;
  if constexpr (is_exact_v<K>) {
    return g == dagger(g);
  } else {
    return max_abs_diff(g, dagger(g)) <= tol.psd_tol * std::max(mat_scale(g), 1.0);
  }
}

template <class K>
struct PsdResult {
  bool psd = true;
  std::optional<Vec<K>> witness;  // x with <x, g x> < 0 when not PSD
};

namespace detail {

// Pivoted LDL* over the exact field. Maintains g_cur = t g t^H, so a witness x
// found in current coordinates pulls back to t^H x.
inline PsdResult<ExactScalar> psd_certify_exact(Mat<ExactScalar> g) {
  using K = ExactScalar;
  const int n = g.rows;
  Mat<K> t = Mat<K>::identity(n);
  std::vector<bool> done(n, false);
  auto witness_from = [&](const Vec<K>& x) {
    PsdResult<K> res;
    res.psd = false;
    res.witness = dagger(t) * x;
    return res;
  };
  for (int step = 0; step < n; ++step) {
    int p = -1;
    for (int j = 0; j < n; ++j) {
      if (done[j] || is_zero(g(j, j))) continue;
      if (g(j, j).im != 0) fail("NotHermitian", "complex diagonal entry");
      if (g(j, j).re < 0) return witness_from(unit_vec<K>(n, j));
      p = j;
      break;
    }
    if (p < 0) {
      // all remaining diagonals are zero; any remaining off-diagonal entry
      // makes the form indefinite
      for (int j = 0; j < n; ++j) {
        if (done[j]) continue;
        for (int k = 0; k < n; ++k) {
          if (done[k] || k == j || is_zero(g(j, k))) continue;
          Vec<K> x(n, K{});
          x[j] = -g(j, k);
          x[k] = scalar_from_int<K>(1);
          return witness_from(x);
        }
      }
      return {};
    }
    done[p] = true;
    K d = g(p, p);
    std::vector<std::pair<int, K>> mults;
    for (int i = 0; i < n; ++i) {
      if (done[i] || is_zero(g(i, p))) continue;
      mults.emplace_back(i, g(i, p) / d);
    }
    // g <- e g e^H with e = I - sum_i m_i E_{ip}; update t the same way
    for (const auto& [i, mi] : mults) {
      for (int j = 0; j < n; ++j) {
        g(i, j) -= mi * g(p, j);
        t(i, j) -= mi * t(p, j);
      }
    }
    for (const auto& [i, mi] : mults)
      for (int r2 = 0; r2 < n; ++r2) g(r2, i) -= conj_s(mi) * g(r2, p);
  }
  return {};
}

inline PsdResult<FloatScalar> psd_certify_float(const Mat<FloatScalar>& g,
                                                const ToleranceConfig& tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(g));
  double scale = std::max(mat_scale(g), 1.0);
  int argmin = 0;
  es.eigenvalues().minCoeff(&argmin);
  if (es.eigenvalues()(argmin) >= -tol.psd_tol * scale) return {};
  PsdResult<FloatScalar> res;
  res.psd = false;
  Vec<FloatScalar> w(g.rows);
  for (int i = 0; i < g.rows; ++i) w[i] = es.eigenvectors()(i, argmin);
  res.witness = std::move(w);
  return res;
}

}  // namespace detail

template <class K>
PsdResult<K> psd_certify(const Mat<K>& g, const ToleranceConfig& tol = {}) {
  if (g.rows != g.cols) fail("ShapeMismatch", "psd_certify needs a square matrix");
  if (!is_hermitian(g, tol)) fail("NotHermitian", "psd_certify needs a Hermitian matrix");
  if constexpr (is_exact_v<K>) {
    return detail::psd_certify_exact(g);
  } else {
    return detail::psd_certify_float(g, tol);
  }
}

// <x, g y> in the standard sense: sum_ij conj(x_i) g_ij y_j.
template <class K>
K quad_form(const Mat<K>& g, const Vec<K>& x, const Vec<K>& y) {
  K out{};
  for (int i = 0; i < g.rows; ++i) {
    if (is_zero(x[i])) continue;
    for (int j = 0; j < g.cols; ++j) out += conj_s(x[i]) * g(i, j) * y[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral clustering of a normal matrix (float backend only)

struct SpectralCluster {
  FloatScalar eigenvalue;
  Mat<FloatScalar> projection;
};

std::vector<SpectralCluster> spectral_clusters(const Mat<FloatScalar>& n,
                                               const ToleranceConfig& tol = {});

template <class K>
std::vector<SpectralCluster> spectral_clusters(const Mat<K>&, const ToleranceConfig& = {}) {
  static_assert(!is_exact_v<K>, "spectral_clusters requires the float backend");
  return {};
}

// ---------------------------------------------------------------------------
// Adjoint with respect to Hermitian Gram forms, for the pairing
// <x, y>_G = sum_ij x_i conj(y_j) G_ij. Solves <f x, y>_cod = <x, f* y>_dom.

template <class K>
Mat<K> adjoint_wrt_forms(const Mat<K>& f, const Mat<K>& g_dom, const Mat<K>& g_cod,
                         const ToleranceConfig& tol = {}) {
  if (f.cols != g_dom.rows || f.rows != g_cod.rows) fail("ShapeMismatch", "adjoint_wrt_forms");
  if (!inverse(g_cod, tol)) fail("DegenerateForm", "codomain form is singular");
  auto x = solve(transpose(g_dom), dagger(f) * transpose(g_cod), tol);
  if (!x) fail("DegenerateForm", "domain form is singular");
  return *x;
}

// ---------------------------------------------------------------------------
// Quotient of a coordinate space by the radical of a Hermitian form.
//
// Conventions, shared by every module: the pairing is
//   <x, y>_G = sum_ij x_i conj(y_j) G_ij,
// the radical is {x : x^T G = 0}, representatives are the leftmost pivot
// columns of rref(G), and gram(a,b) = G(p_a, p_b) is nondegenerate.

template <class K>
struct FormQuotient {
  Mat<K> gram_full;
  std::vector<Vec<K>> radical;
  std::vector<int> pivots;
  Mat<K> gram;     // q x q, nondegenerate
  Mat<K> qt_inv;   // inverse of gram^T, backing reduce()
  int dim = 0;     // ambient dimension
  int qdim = 0;    // quotient dimension

  // Coordinates of the class [x] in the pivot basis.
  Vec<K> reduce(const Vec<K>& x) const {
    Vec<K> rhs(qdim, K{});
    for (int i = 0; i < dim; ++i) {
      if (is_zero(x[i])) continue;
      for (int t = 0; t < qdim; ++t) rhs[t] += gram_full(i, pivots[t]) * x[i];
    }
    return qt_inv * rhs;
  }

  // <x, y> on quotient coordinates: x^T gram conj(y).
  K pair(const Vec<K>& x, const Vec<K>& y) const {
    K out{};
    for (int i = 0; i < qdim; ++i) {
      if (is_zero(x[i])) continue;
      for (int j = 0; j < qdim; ++j) out += x[i] * gram(i, j) * conj_s(y[j]);
    }
    return out;
  }
};

template <class K>
FormQuotient<K> form_quotient(Mat<K> gram_full, const ToleranceConfig& tol = {}) {
  FormQuotient<K> q;
  q.dim = gram_full.rows;
  q.radical = kernel_basis(transpose(gram_full), tol);
  q.pivots = rref(gram_full, tol).pivots;
  q.qdim = static_cast<int>(q.pivots.size());
  if (q.qdim + static_cast<int>(q.radical.size()) != q.dim)
    fail("DegenerateForm", "inconsistent rank decisions on the form");
  q.gram = Mat<K>(q.qdim, q.qdim);
  for (int a = 0; a < q.qdim; ++a)
    for (int b = 0; b < q.qdim; ++b) q.gram(a, b) = gram_full(q.pivots[a], q.pivots[b]);
  auto inv = inverse(transpose(q.gram), tol);
  if (!inv) fail("DegenerateForm", "quotient form unexpectedly singular");
  q.qt_inv = std::move(*inv);
  q.gram_full = std::move(gram_full);
  return q;
}

}  // namespace gnslab
