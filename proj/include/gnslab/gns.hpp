#pragma once

#include <utility>
#include <vector>

#include "gnslab/state.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// The GNS space of a state: the coordinate space of the algebra divided by
// the radical of the induced form, carrying the left multiplication action
// and the class omega of the unit.

template <class K>
struct GnsSpace {
  AlgebraPtr<K> algebra;
  FormQuotient<K> form;             // gram_full, radical, pivots, quotient gram
  std::vector<Vec<K>> quotient_reps;  // ambient representatives of the basis
  std::vector<Mat<K>> actions;        // left multiplication by each e_i
  Vec<K> omega;                       // class of 1

  int dim() const { return form.qdim; }
  const Mat<K>& gram() const { return form.gram; }
  const Mat<K>& gram_full() const { return form.gram_full; }
  const std::vector<Vec<K>>& radical_basis() const { return form.radical; }
  Vec<K> reduce(const Vec<K>& x) const { return form.reduce(x); }
  K pair(const Vec<K>& x, const Vec<K>& y) const { return form.pair(x, y); }

  Mat<K> action_of(const Vec<K>& x) const {
    Mat<K> m(form.qdim, form.qdim);
    for (size_t i = 0; i < x.size(); ++i) {
      if (is_zero(x[i])) continue;
      m = m + x[i] * actions[i];
    }
    return m;
  }

  // phi recovered from the module: phi(e_i) = <action(e_i) omega, omega>.
  Vec<K> functional() const {
    Vec<K> out(actions.size(), K{});
    for (size_t i = 0; i < actions.size(); ++i) out[i] = form.pair(actions[i] * omega, omega);
    return out;
  }
};

template <class K>
GnsSpace<K> gns(const State<K>& s, const ToleranceConfig& tol = {}) {
  GnsSpace<K> g;
  g.algebra = s.algebra;
  g.form = form_quotient(gram_of_state(s), tol);
  const StarAlgebra<K>& a = *s.algebra;
  for (int p : g.form.pivots) g.quotient_reps.push_back(unit_vec<K>(a.dim, p));
  for (int i = 0; i < a.dim; ++i) {
    Mat<K> act(g.form.qdim, g.form.qdim);
    for (int t = 0; t < g.form.qdim; ++t) {
      Vec<K> prod(a.dim, K{});
      for (const auto& [k, c] : a.ptab[i * a.dim + g.form.pivots[t]]) prod[k] += c;
      Vec<K> col = g.form.reduce(prod);
      for (int r = 0; r < g.form.qdim; ++r) act(r, t) = col[r];
    }
    g.actions.push_back(std::move(act));
  }
  g.omega = g.form.reduce(a.unit);
  return g;
}

// State of a vector in the module: a |-> <a v, v>.
template <class K>
State<K> vector_state(const GnsSpace<K>& g, const Vec<K>& v) {
  if (static_cast<int>(v.size()) != g.dim())
    fail("ShapeMismatch", "vector does not live in the quotient");
  State<K> s;
  s.algebra = g.algebra;
  s.functional.assign(g.algebra->dim, K{});
  for (int i = 0; i < g.algebra->dim; ++i) s.functional[i] = g.pair(g.actions[i] * v, v);
  s.normalization = evaluate(s, g.algebra->unit);
  return s;
}

// ---------------------------------------------------------------------------
// Cyclic modules: any concrete (actions, form, cyclic vector) presentation.

template <class K>
struct CyclicModule {
  int dim = 0;
  std::vector<Mat<K>> actions;  // one per algebra basis element
  Mat<K> gram;                  // Hermitian form in the same pairing convention
  Vec<K> omega;
};

template <class K>
CyclicModule<K> as_cyclic_module(const GnsSpace<K>& g) {
  return {g.dim(), g.actions, g.gram(), g.omega};
}

// <x, y> = sum_ij x_i conj(y_j) gram(i, j), linear in the first slot.
template <class K>
K form_pair(const Mat<K>& gram, const Vec<K>& x, const Vec<K>& y) {
  K out{};
  for (int i = 0; i < gram.rows; ++i) {
    if (is_zero(x[i])) continue;
    for (int j = 0; j < gram.cols; ++j) out += x[i] * gram(i, j) * conj_s(y[j]);
  }
  return out;
}

namespace detail {

template <class K>
Mat<K> module_action(const CyclicModule<K>& m, const Vec<K>& x) {
  Mat<K> out(m.dim, m.dim);
  for (size_t i = 0; i < x.size(); ++i) {
    if (is_zero(x[i])) continue;
    out = out + x[i] * m.actions[i];
  }
  return out;
}

template <class K>
bool near_equal_scalar(const K& a, const K& b, double eps) {
  if constexpr (is_exact_v<K>) {
    return a == b;
  } else {
    return mag(a - b) <= eps;
  }
}

}  // namespace detail

// Columns of the map [x] |-> rho(x) v over the quotient representatives;
// the concrete realization of a GNS class inside a module.
template <class K>
Mat<K> cyclic_embedding(const GnsSpace<K>& g, const std::vector<Mat<K>>& mats, const Vec<K>& v) {
  const int n = static_cast<int>(v.size());
  Mat<K> t(n, g.dim());
  for (int c = 0; c < g.dim(); ++c) {
    Vec<K> col(n, K{});
    const Vec<K>& r = g.quotient_reps[c];
    for (size_t i = 0; i < r.size(); ++i) {
      if (is_zero(r[i])) continue;
      col = col + r[i] * (mats[i] * v);
    }
    for (int i = 0; i < n; ++i) t(i, c) = col[i];
  }
  return t;
}

// The unique cyclic isometry from the quotient construction onto any other
// cyclic module representing the same state.
template <class K>
Mat<K> cyclic_isomorphism(const GnsSpace<K>& g, const CyclicModule<K>& m,
                          const ToleranceConfig& tol = {}) {
  if (static_cast<int>(m.actions.size()) != g.algebra->dim ||
      static_cast<int>(m.omega.size()) != m.dim || m.gram.rows != m.dim || m.gram.cols != m.dim)
    fail("ShapeMismatch", "module pieces are inconsistent");
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) {
    eps = tol.spec_tol * std::max({mat_scale(m.gram), vec_scale(m.omega), 1.0});
  }

  Mat<K> orbit(m.dim, g.algebra->dim);
  for (int i = 0; i < g.algebra->dim; ++i) {
    Vec<K> w = m.actions[i] * m.omega;
    K got = form_pair(m.gram, w, m.omega);
    K want = g.pair(g.actions[i] * g.omega, g.omega);
    if (!detail::near_equal_scalar(got, want, eps))
      fail("NotSameState", "module functional differs at " + g.algebra->labels[i]);
    for (int r = 0; r < m.dim; ++r) orbit(r, i) = w[r];
  }
  if (rank_of(orbit, tol) != m.dim)
    fail("NotSameState", "module is not cyclic for its vector");
  if (m.dim != g.dim()) fail("NotSameState", "module dimension differs from the GNS dimension");

  Mat<K> t = cyclic_embedding(g, m.actions, m.omega);
  if (!inverse(t, tol)) fail("NotSameState", "induced cyclic map is not invertible");
  for (int a = 0; a < g.dim(); ++a)
    for (int b = 0; b < g.dim(); ++b)
      if (!detail::near_equal_scalar(form_pair(m.gram, column_of(t, a), column_of(t, b)),
                                     g.gram()(a, b), eps))
        fail("NotSameState", "induced cyclic map is not isometric");
  return t;
}

// ---------------------------------------------------------------------------
// Orthonormal coordinates (positive states, float backend): a frame T with
// <x, y>_gram = (T y)^H (T x).

inline Mat<FloatScalar> orthonormal_frame(const GnsSpace<FloatScalar>& g,
                                          const ToleranceConfig& = {}) {
  Eigen::MatrixXcd gt = to_eigen(transpose(g.gram()));
  Eigen::LLT<Eigen::MatrixXcd> llt(gt);
  if (llt.info() != Eigen::Success)
    fail("NotPositive", "the quotient form admits no Cholesky factor");
  return from_eigen(Eigen::MatrixXcd(llt.matrixL().adjoint()));
}

template <class K>
Mat<K> orthonormal_frame(const GnsSpace<K>&, const ToleranceConfig& = {}) {
  fail("BackendError", "orthonormal frames require the float backend");
}

// ---------------------------------------------------------------------------
// The GNS space of the conjugate state is the conjugate space: same pivots,
// entrywise-conjugated gram.

struct ConjugateGnsReport {
  bool pivots_match = false;
  bool gram_is_conjugate = false;
  bool ok = false;
};

template <class K>
ConjugateGnsReport verify_conjugate_gns(const State<K>& s, const ToleranceConfig& tol = {}) {
  GnsSpace<K> g = gns(s, tol);
  GnsSpace<K> gc = gns(conjugate_state(s), tol);
  ConjugateGnsReport rep;
  rep.pivots_match = g.form.pivots == gc.form.pivots;
  if (rep.pivots_match) {
    Mat<K> want = conjugate(g.gram());
    if constexpr (is_exact_v<K>) {
      rep.gram_is_conjugate = gc.gram() == want;
    } else {
      rep.gram_is_conjugate =
          max_abs_diff(gc.gram(), want) <= tol.spec_tol * std::max(mat_scale(want), 1.0);
    }
  }
  rep.ok = rep.pivots_match && rep.gram_is_conjugate;
  return rep;
}

}  // namespace gnslab
