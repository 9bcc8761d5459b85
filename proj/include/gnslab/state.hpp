#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gnslab/star_algebra.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// States: *-linear functionals presented by their values on the basis.

template <class K>
struct State {
  AlgebraPtr<K> algebra;
  Vec<K> functional;  // phi(e_i)
  K normalization;    // phi(1), cached
};

template <class K>
K evaluate(const State<K>& s, const Vec<K>& coords) {
  K out{};
  for (size_t i = 0; i < coords.size(); ++i) {
    if (is_zero(coords[i])) continue;
    out += coords[i] * s.functional[i];
  }
  return out;
}

template <class K>
K evaluate(const State<K>& s, const Element<K>& x) {
  require_same_algebra(s.algebra, x.algebra, "element is not in the state's algebra");
  return evaluate(s, x.coords);
}

// Validates *-linearity phi(a*) = conj(phi(a)) on every basis element.
template <class K>
State<K> make_state(AlgebraPtr<K> algebra, Vec<K> functional, const ToleranceConfig& tol = {}) {
  if (static_cast<int>(functional.size()) != algebra->dim)
    fail("ShapeMismatch", "functional length does not match the algebra dimension");
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) eps = tol.spec_tol * std::max(vec_scale(functional), 1.0);
  State<K> s{std::move(algebra), std::move(functional), K{}};
  for (int i = 0; i < s.algebra->dim; ++i) {
    K lhs = evaluate(s, star_coords(*s.algebra, unit_vec<K>(s.algebra->dim, i)));
    K rhs = conj_s(s.functional[i]);
    bool ok;
    if constexpr (is_exact_v<K>) {
      ok = lhs == rhs;
    } else {
      ok = mag(lhs - rhs) <= eps;
    }
    if (!ok) fail("NotStarLinear", "at basis element " + s.algebra->labels[i]);
  }
  s.normalization = evaluate(s, s.algebra->unit);
  return s;
}

// State a |-> <rep(a) v, v> defined through the faithful representation.
template <class K>
State<K> vectorial_state(const AlgebraPtr<K>& algebra, const Vec<K>& v,
                         const ToleranceConfig& tol = {}) {
  if (!algebra->faithful_rep) fail("NoFaithfulRep", "vectorial state needs a representation");
  const Rep<K>& rep = *algebra->faithful_rep;
  if (static_cast<int>(v.size()) != rep.dim)
    fail("ShapeMismatch", "vector does not live in the representation space");
  Vec<K> functional(algebra->dim, K{});
  for (int i = 0; i < algebra->dim; ++i) {
    Vec<K> av = rep.mats[i] * v;
    K out{};
    for (int p = 0; p < rep.dim; ++p) out += conj_s(v[p]) * av[p];
    functional[i] = out;
  }
  return make_state(algebra, std::move(functional), tol);
}

// ---------------------------------------------------------------------------
// Induced Hermitian form: G[i][j] = <e_i, e_j>_phi = phi(e_j* e_i).

template <class K>
Mat<K> gram_of_state(const State<K>& s) {
  const StarAlgebra<K>& a = *s.algebra;
  Mat<K> g(a.dim, a.dim);
  std::vector<Vec<K>> stars;
  stars.reserve(a.dim);
  for (int j = 0; j < a.dim; ++j) stars.push_back(star_coords(a, unit_vec<K>(a.dim, j)));
  for (int i = 0; i < a.dim; ++i) {
    Vec<K> ei = unit_vec<K>(a.dim, i);
    for (int j = 0; j < a.dim; ++j) g(i, j) = evaluate(s, mul_coords(a, stars[j], ei));
  }
  return g;
}

// phi is positive iff its form is PSD; the witness satisfies phi(a* a) < 0.
template <class K>
PsdResult<K> is_positive(const State<K>& s, const ToleranceConfig& tol = {}) {
  PsdResult<K> res = psd_certify(gram_of_state(s), tol);
  if (res.witness) res.witness = conjugate(*res.witness);
  return res;
}

// ---------------------------------------------------------------------------
// Normalization

template <class K>
State<K> make_I(const K& lambda) {
  return make_state(make_matrix_algebra<K>(1), Vec<K>{lambda});
}

template <class K>
bool same_normalization(const State<K>& a, const State<K>& b, const ToleranceConfig& tol = {}) {
  if constexpr (is_exact_v<K>) {
    return a.normalization == b.normalization;
  } else {
    double s = std::max({mag(a.normalization), mag(b.normalization), 1.0});
    return mag(a.normalization - b.normalization) <= tol.spec_tol * s;
  }
}

template <class K>
void check_same_normalization(const State<K>& dom, const State<K>& cod,
                              const ToleranceConfig& tol = {}) {
  if (!same_normalization(dom, cod, tol))
    fail("NotSameState", "states have different normalizations phi(1)");
}

template <class K>
State<K> normalize(const State<K>& s, const ToleranceConfig& tol = {}) {
  bool isotropic;
  if constexpr (is_exact_v<K>) {
    isotropic = is_zero(s.normalization);
  } else {
    isotropic = mag(s.normalization) <= tol.psd_tol * std::max(vec_scale(s.functional), 1.0);
  }
  if (isotropic) fail("IsotropicState", "cannot normalize a state with phi(1) = 0");
  K inv = scalar_from_int<K>(1) / s.normalization;
  return {s.algebra, inv * s.functional, scalar_from_int<K>(1)};
}

// ---------------------------------------------------------------------------
// Tensor and conjugate states

template <class K>
State<K> tensor_state(const State<K>& x, const State<K>& y) {
  State<K> s;
  s.algebra = tensor_algebra(x.algebra, y.algebra);
  s.functional = kron(x.functional, y.functional);
  s.normalization = x.normalization * y.normalization;
  return s;
}

template <class K>
State<K> conjugate_state(const State<K>& s) {
  return {conjugate_algebra(s.algebra), conjugate(s.functional), conj_s(s.normalization)};
}

}  // namespace gnslab
