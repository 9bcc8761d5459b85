#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gnslab/linalg.hpp"
#include "gnslab/matrix.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// Finite-dimensional unital *-algebras presented by structure constants.
//
// Basis e_0..e_{dim-1}; products e_i e_j = sum_k c[i][j][k] e_k with the
// rank-3 array stored flat as struct_consts[(i*dim + j)*dim + k]. The star
// acts on coordinates as x |-> star * conj(x), so column i of `star` holds
// the coordinates of e_i*.

template <class K>
struct Rep {
  int dim = 0;               // dimension of the representation space
  std::vector<Mat<K>> mats;  // image of each basis element
};

template <class K>
struct StarAlgebra {
  int dim = 0;
  std::vector<std::string> labels;
  std::vector<K> struct_consts;
  Vec<K> unit;
  Mat<K> star;
  std::optional<Rep<K>> faithful_rep;

  // Sparse view of the product table: ptab[i*dim+j] lists (k, c_ijk != 0).
  std::vector<std::vector<std::pair<int, K>>> ptab;

  const K& sc(int i, int j, int k) const { return struct_consts[(i * dim + j) * dim + k]; }
  K& sc(int i, int j, int k) { return struct_consts[(i * dim + j) * dim + k]; }
};

template <class K>
using AlgebraPtr = std::shared_ptr<const StarAlgebra<K>>;

namespace detail {

template <class K>
void build_ptab(StarAlgebra<K>& a) {
  a.ptab.assign(static_cast<size_t>(a.dim) * a.dim, {});
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j)
      for (int k = 0; k < a.dim; ++k)
        if (!is_zero(a.sc(i, j, k))) a.ptab[i * a.dim + j].emplace_back(k, a.sc(i, j, k));
}

template <class K>
AlgebraPtr<K> seal(StarAlgebra<K>&& a) {
  build_ptab(a);
  return std::make_shared<const StarAlgebra<K>>(std::move(a));
}

}  // namespace detail

// Seals a raw presentation into a shareable handle. The table is taken as
// given; run check_algebra on anything that did not come from a constructor.
template <class K>
AlgebraPtr<K> make_algebra(StarAlgebra<K> a) {
  const int d = a.dim;
  if (static_cast<int>(a.labels.size()) != d ||
      static_cast<int>(a.struct_consts.size()) != d * d * d ||
      static_cast<int>(a.unit.size()) != d || a.star.rows != d || a.star.cols != d)
    fail("ShapeMismatch", "inconsistent algebra presentation");
  return detail::seal(std::move(a));
}

// Structural identity: two handles denote the same algebra when they share
// storage or are entrywise equal (constructors are deterministic, so equal
// inputs rebuild equal tables).
template <class K>
bool same_algebra(const AlgebraPtr<K>& a, const AlgebraPtr<K>& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->dim == b->dim && a->labels == b->labels && a->struct_consts == b->struct_consts &&
         a->unit == b->unit && a->star == b->star;
}

template <class K>
void require_same_algebra(const AlgebraPtr<K>& a, const AlgebraPtr<K>& b, const char* what) {
  if (!same_algebra(a, b)) fail("AlgebraMismatch", what);
}

// ---------------------------------------------------------------------------
// Coordinate arithmetic

template <class K>
Vec<K> mul_coords(const StarAlgebra<K>& a, const Vec<K>& x, const Vec<K>& y) {
  Vec<K> out(a.dim, K{});
  for (int i = 0; i < a.dim; ++i) {
    if (is_zero(x[i])) continue;
    for (int j = 0; j < a.dim; ++j) {
      if (is_zero(y[j])) continue;
      K f = x[i] * y[j];
      for (const auto& [k, c] : a.ptab[i * a.dim + j]) out[k] += f * c;
    }
  }
  return out;
}

template <class K>
Vec<K> star_coords(const StarAlgebra<K>& a, const Vec<K>& x) {
  return a.star * conjugate(x);
}

// Image of an element under the algebra's faithful representation.
template <class K>
Mat<K> rep_matrix(const StarAlgebra<K>& a, const Vec<K>& x) {
  if (!a.faithful_rep) fail("NoFaithfulRep", "algebra carries no faithful representation");
  Mat<K> m(a.faithful_rep->dim, a.faithful_rep->dim);
  for (int i = 0; i < a.dim; ++i) {
    if (is_zero(x[i])) continue;
    m = m + x[i] * a.faithful_rep->mats[i];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Elements

template <class K>
struct Element {
  AlgebraPtr<K> algebra;
  Vec<K> coords;
};

template <class K>
Element<K> make_element(AlgebraPtr<K> a, Vec<K> coords) {
  if (static_cast<int>(coords.size()) != a->dim)
    fail("ShapeMismatch", "coordinate vector does not match the algebra dimension");
  return {std::move(a), std::move(coords)};
}

template <class K>
Element<K> basis_element(const AlgebraPtr<K>& a, int i) {
  return {a, unit_vec<K>(a->dim, i)};
}

template <class K>
Element<K> unit_element(const AlgebraPtr<K>& a) {
  return {a, a->unit};
}

template <class K>
Element<K> mul(const Element<K>& x, const Element<K>& y) {
  require_same_algebra(x.algebra, y.algebra, "product of elements of different algebras");
  return {x.algebra, mul_coords(*x.algebra, x.coords, y.coords)};
}

template <class K>
Element<K> star(const Element<K>& x) {
  return {x.algebra, star_coords(*x.algebra, x.coords)};
}

template <class K>
Element<K> scale(const K& c, const Element<K>& x) {
  return {x.algebra, c * x.coords};
}

template <class K>
Element<K> add(const Element<K>& x, const Element<K>& y) {
  require_same_algebra(x.algebra, y.algebra, "sum of elements of different algebras");
  return {x.algebra, x.coords + y.coords};
}

template <class K>
Element<K> sub(const Element<K>& x, const Element<K>& y) {
  require_same_algebra(x.algebra, y.algebra, "difference of elements of different algebras");
  return {x.algebra, x.coords - y.coords};
}

namespace detail {

template <class K>
bool near_zero_vec(const Vec<K>& v, double eps) {
  if constexpr (is_exact_v<K>) {
    return is_zero_vec(v);
  } else {
    for (const auto& x : v)
      if (mag(x) > eps) return false;
    return true;
  }
}

}  // namespace detail

template <class K>
bool is_normal(const Element<K>& x, const ToleranceConfig& tol = {}) {
  Element<K> xs = star(x);
  Vec<K> comm = mul_coords(*x.algebra, x.coords, xs.coords) -
                mul_coords(*x.algebra, xs.coords, x.coords);
  double s = 1.0;
  if constexpr (!is_exact_v<K>) s = std::max(1.0, vec_scale(x.coords) * vec_scale(x.coords));
  return detail::near_zero_vec(comm, tol.spec_tol * s);
}

template <class K>
bool is_projection(const Element<K>& x, const ToleranceConfig& tol = {}) {
  double s = 1.0;
  if constexpr (!is_exact_v<K>) s = std::max(1.0, vec_scale(x.coords) * vec_scale(x.coords));
  Vec<K> sq = mul_coords(*x.algebra, x.coords, x.coords);
  return detail::near_zero_vec(sq - x.coords, tol.spec_tol * s) &&
         detail::near_zero_vec(star_coords(*x.algebra, x.coords) - x.coords, tol.spec_tol * s);
}

// ---------------------------------------------------------------------------
// Canonical constructors

template <class K>
AlgebraPtr<K> make_matrix_algebra(int n) {
  if (n < 1) fail("ShapeMismatch", "matrix algebra needs n >= 1");
  StarAlgebra<K> a;
  a.dim = n * n;
  a.struct_consts.assign(static_cast<size_t>(a.dim) * a.dim * a.dim, K{});
  a.unit.assign(a.dim, K{});
  a.star = Mat<K>(a.dim, a.dim);
  K one = scalar_from_int<K>(1);
  Rep<K> rep;
  rep.dim = n;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      int i = p * n + q;
      a.labels.push_back("E" + std::to_string(p + 1) + std::to_string(q + 1));
      a.star(q * n + p, i) = one;
      Mat<K> m(n, n);
      m(p, q) = one;
      rep.mats.push_back(std::move(m));
      // E_pq E_rs = delta_qr E_ps
      for (int s = 0; s < n; ++s) a.sc(i, q * n + s, p * n + s) = one;
    }
    a.unit[p * n + p] = one;
  }
  a.faithful_rep = std::move(rep);
  return detail::seal(std::move(a));
}

template <class K>
AlgebraPtr<K> make_function_algebra(const std::vector<std::string>& points) {
  if (points.empty()) fail("ShapeMismatch", "function algebra needs at least one point");
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j]) fail("DuplicateLabel", "point label \"" + points[i] + "\"");
  StarAlgebra<K> a;
  a.dim = static_cast<int>(points.size());
  a.labels = points;
  a.struct_consts.assign(static_cast<size_t>(a.dim) * a.dim * a.dim, K{});
  K one = scalar_from_int<K>(1);
  a.unit.assign(a.dim, one);
  a.star = Mat<K>::identity(a.dim);
  Rep<K> rep;
  rep.dim = a.dim;
  for (int i = 0; i < a.dim; ++i) {
    a.sc(i, i, i) = one;
    Mat<K> m(a.dim, a.dim);
    m(i, i) = one;
    rep.mats.push_back(std::move(m));
  }
  a.faithful_rep = std::move(rep);
  return detail::seal(std::move(a));
}

template <class K>
AlgebraPtr<K> make_group_algebra(const std::vector<std::vector<int>>& table,
                                 std::vector<std::string> labels = {}) {
  const int n = static_cast<int>(table.size());
  if (n < 1) fail("NotAGroup", "empty multiplication table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n) fail("NotAGroup", "multiplication table is not square");
    for (int v : row)
      if (v < 0 || v >= n) fail("NotAGroup", "table entry out of range");
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (table[table[i][j]][k] != table[i][table[j][k]])
          fail("NotAGroup", "associativity fails at triple (" + std::to_string(i) + ", " +
                                std::to_string(j) + ", " + std::to_string(k) + ")");
  int e = -1;
  for (int g = 0; g < n && e < 0; ++g) {
    bool ok = true;
    for (int h = 0; h < n; ++h) ok = ok && table[g][h] == h && table[h][g] == h;
    if (ok) e = g;
  }
  if (e < 0) fail("NotAGroup", "no identity element");
  std::vector<int> inv(n, -1);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h)
      if (table[g][h] == e && table[h][g] == e) inv[g] = h;
    if (inv[g] < 0) fail("NotAGroup", "element " + std::to_string(g) + " has no inverse");
  }

  StarAlgebra<K> a;
  a.dim = n;
  if (labels.empty())
    for (int g = 0; g < n; ++g) labels.push_back("g" + std::to_string(g));
  if (static_cast<int>(labels.size()) != n) fail("ShapeMismatch", "one label per group element");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (labels[i] == labels[j]) fail("DuplicateLabel", "group label \"" + labels[i] + "\"");
  a.labels = std::move(labels);
  a.struct_consts.assign(static_cast<size_t>(n) * n * n, K{});
  K one = scalar_from_int<K>(1);
  a.unit.assign(n, K{});
  a.unit[e] = one;
  a.star = Mat<K>(n, n);
  Rep<K> rep;
  rep.dim = n;
  for (int g = 0; g < n; ++g) {
    a.star(inv[g], g) = one;
    Mat<K> m(n, n);  // left regular representation: g . e_h = e_{gh}
    for (int h = 0; h < n; ++h) {
      a.sc(g, h, table[g][h]) = one;
      m(table[g][h], h) = one;
    }
    rep.mats.push_back(std::move(m));
  }
  a.faithful_rep = std::move(rep);
  return detail::seal(std::move(a));
}

template <class K>
AlgebraPtr<K> tensor_algebra(const AlgebraPtr<K>& x, const AlgebraPtr<K>& y) {
  StarAlgebra<K> a;
  const int dx = x->dim, dy = y->dim;
  a.dim = dx * dy;
  a.struct_consts.assign(static_cast<size_t>(a.dim) * a.dim * a.dim, K{});
  for (int i1 = 0; i1 < dx; ++i1)
    for (int j1 = 0; j1 < dy; ++j1) a.labels.push_back("(" + x->labels[i1] + "," + y->labels[j1] + ")");
  for (int i1 = 0; i1 < dx; ++i1)
    for (int i2 = 0; i2 < dx; ++i2)
      for (const auto& [i3, cx] : x->ptab[i1 * dx + i2])
        for (int j1 = 0; j1 < dy; ++j1)
          for (int j2 = 0; j2 < dy; ++j2)
            for (const auto& [j3, cy] : y->ptab[j1 * dy + j2])
              a.sc(i1 * dy + j1, i2 * dy + j2, i3 * dy + j3) = cx * cy;
  a.unit = kron(x->unit, y->unit);
  a.star = kron(x->star, y->star);
  if (x->faithful_rep && y->faithful_rep) {
    Rep<K> rep;
    rep.dim = x->faithful_rep->dim * y->faithful_rep->dim;
    for (int i = 0; i < dx; ++i)
      for (int j = 0; j < dy; ++j)
        rep.mats.push_back(kron(x->faithful_rep->mats[i], y->faithful_rep->mats[j]));
    a.faithful_rep = std::move(rep);
  }
  return detail::seal(std::move(a));
}

template <class K>
AlgebraPtr<K> conjugate_algebra(const AlgebraPtr<K>& x) {
  StarAlgebra<K> a;
  a.dim = x->dim;
  a.labels = x->labels;
  a.struct_consts.reserve(x->struct_consts.size());
  for (const auto& c : x->struct_consts) a.struct_consts.push_back(conj_s(c));
  a.unit = conjugate(x->unit);
  a.star = conjugate(x->star);
  if (x->faithful_rep) {
    Rep<K> rep;
    rep.dim = x->faithful_rep->dim;
    for (const auto& m : x->faithful_rep->mats) rep.mats.push_back(conjugate(m));
    a.faithful_rep = std::move(rep);
  }
  return detail::seal(std::move(a));
}

// ---------------------------------------------------------------------------
// Homomorphisms and *-linear maps. `matrix` sends domain coordinates to
// codomain coordinates (cod.dim x dom.dim).

template <class K>
struct StarHomomorphism {
  AlgebraPtr<K> dom;
  AlgebraPtr<K> cod;
  Mat<K> matrix;
};

template <class K>
struct StarLinearMap {
  AlgebraPtr<K> dom;
  AlgebraPtr<K> cod;
  Mat<K> matrix;
};

template <class K>
Element<K> apply(const StarHomomorphism<K>& f, const Element<K>& x) {
  require_same_algebra(f.dom, x.algebra, "element is not in the map's domain");
  return {f.cod, f.matrix * x.coords};
}

template <class K>
Element<K> apply(const StarLinearMap<K>& f, const Element<K>& x) {
  require_same_algebra(f.dom, x.algebra, "element is not in the map's domain");
  return {f.cod, f.matrix * x.coords};
}

template <class K>
StarHomomorphism<K> identity_hom(const AlgebraPtr<K>& a) {
  return {a, a, Mat<K>::identity(a->dim)};
}

// g after f.
template <class K>
StarHomomorphism<K> compose(const StarHomomorphism<K>& g, const StarHomomorphism<K>& f) {
  require_same_algebra(f.cod, g.dom, "homomorphisms do not compose");
  return {f.dom, g.cod, g.matrix * f.matrix};
}

namespace detail {

template <class K>
bool near_equal_vec(const Vec<K>& a, const Vec<K>& b, double eps) {
  if constexpr (is_exact_v<K>) {
    return a == b;
  } else {
    return max_abs_diff(a, b) <= eps;
  }
}

template <class K>
bool near_equal_mat(const Mat<K>& a, const Mat<K>& b, double eps) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  if constexpr (is_exact_v<K>) {
    return a == b;
  } else {
    return max_abs_diff(a, b) <= eps;
  }
}

}  // namespace detail

// Validates unitality, multiplicativity on basis pairs, and star
// preservation; reports the first violated law with a witness.
template <class K>
StarHomomorphism<K> check_homomorphism(const AlgebraPtr<K>& dom, const AlgebraPtr<K>& cod,
                                       const Mat<K>& m, const ToleranceConfig& tol = {}) {
  if (m.rows != cod->dim || m.cols != dom->dim)
    fail("ShapeMismatch", "homomorphism matrix must be cod.dim x dom.dim");
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) {
    double s = std::max(mat_scale(m), 1.0);
    eps = tol.spec_tol * s * s;
  }
  if (!detail::near_equal_vec(m * dom->unit, cod->unit, eps)) fail("NotUnital", "F(1) != 1");
  for (int i = 0; i < dom->dim; ++i) {
    Vec<K> lhs = m * star_coords(*dom, unit_vec<K>(dom->dim, i));
    Vec<K> rhs = star_coords(*cod, column_of(m, i));
    if (!detail::near_equal_vec(lhs, rhs, eps))
      fail("NotStarPreserving", "at basis element " + dom->labels[i]);
  }
  for (int i = 0; i < dom->dim; ++i) {
    for (int j = 0; j < dom->dim; ++j) {
      Vec<K> prod(dom->dim, K{});
      for (const auto& [k, c] : dom->ptab[i * dom->dim + j]) prod[k] += c;
      Vec<K> lhs = m * prod;
      Vec<K> rhs = mul_coords(*cod, column_of(m, i), column_of(m, j));
      if (!detail::near_equal_vec(lhs, rhs, eps))
        fail("NotMultiplicative",
             "at basis pair (" + dom->labels[i] + ", " + dom->labels[j] + ")");
    }
  }
  return {dom, cod, m};
}

template <class K>
StarHomomorphism<K> check_homomorphism(const StarHomomorphism<K>& f,
                                       const ToleranceConfig& tol = {}) {
  return check_homomorphism(f.dom, f.cod, f.matrix, tol);
}

// Validates star preservation only (multiplicativity not required).
template <class K>
StarLinearMap<K> check_star_linear(const AlgebraPtr<K>& dom, const AlgebraPtr<K>& cod,
                                   const Mat<K>& m, const ToleranceConfig& tol = {}) {
  if (m.rows != cod->dim || m.cols != dom->dim)
    fail("ShapeMismatch", "linear map matrix must be cod.dim x dom.dim");
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) eps = tol.spec_tol * std::max(mat_scale(m), 1.0);
  for (int i = 0; i < dom->dim; ++i) {
    Vec<K> lhs = m * star_coords(*dom, unit_vec<K>(dom->dim, i));
    Vec<K> rhs = star_coords(*cod, column_of(m, i));
    if (!detail::near_equal_vec(lhs, rhs, eps))
      fail("NotStarPreserving", "at basis element " + dom->labels[i]);
  }
  return {dom, cod, m};
}

template <class K>
StarHomomorphism<K> tensor_hom(const StarHomomorphism<K>& f, const StarHomomorphism<K>& g) {
  return {tensor_algebra(f.dom, g.dom), tensor_algebra(f.cod, g.cod), kron(f.matrix, g.matrix)};
}

// ---------------------------------------------------------------------------
// Subalgebra generated by a family of elements

template <class K>
struct Subalgebra {
  AlgebraPtr<K> algebra;
  StarHomomorphism<K> inclusion;  // sub -> parent
};

namespace detail {

// Incremental echelon store over ambient coordinates; keeps the original
// vectors that were accepted as independent.
template <class K>
struct SpanBuilder {
  int ambient;
  ToleranceConfig tol;
  std::vector<Vec<K>> basis;    // accepted vectors, in arrival order
  std::vector<Vec<K>> echelon;  // reduced rows, pivot normalized to 1
  std::vector<int> pivot_col;

  explicit SpanBuilder(int n, const ToleranceConfig& t) : ambient(n), tol(t) {}

  bool insert(const Vec<K>& v) {
    Vec<K> r = v;
    for (size_t t = 0; t < echelon.size(); ++t) {
      const K& f = r[pivot_col[t]];
      if (is_zero(f)) continue;
      K c = f;
      for (int j = 0; j < ambient; ++j) r[j] -= c * echelon[t][j];
    }
    int p = -1;
    if constexpr (is_exact_v<K>) {
      for (int j = 0; j < ambient; ++j)
        if (!is_zero(r[j])) {
          p = j;
          break;
        }
    } else {
      double cut = tol.rank_tol * std::max(vec_scale(v), 1.0);
      double best = cut;
      for (int j = 0; j < ambient; ++j)
        if (mag(r[j]) > best) {
          best = mag(r[j]);
          p = j;
        }
    }
    if (p < 0) return false;
    K inv = scalar_from_int<K>(1) / r[p];
    r = inv * r;
    for (auto& row : echelon) {
      if (is_zero(row[p])) continue;
      K c = row[p];
      for (int j = 0; j < ambient; ++j) row[j] -= c * r[j];
    }
    echelon.push_back(std::move(r));
    pivot_col.push_back(p);
    basis.push_back(v);
    return true;
  }

  // Coefficients of v over the accepted basis; empty when v is outside.
  std::optional<Vec<K>> coords_of(const Vec<K>& v) const {
    Mat<K> b(ambient, static_cast<int>(basis.size()) + 1);
    for (size_t t = 0; t < basis.size(); ++t)
      for (int i = 0; i < ambient; ++i) b(i, static_cast<int>(t)) = basis[t][i];
    for (int i = 0; i < ambient; ++i) b(i, static_cast<int>(basis.size())) = v[i];
    auto [r, pivots] = rref(std::move(b), tol);
    if (!pivots.empty() && pivots.back() == static_cast<int>(basis.size()))
      return std::nullopt;  // v added new rank: not in the span
    Vec<K> out(basis.size(), K{});
    for (size_t t = 0; t < pivots.size(); ++t) out[pivots[t]] = r(static_cast<int>(t), static_cast<int>(basis.size()));
    return out;
  }
};

}  // namespace detail

// Smallest unital star-closed subalgebra containing the generators. The
// produced basis starts with the parent unit and keeps generators (when
// independent) in the order given.
template <class K>
Subalgebra<K> generated_subalgebra(const std::vector<Element<K>>& gens,
                                   const ToleranceConfig& tol = {}) {
  if (gens.empty()) fail("ShapeMismatch", "need at least one generator");
  AlgebraPtr<K> parent = gens[0].algebra;
  for (const auto& g : gens)
    require_same_algebra(parent, g.algebra, "generators live in different algebras");

  detail::SpanBuilder<K> span(parent->dim, tol);
  span.insert(parent->unit);
  for (const auto& g : gens) span.insert(g.coords);
  for (int round = 0; round < parent->dim + 1; ++round) {
    size_t before = span.basis.size();
    std::vector<Vec<K>> snapshot = span.basis;
    for (const auto& v : snapshot) span.insert(star_coords(*parent, v));
    for (const auto& x : snapshot)
      for (const auto& y : snapshot) span.insert(mul_coords(*parent, x, y));
    if (span.basis.size() == before) break;
  }

  const int m = static_cast<int>(span.basis.size());
  StarAlgebra<K> sub;
  sub.dim = m;
  for (int t = 0; t < m; ++t) sub.labels.push_back("s" + std::to_string(t));
  sub.struct_consts.assign(static_cast<size_t>(m) * m * m, K{});
  sub.star = Mat<K>(m, m);
  for (int i = 0; i < m; ++i) {
    auto st = span.coords_of(star_coords(*parent, span.basis[i]));
    if (!st) fail("DegenerateForm", "span closure failed to contain a star");
    for (int k = 0; k < m; ++k) sub.star(k, i) = (*st)[k];
    for (int j = 0; j < m; ++j) {
      auto pr = span.coords_of(mul_coords(*parent, span.basis[i], span.basis[j]));
      if (!pr) fail("DegenerateForm", "span closure failed to contain a product");
      for (int k = 0; k < m; ++k) sub.sc(i, j, k) = (*pr)[k];
    }
  }
  auto u = span.coords_of(parent->unit);
  if (!u) fail("DegenerateForm", "span closure lost the unit");
  sub.unit = *u;
  if (parent->faithful_rep) {
    Rep<K> rep;
    rep.dim = parent->faithful_rep->dim;
    for (int t = 0; t < m; ++t) rep.mats.push_back(rep_matrix(*parent, span.basis[t]));
    sub.faithful_rep = std::move(rep);
  }

  Mat<K> incl(parent->dim, m);
  for (int t = 0; t < m; ++t)
    for (int i = 0; i < parent->dim; ++i) incl(i, t) = span.basis[t][i];
  AlgebraPtr<K> subp = detail::seal(std::move(sub));
  return {subp, {subp, parent, std::move(incl)}};
}

// ---------------------------------------------------------------------------
// Full validation of an algebra presentation (constructors produce valid
// tables by design; this is for property tests and external input).

template <class K>
void check_algebra(const AlgebraPtr<K>& ap, const ToleranceConfig& tol = {}) {
  const StarAlgebra<K>& a = *ap;
  const int d = a.dim;
  if (static_cast<int>(a.labels.size()) != d ||
      static_cast<int>(a.struct_consts.size()) != d * d * d ||
      static_cast<int>(a.unit.size()) != d || a.star.rows != d || a.star.cols != d)
    fail("ShapeMismatch", "inconsistent algebra presentation");
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) {
    double s = std::max(mat_scale(a.star), 1.0);
    for (const auto& c : a.struct_consts) s = std::max(s, mag(c));
    eps = tol.spec_tol * s * s;
  }
  auto expect = [&](const Vec<K>& x, const Vec<K>& y, const std::string& law) {
    if (!detail::near_equal_vec(x, y, eps)) fail("NotMultiplicative", law);
  };
  for (int i = 0; i < d; ++i) {
    Vec<K> ei = unit_vec<K>(d, i);
    expect(mul_coords(a, a.unit, ei), ei, "unit law fails on the left at " + a.labels[i]);
    expect(mul_coords(a, ei, a.unit), ei, "unit law fails on the right at " + a.labels[i]);
    for (int j = 0; j < d; ++j) {
      Vec<K> ej = unit_vec<K>(d, j);
      Vec<K> eij = mul_coords(a, ei, ej);
      for (int k = 0; k < d; ++k) {
        Vec<K> ek = unit_vec<K>(d, k);
        expect(mul_coords(a, eij, ek), mul_coords(a, ei, mul_coords(a, ej, ek)),
               "associativity fails at (" + a.labels[i] + ", " + a.labels[j] + ", " +
                   a.labels[k] + ")");
      }
      // (e_i e_j)* = e_j* e_i*
      Vec<K> lhs = star_coords(a, eij);
      Vec<K> rhs = mul_coords(a, star_coords(a, ej), star_coords(a, ei));
      if (!detail::near_equal_vec(lhs, rhs, eps))
        fail("NotStarPreserving", "star is not an anti-homomorphism at (" + a.labels[i] + ", " +
                                      a.labels[j] + ")");
    }
  }
  Mat<K> ss = a.star * conjugate(a.star);
  if constexpr (is_exact_v<K>) {
    if (!(ss == Mat<K>::identity(d))) fail("NotStarPreserving", "star is not involutive");
  } else {
    if (max_abs_diff(ss, Mat<K>::identity(d)) > eps)
      fail("NotStarPreserving", "star is not involutive");
  }
  if (a.faithful_rep) {
    const Rep<K>& rep = *a.faithful_rep;
    if (static_cast<int>(rep.mats.size()) != d) fail("ShapeMismatch", "one matrix per basis element");
    // a *-representation is exactly a *-homomorphism into a matrix algebra,
    // written in the matrix-unit basis
    Mat<K> stacked(rep.dim * rep.dim, d);
    for (int i = 0; i < d; ++i)
      for (int p = 0; p < rep.dim; ++p)
        for (int q = 0; q < rep.dim; ++q) stacked(p * rep.dim + q, i) = rep.mats[i](p, q);
    check_homomorphism(ap, make_matrix_algebra<K>(rep.dim), stacked, tol);
    if (!kernel_basis(stacked, tol).empty())
      fail("NoFaithfulRep", "declared representation is not injective");
  }
}

}  // namespace gnslab
