#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gnslab/matrix.hpp"
#include "gnslab/scalar.hpp"
#include "gnslab/star_algebra.hpp"
#include "gnslab/state.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// Deterministic randomness for the property suites. Every draw routes through
// the raw mt19937_64 word stream, whose output sequence is pinned by the
// standard, so a seed reproduces the same objects on every platform.

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [lo, hi], both ends included. The slight modulo bias is
  // irrelevant at test sample sizes and keeps the stream portable.
  int range(int lo, int hi) {
    if (hi <= lo) return lo;
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(eng_() % span);
  }

  bool coin() { return range(0, 1) == 1; }

  std::uint64_t word() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Scalar and vector draws. Everything is a small rational (or its floating
// image), so exact backends stay exact and floating backends stay well away
// from tolerance thresholds.

template <class K>
K random_rational(RandomSource& r, int num_lo = -3, int num_hi = 3, int den_hi = 3) {
  K num = scalar_from_int<K>(r.range(num_lo, num_hi));
  K den = scalar_from_int<K>(r.range(1, den_hi));
  return num / den;
}

template <class K>
K random_scalar(RandomSource& r, bool complex_ok = true) {
  K out = random_rational<K>(r);
  if (complex_ok && r.coin()) out += scalar_i<K>() * random_rational<K>(r);
  return out;
}

// A fourth root of unity.
template <class K>
K random_unit(RandomSource& r) {
  switch (r.range(0, 3)) {
    case 0: return scalar_from_int<K>(1);
    case 1: return scalar_from_int<K>(-1);
    case 2: return scalar_i<K>();
    default: return -scalar_i<K>();
  }
}

template <class K>
Vec<K> random_vector(RandomSource& r, int n, bool complex_ok = true) {
  Vec<K> v(n, K{});
  bool nonzero = false;
  for (int i = 0; i < n; ++i) {
    v[i] = random_scalar<K>(r, complex_ok);
    nonzero = nonzero || !is_zero(v[i]);
  }
  if (!nonzero && n > 0) v[r.range(0, n - 1)] = scalar_from_int<K>(1);
  return v;
}

template <class K>
Mat<K> random_matrix(RandomSource& r, int rows, int cols, bool complex_ok = true) {
  Mat<K> m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = random_scalar<K>(r, complex_ok);
  return m;
}

inline std::vector<int> random_permutation(RandomSource& r, int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[r.range(0, i)]);
  return p;
}

// e_j |-> e_image[j], as a matrix.
template <class K>
Mat<K> permutation_matrix(const std::vector<int>& image) {
  const int n = static_cast<int>(image.size());
  Mat<K> m(n, n);
  for (int j = 0; j < n; ++j) m(image[j], j) = scalar_from_int<K>(1);
  return m;
}

// ---------------------------------------------------------------------------
// Exact unitaries: a random permutation, a few Givens layers with Pythagorean
// sines and cosines (twisted by fourth roots of unity), and a unit diagonal.
// All entries stay rational-complex, so the same construction serves both
// backends.

inline const std::array<std::array<int, 3>, 6>& pythagorean_triples() {
  static const std::array<std::array<int, 3>, 6> t = {{{3, 4, 5},
                                                       {5, 12, 13},
                                                       {8, 15, 17},
                                                       {7, 24, 25},
                                                       {20, 21, 29},
                                                       {9, 40, 41}}};
  return t;
}

template <class K>
Mat<K> random_unitary(RandomSource& r, int n) {
  Mat<K> u = permutation_matrix<K>(random_permutation(r, n));
  for (int layer = 0; layer < n && n >= 2; ++layer) {
    int i = r.range(0, n - 2);
    int j = r.range(i + 1, n - 1);
    const auto& t = pythagorean_triples()[r.range(0, 5)];
    K c = scalar_from_int<K>(t[0]) / scalar_from_int<K>(t[2]);
    K s = scalar_from_int<K>(t[1]) / scalar_from_int<K>(t[2]);
    K w = random_unit<K>(r);
    Mat<K> g = Mat<K>::identity(n);
    g(i, i) = c;
    g(i, j) = -conj_s(w) * s;
    g(j, i) = w * s;
    g(j, j) = c;
    u = g * u;
  }
  Mat<K> d(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = random_unit<K>(r);
  return d * u;
}

// Rank-k projection u diag(1..1,0..0) u* in representation space.
template <class K>
Mat<K> random_projection_matrix(RandomSource& r, int n, int rank) {
  Mat<K> u = random_unitary<K>(r, n);
  Mat<K> d(n, n);
  for (int i = 0; i < rank && i < n; ++i) d(i, i) = scalar_from_int<K>(1);
  return u * (d * dagger(u));
}

// ---------------------------------------------------------------------------
// Algebra samples. Each sample keeps enough of its construction to build
// structure-aware homomorphisms into it later.

template <class K>
struct AlgebraSample {
  enum Kind { kMatrix, kFunction, kGroup, kTensor };
  AlgebraPtr<K> algebra;
  Kind kind = kMatrix;
  int n = 0;  // matrix size, point count, or group order
  std::vector<std::vector<int>> table;
  std::shared_ptr<AlgebraSample<K>> left, right;  // tensor factors
};

inline std::vector<std::vector<int>> cyclic_table(int n) {
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t[i][j] = (i + j) % n;
  return t;
}

inline std::vector<std::vector<int>> klein_table() {
  return {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
}

inline std::vector<std::vector<int>> s3_table() {
  return {{0, 1, 2, 3, 4, 5}, {1, 0, 4, 5, 2, 3}, {2, 3, 0, 1, 5, 4},
          {3, 2, 5, 4, 0, 1}, {4, 5, 1, 0, 3, 2}, {5, 4, 3, 2, 1, 0}};
}

inline std::vector<std::string> point_labels(const std::string& stem, int n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

// A base (non-tensor) algebra. Matrix sizes reach 3, point sets 5, group
// orders 6; `small` caps everything so tensor factors stay modest.
template <class K>
AlgebraSample<K> random_base_algebra(RandomSource& r, bool small = false) {
  AlgebraSample<K> s;
  switch (r.range(0, 2)) {
    case 0: {
      s.kind = AlgebraSample<K>::kMatrix;
      s.n = r.range(1, small ? 2 : 3);
      s.algebra = make_matrix_algebra<K>(s.n);
      return s;
    }
    case 1: {
      s.kind = AlgebraSample<K>::kFunction;
      s.n = r.range(1, small ? 3 : 5);
      s.algebra = make_function_algebra<K>(point_labels("x", s.n));
      return s;
    }
    default: {
      s.kind = AlgebraSample<K>::kGroup;
      int pick = r.range(0, small ? 3 : 5);
      switch (pick) {
        case 0: s.table = cyclic_table(2); break;
        case 1: s.table = cyclic_table(3); break;
        case 2: s.table = cyclic_table(4); break;
        case 3: s.table = klein_table(); break;
        case 4: s.table = s3_table(); break;
        default: s.table = cyclic_table(6); break;
      }
      s.n = static_cast<int>(s.table.size());
      s.algebra = make_group_algebra<K>(s.table);
      return s;
    }
  }
}

template <class K>
AlgebraSample<K> random_algebra(RandomSource& r, bool allow_tensor = true) {
  if (!allow_tensor || r.range(0, 3) != 0) return random_base_algebra<K>(r);
  AlgebraSample<K> s;
  s.kind = AlgebraSample<K>::kTensor;
  s.left = std::make_shared<AlgebraSample<K>>(random_base_algebra<K>(r, true));
  s.right = std::make_shared<AlgebraSample<K>>(random_base_algebra<K>(r, true));
  s.algebra = tensor_algebra(s.left->algebra, s.right->algebra);
  s.n = s.algebra->dim;
  return s;
}

// ---------------------------------------------------------------------------
// Positive states: small mixtures of vectorial states through the faithful
// representation, so positivity is automatic on every backend.

template <class K>
State<K> random_positive_state(RandomSource& r, const AlgebraPtr<K>& a, int terms = 2) {
  const int rd = a->faithful_rep->dim;
  Vec<K> functional(a->dim, K{});
  int k = r.range(1, terms);
  for (int t = 0; t < k; ++t) {
    Vec<K> v = random_vector<K>(r, rd);
    K c = scalar_from_int<K>(r.range(1, 3));
    State<K> part = vectorial_state(a, v);
    for (int i = 0; i < a->dim; ++i) functional[i] += c * part.functional[i];
  }
  return make_state(a, std::move(functional));
}

// ---------------------------------------------------------------------------
// Homomorphisms into a sampled algebra. Every branch is validated before it
// is returned, so a generator bug cannot masquerade as a library bug.

template <class K>
struct HomSample {
  StarHomomorphism<K> hom;  // dom -> sample.algebra
  AlgebraSample<K> dom;
};

template <class K>
HomSample<K> random_hom_into(RandomSource& r, const AlgebraSample<K>& target) {
  using Sample = AlgebraSample<K>;
  const AlgebraPtr<K>& a = target.algebra;
  auto checked = [&](Mat<K> m, Sample ds) {
    StarHomomorphism<K> h = check_homomorphism(ds.algebra, a, std::move(m));
    return HomSample<K>{std::move(h), std::move(ds)};
  };

  int roll = r.range(0, 5);
  if (roll == 0) {  // unit inclusion from the scalars
    Mat<K> m(a->dim, 1);
    for (int i = 0; i < a->dim; ++i) m(i, 0) = a->unit[i];
    Sample ds;
    ds.kind = Sample::kMatrix;
    ds.n = 1;
    ds.algebra = make_matrix_algebra<K>(1);
    return checked(std::move(m), std::move(ds));
  }
  if (roll == 1) return checked(Mat<K>::identity(a->dim), target);

  switch (target.kind) {
    case Sample::kMatrix: {
      if (roll == 2 && target.n > 1) {  // functions on the diagonal
        Mat<K> m(a->dim, target.n);
        for (int i = 0; i < target.n; ++i) m(i * target.n + i, i) = scalar_from_int<K>(1);
        Sample ds;
        ds.kind = Sample::kFunction;
        ds.n = target.n;
        ds.algebra = make_function_algebra<K>(point_labels("d", target.n));
        return checked(std::move(m), std::move(ds));
      }
      Mat<K> u = random_unitary<K>(r, target.n);
      return checked(kron(u, conjugate(u)), target);  // a |-> u a u*
    }
    case Sample::kFunction: {  // pull back along a random point map
      int m = r.range(1, 5);
      Sample ds;
      ds.kind = Sample::kFunction;
      ds.n = m;
      ds.algebra = make_function_algebra<K>(point_labels("y", m));
      Mat<K> h(a->dim, m);
      for (int x = 0; x < a->dim; ++x) h(x, r.range(0, m - 1)) = scalar_from_int<K>(1);
      return checked(std::move(h), std::move(ds));
    }
    case Sample::kGroup: {  // conjugation by a group element
      const auto& t = target.table;
      int g = r.range(0, target.n - 1);
      int ginv = 0;
      for (int h = 0; h < target.n; ++h)
        if (t[g][h] == 0) ginv = h;
      std::vector<int> image(target.n);
      for (int h = 0; h < target.n; ++h) image[h] = t[t[g][h]][ginv];
      return checked(permutation_matrix<K>(image), target);
    }
    default: {  // tensor target
      if (roll == 2) {  // left factor, b |-> b (x) 1
        Mat<K> m(a->dim, target.left->algebra->dim);
        for (int i = 0; i < target.left->algebra->dim; ++i) {
          Vec<K> col = kron(unit_vec<K>(target.left->algebra->dim, i),
                            target.right->algebra->unit);
          for (int s = 0; s < a->dim; ++s) m(s, i) = col[s];
        }
        return checked(std::move(m), *target.left);
      }
      if (roll == 3) {  // right factor, b |-> 1 (x) b
        Mat<K> m(a->dim, target.right->algebra->dim);
        for (int j = 0; j < target.right->algebra->dim; ++j) {
          Vec<K> col = kron(target.left->algebra->unit,
                            unit_vec<K>(target.right->algebra->dim, j));
          for (int s = 0; s < a->dim; ++s) m(s, j) = col[s];
        }
        return checked(std::move(m), *target.right);
      }
      HomSample<K> f = random_hom_into(r, *target.left);
      HomSample<K> g = random_hom_into(r, *target.right);
      Sample ds;
      ds.kind = Sample::kTensor;
      ds.left = std::make_shared<Sample>(std::move(f.dom));
      ds.right = std::make_shared<Sample>(std::move(g.dom));
      ds.algebra = tensor_algebra(ds.left->algebra, ds.right->algebra);
      ds.n = ds.algebra->dim;
      StarHomomorphism<K> th = tensor_hom(f.hom, g.hom);
      Mat<K> m = th.matrix;
      return checked(std::move(m), std::move(ds));
    }
  }
}

// ---------------------------------------------------------------------------
// Stochastic matrices with rational rows, for the duality and prism suites.

template <class K>
Mat<K> random_stochastic_matrix(RandomSource& r, int rows, int cols) {
  Mat<K> m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    std::vector<int> w(cols, 0);
    int sum = 0;
    for (int j = 0; j < cols; ++j) {
      w[j] = r.range(0, 4);
      sum += w[j];
    }
    if (sum == 0) {
      w[r.range(0, cols - 1)] = 1;
      sum = 1;
    }
    for (int j = 0; j < cols; ++j)
      m(i, j) = scalar_from_int<K>(w[j]) / scalar_from_int<K>(sum);
  }
  return m;
}

// Nonnegative rational weights summing to 1; zeros allowed to exercise
// support restrictions.
template <class K>
Vec<K> random_distribution(RandomSource& r, int n) {
  std::vector<int> w(n, 0);
  int sum = 0;
  for (int i = 0; i < n; ++i) {
    w[i] = r.range(0, 4);
    sum += w[i];
  }
  if (sum == 0) {
    w[r.range(0, n - 1)] = 1;
    sum = 1;
  }
  Vec<K> out(n, K{});
  for (int i = 0; i < n; ++i) out[i] = scalar_from_int<K>(w[i]) / scalar_from_int<K>(sum);
  return out;
}

// Kraus family of a completely positive map M_d -> M_c, as the matrix of the
// map on matrix-unit coordinates: column (p*d+q) holds sum_k V_k E_pq V_k*.
template <class K>
Mat<K> random_kraus_cp_matrix(RandomSource& r, int d, int c, int kraus) {
  std::vector<Mat<K>> v;
  v.reserve(kraus);
  for (int k = 0; k < kraus; ++k) v.push_back(random_matrix<K>(r, c, d));
  Mat<K> m(c * c, d * d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      for (int x = 0; x < c; ++x)
        for (int y = 0; y < c; ++y) {
          K out{};
          for (int k = 0; k < kraus; ++k) out += v[k](x, p) * conj_s(v[k](y, q));
          m(x * c + y, p * d + q) = out;
        }
  return m;
}

}  // namespace gnslab
