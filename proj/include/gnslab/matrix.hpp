#pragma once

#include <algorithm>
#include <initializer_list>
#include <vector>

#include "gnslab/error.hpp"
#include "gnslab/scalar.hpp"

namespace gnslab {

template <class K>
using Vec = std::vector<K>;

// Dense row-major matrix over one scalar backend.
template <class K>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<K> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, K{}) {}
  Mat(std::initializer_list<std::initializer_list<K>> entries) {
    rows = static_cast<int>(entries.size());
    cols = rows ? static_cast<int>(entries.begin()->size()) : 0;
    a.reserve(static_cast<size_t>(rows) * cols);
    for (const auto& row : entries) {
      if (static_cast<int>(row.size()) != cols)
        fail("ShapeMismatch", "ragged matrix initializer");
      for (const auto& v : row) a.push_back(v);
    }
  }

  K& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  const K& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = scalar_from_int<K>(1);
    return m;
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

template <class K>
Mat<K> operator+(const Mat<K>& x, const Mat<K>& y) {
  if (x.rows != y.rows || x.cols != y.cols) fail("ShapeMismatch", "matrix add");
  Mat<K> z(x.rows, x.cols);
  for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = x.a[i] + y.a[i];
  return z;
}

template <class K>
Mat<K> operator-(const Mat<K>& x, const Mat<K>& y) {
  if (x.rows != y.rows || x.cols != y.cols) fail("ShapeMismatch", "matrix sub");
  Mat<K> z(x.rows, x.cols);
  for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = x.a[i] - y.a[i];
  return z;
}

template <class K>
Mat<K> operator*(const Mat<K>& x, const Mat<K>& y) {
  if (x.cols != y.rows) fail("ShapeMismatch", "matrix product");
  Mat<K> z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const K& f = x(i, k);
      if (is_zero(f)) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += f * y(k, j);
    }
  return z;
}

template <class K>
Mat<K> operator*(const K& s, const Mat<K>& x) {
  Mat<K> z = x;
  for (auto& v : z.a) v = s * v;
  return z;
}

template <class K>
Vec<K> operator*(const Mat<K>& m, const Vec<K>& v) {
  if (m.cols != static_cast<int>(v.size())) fail("ShapeMismatch", "matrix-vector product");
  Vec<K> out(m.rows, K{});
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      if (is_zero(m(i, j))) continue;
      out[i] += m(i, j) * v[j];
    }
  return out;
}

template <class K>
Mat<K> transpose(const Mat<K>& x) {
  Mat<K> z(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) z(j, i) = x(i, j);
  return z;
}

template <class K>
Mat<K> conjugate(const Mat<K>& x) {
  Mat<K> z = x;
  for (auto& v : z.a) v = conj_s(v);
  return z;
}

template <class K>
Mat<K> dagger(const Mat<K>& x) {
  return conjugate(transpose(x));
}

template <class K>
Mat<K> kron(const Mat<K>& x, const Mat<K>& y) {
  Mat<K> z(x.rows * y.rows, x.cols * y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) {
      if (is_zero(x(i, j))) continue;
      for (int p = 0; p < y.rows; ++p)
        for (int q = 0; q < y.cols; ++q)
          z(i * y.rows + p, j * y.cols + q) = x(i, j) * y(p, q);
    }
  return z;
}

template <class K>
Vec<K> kron(const Vec<K>& x, const Vec<K>& y) {
  Vec<K> z(x.size() * y.size(), K{});
  for (size_t i = 0; i < x.size(); ++i) {
    if (is_zero(x[i])) continue;
    for (size_t j = 0; j < y.size(); ++j) z[i * y.size() + j] = x[i] * y[j];
  }
  return z;
}

template <class K>
Vec<K> conjugate(const Vec<K>& x) {
  Vec<K> z = x;
  for (auto& v : z) v = conj_s(v);
  return z;
}

template <class K>
Vec<K> operator+(const Vec<K>& x, const Vec<K>& y) {
  if (x.size() != y.size()) fail("ShapeMismatch", "vector add");
  Vec<K> z = x;
  for (size_t i = 0; i < z.size(); ++i) z[i] += y[i];
  return z;
}

template <class K>
Vec<K> operator-(const Vec<K>& x, const Vec<K>& y) {
  if (x.size() != y.size()) fail("ShapeMismatch", "vector sub");
  Vec<K> z = x;
  for (size_t i = 0; i < z.size(); ++i) z[i] -= y[i];
  return z;
}

template <class K>
Vec<K> operator*(const K& s, const Vec<K>& x) {
  Vec<K> z = x;
  for (auto& v : z) v = s * v;
  return z;
}

template <class K>
bool is_zero_vec(const Vec<K>& x) {
  return std::all_of(x.begin(), x.end(), [](const K& v) { return is_zero(v); });
}

template <class K>
Vec<K> unit_vec(int n, int i) {
  Vec<K> v(n, K{});
  v[i] = scalar_from_int<K>(1);
  return v;
}

template <class K>
Mat<K> mat_from_columns(const std::vector<Vec<K>>& cols, int rows) {
  Mat<K> m(rows, static_cast<int>(cols.size()));
  for (int j = 0; j < m.cols; ++j) {
    if (static_cast<int>(cols[j].size()) != rows) fail("ShapeMismatch", "column length");
    for (int i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

template <class K>
Vec<K> column_of(const Mat<K>& m, int j) {
  Vec<K> v(m.rows);
  for (int i = 0; i < m.rows; ++i) v[i] = m(i, j);
  return v;
}

// Largest entry magnitude; the scale reference for float tolerances.
template <class K>
double mat_scale(const Mat<K>& m) {
  double s = 0.0;
  for (const auto& v : m.a) s = std::max(s, mag(v));
  return s;
}

template <class K>
double vec_scale(const Vec<K>& v) {
  double s = 0.0;
  for (const auto& x : v) s = std::max(s, mag(x));
  return s;
}

// Max-entry magnitude of x - y, for residual reporting.
template <class K>
double max_abs_diff(const Mat<K>& x, const Mat<K>& y) {
  if (x.rows != y.rows || x.cols != y.cols) fail("ShapeMismatch", "matrix diff");
  double s = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i) s = std::max(s, mag(x.a[i] - y.a[i]));
  return s;
}

template <class K>
double max_abs_diff(const Vec<K>& x, const Vec<K>& y) {
  if (x.size() != y.size()) fail("ShapeMismatch", "vector diff");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s = std::max(s, mag(x[i] - y[i]));
  return s;
}

}  // namespace gnslab
