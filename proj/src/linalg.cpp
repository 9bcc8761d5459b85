#include "gnslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace gnslab {

namespace {

// Groups sorted real values into runs separated by more than radius.
std::vector<std::pair<int, int>> runs_of(const Eigen::VectorXd& values, double radius) {
  std::vector<std::pair<int, int>> out;
  int n = static_cast<int>(values.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || values(i) - values(i - 1) > radius) {
      out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

}  // namespace

std::vector<SpectralCluster> spectral_clusters(const Mat<FloatScalar>& n,
                                               const ToleranceConfig& tol) {
  if (n.rows != n.cols) fail("ShapeMismatch", "spectral_clusters needs a square matrix");
  Eigen::MatrixXcd m = to_eigen(n);
  const int d = n.rows;
  double scale = std::max(m.norm(), 1.0);
  if ((m * m.adjoint() - m.adjoint() * m).norm() > tol.spec_tol * scale * scale * 10)
    fail("NotNormal", "matrix does not commute with its adjoint");

  // Joint decomposition: eigenspaces of the Hermitian part, refined inside
  // each eigenspace by the anti-Hermitian part.
  Eigen::MatrixXcd h = (m + m.adjoint()) / 2.0;
  Eigen::MatrixXcd s = (m - m.adjoint()) / FloatScalar(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h);
  double radius = tol.spec_tol * scale;

  struct RawCluster {
    FloatScalar value;
    Eigen::MatrixXcd basis;  // orthonormal columns
  };
  std::vector<RawCluster> raw;
  for (auto [b, e] : runs_of(hs.eigenvalues(), radius)) {
    double re = hs.eigenvalues().segment(b, e - b).mean();
    Eigen::MatrixXcd basis = hs.eigenvectors().middleCols(b, e - b);
    Eigen::MatrixXcd compressed = basis.adjoint() * s * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ss(compressed);
    for (auto [b2, e2] : runs_of(ss.eigenvalues(), radius)) {
      double im = ss.eigenvalues().segment(b2, e2 - b2).mean();
      raw.push_back({FloatScalar(re, im), basis * ss.eigenvectors().middleCols(b2, e2 - b2)});
    }
  }

  // Union-find merge of raw clusters whose eigenvalues landed within the
  // clustering radius of each other (possible across Hermitian-part runs).
  std::vector<int> parent(raw.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (size_t i = 0; i < raw.size(); ++i)
    for (size_t j = i + 1; j < raw.size(); ++j)
      if (std::abs(raw[i].value - raw[j].value) <= radius) parent[find(i)] = find(j);

  std::vector<SpectralCluster> out;
  std::vector<bool> used(raw.size(), false);
  for (size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    int root = find(static_cast<int>(i));
    FloatScalar value{};
    int total = 0;
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(d, d);
    for (size_t j = 0; j < raw.size(); ++j) {
      if (find(static_cast<int>(j)) != root) continue;
      used[j] = true;
      int w = static_cast<int>(raw[j].basis.cols());
      value += raw[j].value * static_cast<double>(w);
      total += w;
      proj += raw[j].basis * raw[j].basis.adjoint();
    }
    out.push_back({value / static_cast<double>(total), from_eigen(proj)});
  }
  std::sort(out.begin(), out.end(), [](const SpectralCluster& a, const SpectralCluster& b) {
    if (a.eigenvalue.real() != b.eigenvalue.real())
      return a.eigenvalue.real() < b.eigenvalue.real();
    return a.eigenvalue.imag() < b.eigenvalue.imag();
  });
  return out;
}

}  // namespace gnslab
