#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gnslab/markov.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// Finite probability spaces and their function-algebra states.

template <class K>
struct FiniteProbSpace {
  std::vector<std::string> points;
  Vec<K> weights;
};

namespace detail {

template <class K>
bool is_nonnegative_real(const K& x, double eps) {
  if constexpr (is_exact_v<K>) {
    return x.im == 0 && x.re >= 0;
  } else {
    return std::abs(x.imag()) <= eps && x.real() >= -eps;
  }
}

}  // namespace detail

template <class K>
FiniteProbSpace<K> prob_space(std::vector<std::string> points, Vec<K> weights,
                              const ToleranceConfig& tol = {}) {
  (void)tol;
  if (points.empty()) fail("ShapeMismatch", "a probability space needs at least one point");
  if (points.size() != weights.size()) fail("ShapeMismatch", "one weight per point");
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j]) fail("DuplicateLabel", "point label \"" + points[i] + "\"");
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) eps = 1e-12;
  K total{};
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!detail::is_nonnegative_real(weights[i], eps))
      fail("NotPositive", "weight of point \"" + points[i] + "\" is negative");
    total += weights[i];
  }
  if (!detail::near_equal_scalar(total, scalar_from_int<K>(1), eps))
    fail("NotNormalized", "weights must sum to 1");
  return {std::move(points), std::move(weights)};
}

// Product space, with point labels matching the tensor-algebra convention so
// that c_of(prob_tensor(x, y)) lives on the same presentation as the tensor
// of the factor algebras.
template <class K>
FiniteProbSpace<K> prob_tensor(const FiniteProbSpace<K>& x, const FiniteProbSpace<K>& y) {
  FiniteProbSpace<K> out;
  for (const auto& p : x.points)
    for (const auto& q : y.points) out.points.push_back("(" + p + "," + q + ")");
  out.weights = kron(x.weights, y.weights);
  return out;
}

// The expectation state on the function algebra of the space.
template <class K>
State<K> c_of(const FiniteProbSpace<K>& x, const ToleranceConfig& tol = {}) {
  return make_state(make_function_algebra<K>(x.points), x.weights, tol);
}

// ---------------------------------------------------------------------------
// The L2 module of a finite space, compared against the GNS space of the
// expectation state: the same square-integrable picture in two presentations.

template <class K>
struct L2Report {
  State<K> state;             // expectation state on C(X)
  std::vector<int> support;   // points with nonzero weight
  Mat<K> gram;                // diagonal L2 form over the support
  CyclicModule<K> module;     // multiplication action with the constant 1
  Mat<K> iso;                 // GNS(state) -> L2 cyclic isometry
  bool ok = false;
};

template <class K>
L2Report<K> l2_compare(const FiniteProbSpace<K>& x, const ToleranceConfig& tol = {}) {
  L2Report<K> rep;
  rep.state = c_of(x, tol);
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) eps = tol.rank_tol * std::max(1.0, vec_scale(x.weights));
  const int n = static_cast<int>(x.points.size());
  for (int i = 0; i < n; ++i) {
    bool nonzero;
    if constexpr (is_exact_v<K>)
      nonzero = !is_zero(x.weights[i]);
    else
      nonzero = mag(x.weights[i]) > eps;
    if (nonzero) rep.support.push_back(i);
  }
  const int m = static_cast<int>(rep.support.size());
  rep.gram = Mat<K>(m, m);
  for (int a = 0; a < m; ++a) rep.gram(a, a) = x.weights[rep.support[a]];
  CyclicModule<K> l2;
  l2.dim = m;
  l2.gram = rep.gram;
  l2.omega.assign(m, scalar_from_int<K>(1));
  for (int i = 0; i < n; ++i) {
    Mat<K> act(m, m);
    for (int a = 0; a < m; ++a)
      if (rep.support[a] == i) act(a, a) = scalar_from_int<K>(1);
    l2.actions.push_back(std::move(act));
  }
  rep.module = l2;
  GnsSpace<K> g = gns(rep.state, tol);
  rep.iso = cyclic_isomorphism(g, l2, tol);
  rep.ok = (g.dim() == m);
  return rep;
}

// ---------------------------------------------------------------------------
// Markov kernels between finite point sets.

template <class K>
struct MarkovKernel {
  std::vector<std::string> dom;  // row labels
  std::vector<std::string> cod;  // column labels
  Mat<K> matrix;                 // row-stochastic: matrix(x, y) = P(x -> y)
};

template <class K>
MarkovKernel<K> markov_kernel(std::vector<std::string> dom, std::vector<std::string> cod,
                              Mat<K> matrix, const ToleranceConfig& tol = {}) {
  (void)tol;
  if (dom.empty() || cod.empty()) fail("ShapeMismatch", "a kernel needs nonempty point sets");
  if (matrix.rows != static_cast<int>(dom.size()) || matrix.cols != static_cast<int>(cod.size()))
    fail("ShapeMismatch", "kernel matrix must be |dom| x |cod|");
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) eps = 1e-12 * std::max(1.0, mat_scale(matrix));
  for (int r = 0; r < matrix.rows; ++r) {
    K sum{};
    for (int c = 0; c < matrix.cols; ++c) {
      if (!detail::is_nonnegative_real(matrix(r, c), eps))
        fail("NotPositiveMap", "kernel entry (" + dom[r] + " -> " + cod[c] + ") is negative");
      sum += matrix(r, c);
    }
    if (!detail::near_equal_scalar(sum, scalar_from_int<K>(1), eps))
      fail("NotNormalized", "the row of \"" + dom[r] + "\" must sum to 1");
  }
  return {std::move(dom), std::move(cod), std::move(matrix)};
}

template <class K>
MarkovKernel<K> identity_kernel(const std::vector<std::string>& points) {
  return {points, points, Mat<K>::identity(static_cast<int>(points.size()))};
}

// The kernel of a point map dom -> cod, given by images as indices into cod.
template <class K>
MarkovKernel<K> deterministic_kernel(const std::vector<std::string>& dom,
                                     const std::vector<std::string>& cod,
                                     const std::vector<int>& images) {
  if (images.size() != dom.size()) fail("ShapeMismatch", "one image per domain point");
  Mat<K> m(static_cast<int>(dom.size()), static_cast<int>(cod.size()));
  for (size_t i = 0; i < images.size(); ++i) {
    if (images[i] < 0 || images[i] >= static_cast<int>(cod.size()))
      fail("ShapeMismatch", "image point out of range");
    m(static_cast<int>(i), images[i]) = scalar_from_int<K>(1);
  }
  return {dom, cod, std::move(m)};
}

// Kleisli composite: first f, then g.
template <class K>
MarkovKernel<K> kleisli_compose(const MarkovKernel<K>& f, const MarkovKernel<K>& g) {
  if (f.cod != g.dom) fail("ShapeMismatch", "kernels do not chain: cod(f) != dom(g)");
  return {f.dom, g.cod, f.matrix * g.matrix};
}

template <class K>
MarkovKernel<K> kernel_tensor(const MarkovKernel<K>& f, const MarkovKernel<K>& g) {
  MarkovKernel<K> out;
  for (const auto& p : f.dom)
    for (const auto& q : g.dom) out.dom.push_back("(" + p + "," + q + ")");
  for (const auto& p : f.cod)
    for (const auto& q : g.cod) out.cod.push_back("(" + p + "," + q + ")");
  out.matrix = kron(f.matrix, g.matrix);
  return out;
}

// ---------------------------------------------------------------------------
// Duality between kernels and positive unital maps of function algebras. The
// dual of a kernel X -> Y pulls functions back by averaging rows, which on
// indicator coordinates is the kernel matrix itself: C(Y) -> C(X).

namespace detail {

template <class K>
bool is_function_algebra(const StarAlgebra<K>& a) {
  K one = scalar_from_int<K>(1);
  for (int i = 0; i < a.dim; ++i) {
    if (!(a.unit[i] == one)) return false;
    for (int j = 0; j < a.dim; ++j) {
      if (!(a.star(i, j) == (i == j ? one : K{}))) return false;
      for (int k = 0; k < a.dim; ++k)
        if (!(a.sc(i, j, k) == ((i == j && j == k) ? one : K{}))) return false;
    }
  }
  return true;
}

}  // namespace detail

template <class K>
CpMap<K> kernel_to_cp(const MarkovKernel<K>& f, const ToleranceConfig& tol = {}) {
  AlgebraPtr<K> cx = make_function_algebra<K>(f.dom);
  AlgebraPtr<K> cy = make_function_algebra<K>(f.cod);
  StarLinearMap<K> lin = check_star_linear(cy, cx, f.matrix, tol);
  CpCertificate<K> cert = is_completely_positive(lin, tol);
  if (!cert.cp || !cert.map)
    fail("BackendError", "a stochastic kernel must dualize to a completely positive map");
  return *cert.map;
}

template <class K>
MarkovKernel<K> cp_to_kernel(const StarLinearMap<K>& m, const ToleranceConfig& tol = {}) {
  if (!detail::is_function_algebra(*m.dom) || !detail::is_function_algebra(*m.cod))
    fail("AlgebraMismatch", "duality needs function algebras on both sides");
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) eps = tol.spec_tol * std::max(1.0, mat_scale(m.matrix));
  for (int x = 0; x < m.matrix.rows; ++x)
    for (int y = 0; y < m.matrix.cols; ++y)
      if (!detail::is_nonnegative_real(m.matrix(x, y), eps))
        fail("NotPositiveMap", "negative coefficient at (" + m.cod->labels[x] + ", " +
                                   m.dom->labels[y] + ")");
  for (int x = 0; x < m.matrix.rows; ++x) {
    K sum{};
    for (int y = 0; y < m.matrix.cols; ++y) sum += m.matrix(x, y);
    if (!detail::near_equal_scalar(sum, scalar_from_int<K>(1), eps))
      fail("NotUnital", "the map does not send 1 to 1 (row " + m.cod->labels[x] + ")");
  }
  return {m.cod->labels, m.dom->labels, m.matrix};
}

template <class K>
MarkovKernel<K> cp_to_kernel(const CpMap<K>& m, const ToleranceConfig& tol = {}) {
  return cp_to_kernel(m.underlying, tol);
}

// ---------------------------------------------------------------------------
// The square-integrable picture of a kernel: transporting the GNS space of
// the expectation state along the dual map agrees with row-averaging between
// the L2 spaces, restricted to the supports of the two measures.

template <class K>
struct PrismReport {
  MarkovMorphism<K> morphism;  // (C(X), E_mu) -> (C(Y), E_{mu f})
  Mat<K> gns_matrix;           // transport of the dual map
  Mat<K> cl2_matrix;           // kernel rows restricted to both supports
  bool match = false;
};

template <class K>
PrismReport<K> prism_compare(const MarkovKernel<K>& f, const FiniteProbSpace<K>& mu,
                             const ToleranceConfig& tol = {}) {
  if (mu.points != f.dom) fail("ShapeMismatch", "the measure must live on the kernel domain");
  State<K> phi = c_of(mu, tol);
  CpMap<K> dual = kernel_to_cp(f, tol);
  PrismReport<K> rep;
  rep.morphism = markov_morphism(dual.underlying, phi, tol);
  rep.gns_matrix = gns_m(rep.morphism, tol);
  const std::vector<int>& sx = rep.morphism.dom_gns->form.pivots;
  const std::vector<int>& sy = rep.morphism.cod_gns->form.pivots;
  Mat<K> cl2(static_cast<int>(sx.size()), static_cast<int>(sy.size()));
  for (size_t i = 0; i < sx.size(); ++i)
    for (size_t j = 0; j < sy.size(); ++j)
      cl2(static_cast<int>(i), static_cast<int>(j)) = f.matrix(sx[i], sy[j]);
  rep.cl2_matrix = cl2;
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) eps = tol.spec_tol * std::max(1.0, mat_scale(f.matrix));
  rep.match = detail::near_equal_mat(rep.gns_matrix, rep.cl2_matrix, eps);
  return rep;
}

// ---------------------------------------------------------------------------
// The spectral distribution of a normal observable in a positive state: the
// spectrum of the observable with the state's weight on each spectral
// projection, every projection re-expressed inside the generated subalgebra.

template <class K>
struct SpectralPoint {
  K eigenvalue;
  double weight;
};

template <class K>
struct SpectralDistribution {
  std::vector<SpectralPoint<K>> entries;  // sorted by eigenvalue (re, then im)
  double total = 0.0;                     // sum of weights = Re phi(1)
};

template <class K>
SpectralDistribution<K> born_distribution(const Element<K>& a, const State<K>& phi,
                                          const ToleranceConfig& tol = {}) {
  require_same_algebra(a.algebra, phi.algebra, "observable and state live on different algebras");
  if constexpr (is_exact_v<K>) {
    fail("BackendError", "spectral clustering needs the float backend");
  } else {
    if (!a.algebra->faithful_rep) fail("NoFaithfulRep", "spectra need a faithful representation");
    if (!is_normal(a, tol)) fail("NotNormal", "the spectral distribution needs a normal observable");
    if (!is_positive(phi, tol).psd)
      fail("NotPositive", "the spectral distribution needs a positive state");

    Subalgebra<K> sub = generated_subalgebra<K>({a}, tol);
    Mat<K> ra = rep_matrix(*a.algebra, a.coords);
    std::vector<SpectralCluster> clusters = spectral_clusters(ra, tol);

    // Basis of <a> in the ambient representation, vectorized column by column.
    const int m = sub.algebra->dim;
    const int rd = a.algebra->faithful_rep->dim;
    Mat<K> cols(rd * rd, m);
    for (int t = 0; t < m; ++t) {
      Mat<K> bt = rep_matrix(*a.algebra, column_of(sub.inclusion.matrix, t));
      for (int r = 0; r < rd; ++r)
        for (int c = 0; c < rd; ++c) cols(r * rd + c, t) = bt(r, c);
    }
    Mat<K> normal_gram = dagger(cols) * cols;

    SpectralDistribution<K> out;
    for (const auto& cl : clusters) {
      Vec<K> target(rd * rd, K{});
      for (int r = 0; r < rd; ++r)
        for (int c = 0; c < rd; ++c) target[r * rd + c] = cl.projection(r, c);
      auto coeff = solve(normal_gram, dagger(cols) * target, tol);
      if (!coeff) fail("ProjectionNotInSubalgebra", "normal equations are singular");
      Vec<K> rebuilt = cols * *coeff;
      double resid = 0.0;
      for (int i = 0; i < rd * rd; ++i) resid = std::max(resid, mag(rebuilt[i] - target[i]));
      if (resid > 1e-8 * std::max(1.0, mat_scale(cl.projection)))
        fail("ProjectionNotInSubalgebra",
             "a spectral projection escapes the generated subalgebra (residual " +
                 std::to_string(resid) + ")");
      K w = evaluate(phi, sub.inclusion.matrix * *coeff);
      double wr = w.real();
      if (wr < 0.0 && wr >= -tol.psd_tol) wr = 0.0;
      if (wr < 0.0) fail("NotPositive", "negative weight at an eigenvalue");
      out.entries.push_back({cl.eigenvalue, wr});
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const SpectralPoint<K>& l, const SpectralPoint<K>& r) {
                if (l.eigenvalue.real() != r.eigenvalue.real())
                  return l.eigenvalue.real() < r.eigenvalue.real();
                return l.eigenvalue.imag() < r.eigenvalue.imag();
              });
    for (const auto& e : out.entries) out.total += e.weight;
    return out;
  }
}

// Weight the distribution assigns near a queried eigenvalue; queries farther
// than spec_tol from every cluster collect nothing.
template <class K>
double weight_at(const SpectralDistribution<K>& d, const K& q, const ToleranceConfig& tol = {}) {
  double out = 0.0;
  for (const auto& e : d.entries) {
    if constexpr (is_exact_v<K>) {
      if (e.eigenvalue == q) out += e.weight;
    } else {
      if (mag(e.eigenvalue - q) <= tol.spec_tol) out += e.weight;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// The eigenvalue link: for a normal observable in a positive state, being an
// eigenvector of the cyclic class, vanishing variance at the eigenvalue, and
// full spectral weight at the eigenvalue are all the same condition.

struct EeLinkReport {
  bool eigenvector = false;        // action(a) omega = lambda omega
  bool almost_everywhere = false;  // phi((a - lambda)^* (a - lambda)) = 0
  bool full_weight = false;        // spectral weight at lambda = phi(1)
  bool agree = false;
};

template <class K>
EeLinkReport ee_link_check(const Element<K>& a, const State<K>& phi, const K& lambda,
                           const ToleranceConfig& tol = {}) {
  if constexpr (is_exact_v<K>) {
    fail("BackendError", "the eigenvalue link check needs the float backend");
  } else {
    SpectralDistribution<K> dist = born_distribution(a, phi, tol);
    GnsSpace<K> g = gns(phi, tol);
    EeLinkReport rep;

    Vec<K> drift = g.action_of(a.coords) * g.omega - lambda * g.omega;
    double s1 = tol.spec_tol * std::max(1.0, vec_scale(g.omega)) *
                std::max(1.0, vec_scale(a.coords) + mag(lambda));
    rep.eigenvector = detail::near_zero_vec(drift, s1);

    Vec<K> shift = a.coords - lambda * a.algebra->unit;
    K variance =
        evaluate(phi, mul_coords(*a.algebra, star_coords(*a.algebra, shift), shift));
    double s2 = tol.spec_tol * std::max(1.0, vec_scale(shift) * vec_scale(shift)) *
                std::max(1.0, vec_scale(phi.functional));
    rep.almost_everywhere = mag(variance) <= s2;

    double p1 = phi.normalization.real();
    rep.full_weight = std::abs(weight_at(dist, lambda, tol) - p1) <= 1e-9 * std::max(1.0, std::abs(p1));

    rep.agree = (rep.eigenvector == rep.almost_everywhere) &&
                (rep.almost_everywhere == rep.full_weight);
    return rep;
  }
}

// ---------------------------------------------------------------------------
// Definite values: the observable has value lambda in phi exactly when the
// restriction of phi to the generated subalgebra is a character (scaled by
// phi(1)). When the inclusion is admissible this forces the cyclic class to
// be an eigenvector, and that direction is verified on the spot.

template <class K>
struct DefiniteValue {
  K lambda;
  State<K> character;        // restriction of phi to <a>
  Subalgebra<K> subalgebra;  // <a> with its inclusion
  bool eigenvector_checked = false;
  bool eigenvector_ok = false;
};

template <class K>
std::optional<DefiniteValue<K>> has_definite_value(const Element<K>& a, const State<K>& phi,
                                                   const ToleranceConfig& tol = {}) {
  require_same_algebra(a.algebra, phi.algebra, "observable and state live on different algebras");
  if (!is_normal(a, tol)) fail("NotNormal", "definite values need a normal observable");
  bool isotropic;
  if constexpr (is_exact_v<K>)
    isotropic = is_zero(phi.normalization);
  else
    isotropic = mag(phi.normalization) <= tol.rank_tol * std::max(1.0, vec_scale(phi.functional));
  if (isotropic) return std::nullopt;

  Subalgebra<K> sub = generated_subalgebra<K>({a}, tol);
  State<K> restricted = pullback_state(sub.inclusion, phi);
  const int m = sub.algebra->dim;
  K p1 = restricted.normalization;
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) {
    double s = std::max(1.0, vec_scale(restricted.functional));
    eps = tol.spec_tol * s * s;
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      K pij = evaluate(restricted, mul_coords(*sub.algebra, unit_vec<K>(m, i), unit_vec<K>(m, j)));
      if (!detail::near_equal_scalar(pij * p1, restricted.functional[i] * restricted.functional[j],
                                     eps))
        return std::nullopt;
    }

  DefiniteValue<K> out;
  out.lambda = evaluate(phi, a.coords) / p1;
  out.character = restricted;
  out.subalgebra = sub;
  PhysMorphism<K> inc = phys_morphism(sub.inclusion, phi, tol);
  if (inc.admissible()) {
    out.eigenvector_checked = true;
    const GnsSpace<K>& g = *inc.dom_gns;
    Vec<K> drift = g.action_of(a.coords) * g.omega - out.lambda * g.omega;
    double s = 0.0;
    if constexpr (!is_exact_v<K>)
      s = tol.spec_tol * std::max(1.0, vec_scale(g.omega)) *
          std::max(1.0, vec_scale(a.coords) + mag(out.lambda));
    out.eigenvector_ok = detail::near_zero_vec(drift, s);
  }
  return out;
}

}  // namespace gnslab
