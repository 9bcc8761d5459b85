#include "gnslab/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gnslab/error.hpp"
#include "gnslab/gns.hpp"
#include "gnslab/linalg.hpp"
#include "gnslab/markov.hpp"
#include "gnslab/matrix.hpp"
#include "gnslab/phys.hpp"
#include "gnslab/prob.hpp"
#include "gnslab/random_gen.hpp"
#include "gnslab/scalar.hpp"
#include "gnslab/star_algebra.hpp"
#include "gnslab/state.hpp"
#include "gnslab/symmetry.hpp"

namespace gnslab {
namespace {

using E = ExactScalar;
using F = FloatScalar;

std::uint64_t mix_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  return seed ^ h;
}

// Shared bookkeeping: remembers the first failing probe and keeps counting.
struct Ctx {
  RandomSource rng;
  SuiteResult res;

  Ctx(const std::string& name, std::uint64_t seed) : rng(mix_seed(seed, name)) {
    res.name = name;
  }

  void expect(bool ok, const std::string& what, int probe) {
    if (!ok && res.detail.empty())
      res.detail = what + " (probe " + std::to_string(probe) + ")";
  }

  bool failed() const { return !res.detail.empty(); }

  SuiteResult finish() {
    res.pass = res.detail.empty();
    return res;
  }
};

template <class K>
Vec<K> row_major(const Mat<K>& m) {
  Vec<K> out;
  out.reserve(static_cast<size_t>(m.rows) * m.cols);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) out.push_back(m(r, c));
  return out;
}

// <m x, m y>_dom == <x, y>_cod on every pair of basis columns.
template <class K>
bool gram_isometric(const Mat<K>& m, const Mat<K>& dom_gram, const Mat<K>& cod_gram,
                    double eps) {
  for (int x = 0; x < m.cols; ++x)
    for (int y = 0; y < m.cols; ++y) {
      K got = form_pair(dom_gram, column_of(m, x), column_of(m, y));
      if (!detail::near_equal_scalar(got, cod_gram(x, y), eps)) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// 1. Composition and isometry of the contravariant transport.

SuiteResult suite_functoriality(std::uint64_t seed) {
  Ctx c("functoriality", seed);
  for (int p = 0; p < 100 && !c.failed(); ++p) {
    AlgebraSample<E> a = random_algebra<E>(c.rng, true);
    State<E> phi = random_positive_state<E>(c.rng, a.algebra);
    HomSample<E> f = random_hom_into<E>(c.rng, a);
    PhysMorphism<E> m1 = phys_morphism(f.hom, phi);
    HomSample<E> g = random_hom_into<E>(c.rng, f.dom);
    PhysMorphism<E> m2 = phys_morphism(g.hom, m1.cod_state);
    PhysMorphism<E> mc = compose(m2, m1);
    c.expect(m1.admissible() && m2.admissible() && mc.admissible(),
             "a morphism between positive states came out inadmissible", p);
    if (c.failed()) break;
    Mat<E> t1 = gns_map(m1);
    Mat<E> t2 = gns_map(m2);
    Mat<E> tc = gns_map(mc);
    c.expect(detail::near_equal_mat(tc, t1 * t2, 0.0),
             "gns_map of the composite differs from the product of transports", p);
    c.expect(gram_isometric(t1, m1.dom_gns->gram(), m1.cod_gns->gram(), 0.0),
             "first transport is not a gram isometry", p);
    c.expect(gram_isometric(t2, m2.dom_gns->gram(), m2.cod_gns->gram(), 0.0),
             "second transport is not a gram isometry", p);
    c.expect(gram_isometric(tc, mc.dom_gns->gram(), mc.cod_gns->gram(), 0.0),
             "composite transport is not a gram isometry", p);
    ++c.res.checks;
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 2. The monoidal comparison map is unitary and natural.

SuiteResult suite_monoidality(std::uint64_t seed) {
  Ctx c("monoidality", seed);
  for (int p = 0; p < 50 && !c.failed(); ++p) {
    AlgebraSample<E> a1 = random_base_algebra<E>(c.rng, true);
    AlgebraSample<E> a2 = random_base_algebra<E>(c.rng, true);
    State<E> phi1 = random_positive_state<E>(c.rng, a1.algebra);
    State<E> phi2 = random_positive_state<E>(c.rng, a2.algebra);
    GnsSpace<E> g1 = gns(phi1);
    GnsSpace<E> g2 = gns(phi2);
    GnsSpace<E> gt = gns(tensor_state(phi1, phi2));
    Mat<E> iso = monoidal_iso(phi1, phi2);

    bool unitary = true;
    const int d2 = g2.dim();
    for (int x = 0; x < gt.dim() && unitary; ++x)
      for (int y = 0; y < gt.dim() && unitary; ++y) {
        E want = g1.gram()(x / d2, y / d2) * g2.gram()(x % d2, y % d2);
        E got = form_pair(gt.gram(), column_of(iso, x), column_of(iso, y));
        unitary = got == want;
      }
    c.expect(unitary, "monoidal comparison is not unitary for the tensor form", p);

    HomSample<E> f1 = random_hom_into<E>(c.rng, a1);
    HomSample<E> f2 = random_hom_into<E>(c.rng, a2);
    PhysMorphism<E> m1 = phys_morphism(f1.hom, phi1);
    PhysMorphism<E> m2 = phys_morphism(f2.hom, phi2);
    PhysMorphism<E> mt = tensor_phys(m1, m2);
    Mat<E> lhs = gns_map(mt) * monoidal_iso(m1.cod_state, m2.cod_state);
    Mat<E> rhs = iso * kron(gns_map(m1), gns_map(m2));
    c.expect(detail::near_equal_mat(lhs, rhs, 0.0),
             "monoidal comparison is not natural", p);
    ++c.res.checks;
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 3. Stinespring factorization of random Kraus maps.

template <class K>
void stinespring_probe(Ctx& c, int d, int cod, double bound, int probe) {
  int kraus = c.rng.range(1, 3);
  Mat<K> fm = random_kraus_cp_matrix<K>(c.rng, d, cod, kraus);
  AlgebraPtr<K> ad = make_matrix_algebra<K>(d);
  AlgebraPtr<K> ac = make_matrix_algebra<K>(cod);
  StarLinearMap<K> f{ad, ac, std::move(fm)};
  State<K> phi = vectorial_state(ac, random_vector<K>(c.rng, cod));
  StinespringDilation<K> dil = stinespring(f, phi);
  GnsSpace<K> g = gns(phi);
  Mat<K> vstar = adjoint_wrt_forms(dil.v, g.gram(), dil.form);
  double res = 0.0;
  for (int t = 0; t < ad->dim; ++t)
    res = std::max(res, max_abs_diff(vstar * (dil.pi[t] * dil.v),
                                     g.action_of(column_of(f.matrix, t))));
  c.expect(res <= bound, "dilation residual " + std::to_string(res), probe);
  ++c.res.checks;
}

SuiteResult suite_stinespring(std::uint64_t seed) {
  Ctx c("stinespring", seed);
  static const int exact_dims[25][2] = {
      {2, 2}, {2, 2}, {2, 2}, {2, 2}, {2, 2}, {2, 2}, {2, 2}, {2, 2}, {2, 2},
      {2, 3}, {2, 3}, {2, 3}, {2, 3}, {2, 3}, {2, 3}, {2, 3}, {2, 3},
      {3, 2}, {3, 2}, {3, 2}, {3, 2}, {3, 2}, {3, 2}, {3, 2}, {3, 2}};
  for (int p = 0; p < 25 && !c.failed(); ++p)
    stinespring_probe<E>(c, exact_dims[p][0], exact_dims[p][1], 0.0, p);
  for (int p = 25; p < 50 && !c.failed(); ++p)
    stinespring_probe<F>(c, c.rng.range(2, 3), c.rng.range(2, 3), 1e-9, p);
  return c.finish();
}

// ---------------------------------------------------------------------------
// 4. Spectral weights: the pinned qubit and random normal observables.

SuiteResult suite_born(std::uint64_t seed) {
  Ctx c("born", seed);
  {
    AlgebraPtr<F> m2 = make_matrix_algebra<F>(2);
    Element<F> a = make_element(m2, Vec<F>{F(1), F(0), F(0), F(-1)});
    State<F> phi = vectorial_state(m2, Vec<F>{F(1), F(1)});
    SpectralDistribution<F> dist = born_distribution(a, phi);
    c.expect(std::abs(dist.total - 2.0) <= 1e-12, "qubit weights do not sum to phi(1)", 0);
    c.expect(std::abs(weight_at(dist, F(1)) / dist.total - 0.5) <= 1e-12,
             "qubit weight at +1 is not 1/2", 0);
    c.expect(std::abs(weight_at(dist, F(-1)) / dist.total - 0.5) <= 1e-12,
             "qubit weight at -1 is not 1/2", 0);
    ++c.res.checks;
  }
  AlgebraPtr<F> m3 = make_matrix_algebra<F>(3);
  for (int p = 0; p < 100 && !c.failed(); ++p) {
    Mat<F> u = random_unitary<F>(c.rng, 3);
    Mat<F> d(3, 3);
    for (int j = 0; j < 3; ++j) {
      d(j, j) = F(c.rng.range(-2, 2));
      if (c.rng.range(0, 3) == 0) d(j, j) += F(0, 1) * F(c.rng.range(-2, 2));
    }
    Element<F> a = make_element(m3, row_major(u * (d * dagger(u))));
    State<F> phi = random_positive_state<F>(c.rng, m3, 3);
    SpectralDistribution<F> dist = born_distribution(a, phi);
    double p1 = phi.normalization.real();
    c.expect(std::abs(dist.total - p1) <= 1e-9 * std::max(1.0, std::abs(p1)),
             "weights do not sum to phi(1)", p);
    for (const auto& e : dist.entries)
      c.expect(e.weight >= 0.0, "negative spectral weight", p);
    ++c.res.checks;
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 5. Eigenvector, vanishing variance, and full spectral weight agree.

SuiteResult suite_ee_link(std::uint64_t seed) {
  Ctx c("ee_link", seed);
  for (int p = 0; p < 100 && !c.failed(); ++p) {
    int n = c.rng.range(2, 3);
    AlgebraPtr<F> alg = make_matrix_algebra<F>(n);
    Mat<F> u = random_unitary<F>(c.rng, n);
    std::vector<int> grid = random_permutation(c.rng, 5);  // distinct eigenvalues
    Mat<F> d(n, n);
    for (int j = 0; j < n; ++j) d(j, j) = F(grid[j] - 2);
    Element<F> a = make_element(alg, row_major(u * (d * dagger(u))));
    if (p < 20) {
      int j = c.rng.range(0, n - 1);
      State<F> phi = vectorial_state(alg, column_of(u, j));
      EeLinkReport rep = ee_link_check(a, phi, F(grid[j] - 2));
      c.expect(rep.agree && rep.eigenvector && rep.almost_everywhere && rep.full_weight,
               "forced eigenvector probe does not satisfy all three conditions", p);
    } else {
      State<F> phi = random_positive_state<F>(c.rng, alg, 2);
      F lambda = c.rng.coin() ? F(grid[c.rng.range(0, n - 1)] - 2) : F(c.rng.range(5, 9));
      EeLinkReport rep = ee_link_check(a, phi, lambda);
      c.expect(rep.agree, "the three conditions disagree", p);
    }
    ++c.res.checks;
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 6. Conditioning by projections.

SuiteResult suite_collapse(std::uint64_t seed) {
  Ctx c("collapse", seed);
  for (int p = 0; p < 50 && !c.failed(); ++p) {
    int n = p < 25 ? 2 : 3;
    AlgebraPtr<E> alg = make_matrix_algebra<E>(n);
    Mat<E> pm = random_projection_matrix<E>(c.rng, n, c.rng.range(1, n));
    Element<E> proj = make_element(alg, row_major(pm));
    State<E> phi = vectorial_state(alg, random_vector<E>(c.rng, n));
    for (int tries = 0; tries < 50 && is_zero(evaluate(phi, proj.coords)); ++tries)
      phi = vectorial_state(alg, random_vector<E>(c.rng, n));
    c.expect(!is_zero(evaluate(phi, proj.coords)),
             "could not draw a state with phi(P) != 0", p);
    if (c.failed()) break;
    Conditioning<E> cond = conditioning(proj, phi);
    c.expect(cond.report.collapse_probability == evaluate(phi, proj.coords),
             "collapse probability differs from phi(P)", p);
    c.expect(cond.report.omega_matches,
             "the cyclic vector does not collapse onto P Omega", p);
    c.expect(cond.report.composite_checked && cond.report.composite_is_p,
             "the composite does not reproduce the action of P", p);
    c.expect(cond.report.ok, "conditioning report is not clean", p);
    ++c.res.checks;
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 7. Kernel/CP duality: roundtrips, contravariance, tensors.

SuiteResult suite_duality(std::uint64_t seed) {
  Ctx c("duality", seed);
  for (int p = 0; p < 100 && !c.failed(); ++p) {
    int nx = c.rng.range(1, 6), ny = c.rng.range(1, 6), nz = c.rng.range(1, 6);
    MarkovKernel<E> k1 = markov_kernel(point_labels("x", nx), point_labels("y", ny),
                                       random_stochastic_matrix<E>(c.rng, nx, ny));
    MarkovKernel<E> k2 = markov_kernel(point_labels("y", ny), point_labels("z", nz),
                                       random_stochastic_matrix<E>(c.rng, ny, nz));
    CpMap<E> d1 = kernel_to_cp(k1);
    MarkovKernel<E> back = cp_to_kernel(d1);
    c.expect(back.dom == k1.dom && back.cod == k1.cod &&
                 detail::near_equal_mat(back.matrix, k1.matrix, 0.0),
             "kernel does not survive the duality roundtrip", p);

    CpMap<E> d2 = kernel_to_cp(k2);
    StarLinearMap<E> chained = compose(d1.underlying, d2.underlying);
    CpMap<E> dual_of_chain = kernel_to_cp(kleisli_compose(k1, k2));
    c.expect(same_algebra(chained.dom, dual_of_chain.underlying.dom) &&
                 same_algebra(chained.cod, dual_of_chain.underlying.cod) &&
                 detail::near_equal_mat(chained.matrix, dual_of_chain.underlying.matrix, 0.0),
             "duality does not reverse Kleisli composition", p);

    int nw = c.rng.range(1, 3), nv = c.rng.range(1, 3);
    MarkovKernel<E> k3 = markov_kernel(point_labels("w", nw), point_labels("v", nv),
                                       random_stochastic_matrix<E>(c.rng, nw, nv));
    CpMap<E> d3 = kernel_to_cp(k3);
    CpMap<E> dt = kernel_to_cp(kernel_tensor(k1, k3));
    StarLinearMap<E> tensor_dual = tensor_linear(d1.underlying, d3.underlying);
    c.expect(same_algebra(dt.underlying.dom, tensor_dual.dom) &&
                 same_algebra(dt.underlying.cod, tensor_dual.cod) &&
                 detail::near_equal_mat(dt.underlying.matrix, tensor_dual.matrix, 0.0),
             "duality does not intertwine kernel and map tensors", p);
    ++c.res.checks;
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 8. The square-integrable picture matches the transport on supports.

SuiteResult suite_prism(std::uint64_t seed) {
  Ctx c("prism", seed);
  for (int p = 0; p < 50 && !c.failed(); ++p) {
    int nx = c.rng.range(1, 5), ny = c.rng.range(1, 5);
    MarkovKernel<E> k = markov_kernel(point_labels("x", nx), point_labels("y", ny),
                                      random_stochastic_matrix<E>(c.rng, nx, ny));
    FiniteProbSpace<E> mu =
        prob_space(point_labels("x", nx), random_distribution<E>(c.rng, nx));
    PrismReport<E> rep = prism_compare(k, mu);
    c.expect(rep.match, "transport and row-averaging disagree on the supports", p);
    ++c.res.checks;
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 9. Normalization is rigid: no morphisms across phi(1) != psi(1), and
// the one-dimensional normalization witnesses multiply.

SuiteResult suite_normalization(std::uint64_t seed) {
  Ctx c("normalization", seed);
  int rejected = 0;
  for (int p = 0; p < 100 && !c.failed(); ++p) {
    AlgebraSample<E> a = random_algebra<E>(c.rng, true);
    State<E> phi = random_positive_state<E>(c.rng, a.algebra);
    HomSample<E> f = random_hom_into<E>(c.rng, a);
    State<E> pulled = pullback_state(f.hom, phi);
    E scale = scalar_from_int<E>(c.rng.range(2, 7));
    if (c.rng.coin()) scale = scalar_from_int<E>(1) / scale;
    if (c.rng.coin()) scale = -scale;
    State<E> claimed = make_state(f.hom.dom, scale * pulled.functional);
    bool hit = false;
    try {
      phys_morphism_to(f.hom, phi, claimed);
    } catch (const Error& e) {
      hit = e.code() == "NotSameState";
    }
    c.expect(hit, "a cross-normalization morphism was accepted", p);
    if (hit) ++rejected;
    ++c.res.checks;
  }
  c.expect(rejected == 100 || c.failed(), "fewer than 100 rejections", 100);
  for (int p = 0; p < 20 && !c.failed(); ++p) {
    auto draw = [&] {
      return scalar_from_int<E>(c.rng.range(1, 3) * (c.rng.coin() ? 1 : -1)) /
             scalar_from_int<E>(c.rng.range(1, 3));
    };
    E lam = draw(), mu = draw();
    State<E> t = tensor_state(make_I(lam), make_I(mu));
    State<E> direct = make_I(lam * mu);
    c.expect(t.algebra->dim == 1 && t.functional == direct.functional &&
                 t.normalization == direct.normalization,
             "tensor of normalization witnesses is not the product witness", p);
    ++c.res.checks;
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 10. The regular S3 action transports to a six-dimensional unitary
// representation, multiplicative and covariant on the nose.

SuiteResult suite_symmetry(std::uint64_t seed) {
  Ctx c("symmetry", seed);
  auto table = s3_table();
  AlgebraPtr<E> alg = make_function_algebra<E>(point_labels("g", 6));
  State<E> phi =
      make_state(alg, Vec<E>(6, scalar_from_int<E>(1) / scalar_from_int<E>(6)));
  std::vector<StarHomomorphism<E>> autos;
  for (int g = 0; g < 6; ++g)
    autos.push_back(check_homomorphism(alg, alg, permutation_matrix<E>(table[g])));
  GroupAction<E> act = group_action(table, phi, autos);
  UnitaryRep<E> rep = equivariant_gns(act);
  c.expect(rep.dim == 6, "regular action does not give a six-dimensional module", 0);
  GnsSpace<E> g0 = gns(phi);
  for (int g = 0; g < 6 && !c.failed(); ++g) {
    c.expect(detail::near_equal_mat(rep.matrices[g], permutation_matrix<E>(table[g]), 0.0),
             "transport differs from the left-translation permutation", g);
    c.expect(gram_isometric(rep.matrices[g], rep.gram, rep.gram, 0.0),
             "transport is not unitary for the module form", g);
    for (int h = 0; h < 6; ++h) {
      c.expect(detail::near_equal_mat(rep.matrices[g] * rep.matrices[h],
                                      rep.matrices[table[g][h]], 0.0),
               "transport is not multiplicative", g * 6 + h);
      c.expect(detail::near_equal_mat(
                   rep.matrices[g] * g0.actions[h],
                   g0.action_of(column_of(act.automorphisms[g].matrix, h)) * rep.matrices[g],
                   0.0),
               "transport is not covariant over the action", g * 6 + h);
      ++c.res.checks;
    }
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 11. Vector classes present states: transport then pull back is the identity
// on presentations.

SuiteResult suite_dinaturality(std::uint64_t seed) {
  Ctx c("dinaturality", seed);
  for (int p = 0; p < 100 && !c.failed(); ++p) {
    AlgebraSample<E> a = random_algebra<E>(c.rng, true);
    State<E> phi = random_positive_state<E>(c.rng, a.algebra);
    HomSample<E> f = random_hom_into<E>(c.rng, a);
    PhysMorphism<E> m = phys_morphism(f.hom, phi);
    Vec<E> v = random_vector<E>(c.rng, m.cod_gns->dim());
    Vec<E> w = gns_map(m) * v;
    Vec<E> presented(a.algebra->dim, E{});
    for (int i = 0; i < a.algebra->dim; ++i)
      presented[i] = form_pair(m.dom_gns->gram(), m.dom_gns->actions[i] * w, w);
    Vec<E> pulled = transpose(f.hom.matrix) * presented;
    Vec<E> direct(f.hom.dom->dim, E{});
    for (int j = 0; j < f.hom.dom->dim; ++j)
      direct[j] = form_pair(m.cod_gns->gram(), m.cod_gns->actions[j] * v, v);
    c.expect(detail::near_equal_vec(pulled, direct, 0.0),
             "pulled-back presentation differs from the direct one", p);
    ++c.res.checks;
  }
  return c.finish();
}

// ---------------------------------------------------------------------------
// 12. Scattering: conjugation by W = p_beta S i_alpha is the transported
// process, with physical transition probabilities.

SuiteResult suite_scattering(std::uint64_t seed) {
  Ctx c("scattering", seed);
  for (int p = 0; p < 20 && !c.failed(); ++p) {
    int nf = c.rng.range(2, 8);
    int ha = c.rng.range(1, nf);
    int hb = c.rng.range(1, nf);
    Mat<F> s = random_unitary<F>(c.rng, nf);
    Mat<F> ua = random_unitary<F>(c.rng, nf);
    Mat<F> ub = random_unitary<F>(c.rng, nf);
    Mat<F> ia(nf, ha);
    for (int r = 0; r < nf; ++r)
      for (int k = 0; k < ha; ++k) ia(r, k) = ua(r, k);
    Mat<F> pb(hb, nf);
    for (int k = 0; k < hb; ++k)
      for (int r = 0; r < nf; ++r) pb(k, r) = ub(k, r);
    Vec<F> v = random_vector<F>(c.rng, ha);
    Scattering<F> sc = scattering(s, ia, pb, v);
    c.expect(sc.probability_bounded, "transition probability escapes [0, phi(1)]", p);
    c.expect(sc.intertwines, "transport does not intertwine with W", p);
    double p1 = sc.morphism.dom_state.normalization.real();
    double q1 = sc.transition_probability.real();
    c.expect(q1 >= -1e-9 && q1 <= p1 + 1e-9 &&
                 std::abs(sc.transition_probability.imag()) <= 1e-9,
             "transition probability is not a physical weight", p);
    if (sc.morphism.cod_gns->dim() > 0) {
      Mat<F> mc = gns_mc(sc.morphism);
      Mat<F> ea = cyclic_embedding(*sc.morphism.dom_gns,
                                   sc.morphism.dom_state.algebra->faithful_rep->mats, v);
      Mat<F> eb = cyclic_embedding(*sc.morphism.cod_gns,
                                   sc.morphism.cod_state.algebra->faithful_rep->mats,
                                   sc.w * v);
      double res = max_abs_diff(eb * mc, sc.w * ea);
      c.expect(res <= 1e-9 * std::max(1.0, mat_scale(sc.w)),
               "scattering residual " + std::to_string(res), p);
    }
    ++c.res.checks;
  }
  return c.finish();
}

using SuiteFn = SuiteResult (*)(std::uint64_t);

struct SuiteEntry {
  const char* name;
  SuiteFn fn;
};

const SuiteEntry kSuites[] = {
    {"functoriality", suite_functoriality},
    {"monoidality", suite_monoidality},
    {"stinespring", suite_stinespring},
    {"born", suite_born},
    {"ee_link", suite_ee_link},
    {"collapse", suite_collapse},
    {"duality", suite_duality},
    {"prism", suite_prism},
    {"normalization", suite_normalization},
    {"symmetry", suite_symmetry},
    {"dinaturality", suite_dinaturality},
    {"scattering", suite_scattering},
};

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : kSuites) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  for (const auto& e : kSuites) {
    if (name != e.name) continue;
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    try {
      r = e.fn(seed);
    } catch (const Error& err) {
      r.name = name;
      r.pass = false;
      r.detail = std::string("unexpected error: ") + err.what();
    } catch (const std::exception& err) {
      r.name = name;
      r.pass = false;
      r.detail = std::string("unexpected exception: ") + err.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return r;
  }
  fail("UnresolvedReference", "unknown suite \"" + name + "\"");
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
  std::vector<SuiteResult> out;
  out.reserve(suite_names().size());
  for (const auto& n : suite_names()) out.push_back(run_suite(n, seed));
  return out;
}

}  // namespace gnslab
