#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gnslab/phys.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// Processes carried by *-linear maps that need not be multiplicative. The
// orientation mirrors the homomorphism-backed morphisms: a process
// (A, phi) -> (B, psi) is carried by Phi: B -> A with psi = phi o Phi.

template <class K>
struct MarkovMorphism {
  State<K> dom_state;   // (A, phi)
  State<K> cod_state;   // (B, psi)
  StarLinearMap<K> map;  // Phi: B -> A
  std::shared_ptr<const GnsSpace<K>> dom_gns;
  std::shared_ptr<const GnsSpace<K>> cod_gns;
  std::optional<Vec<K>> inadmissible_witness;

  bool admissible() const { return !inadmissible_witness.has_value(); }
};

template <class K>
StarLinearMap<K> to_linear(const StarHomomorphism<K>& f) {
  return {f.dom, f.cod, f.matrix};
}

template <class K>
StarLinearMap<K> identity_linear(const AlgebraPtr<K>& a) {
  return {a, a, Mat<K>::identity(a->dim)};
}

// g after f.
template <class K>
StarLinearMap<K> compose(const StarLinearMap<K>& g, const StarLinearMap<K>& f) {
  require_same_algebra(f.cod, g.dom, "linear maps do not compose");
  return {f.dom, g.cod, g.matrix * f.matrix};
}

template <class K>
StarLinearMap<K> tensor_linear(const StarLinearMap<K>& f, const StarLinearMap<K>& g) {
  return {tensor_algebra(f.dom, g.dom), tensor_algebra(f.cod, g.cod),
          kron(f.matrix, g.matrix)};
}

template <class K>
State<K> pullback_state(const StarLinearMap<K>& f, const State<K>& s) {
  require_same_algebra(f.cod, s.algebra, "state does not live on the map's codomain");
  State<K> out;
  out.algebra = f.dom;
  out.functional = transpose(f.matrix) * s.functional;
  out.normalization = evaluate(out, f.dom->unit);
  return out;
}

template <class K>
MarkovMorphism<K> markov_morphism(const StarLinearMap<K>& f, const State<K>& phi,
                                  const ToleranceConfig& tol = {}) {
  require_same_algebra(f.cod, phi.algebra, "state does not live on the map's codomain");
  MarkovMorphism<K> m;
  m.dom_state = phi;
  m.cod_state = pullback_state(f, phi);
  m.map = f;
  m.dom_gns = std::make_shared<const GnsSpace<K>>(gns(m.dom_state, tol));
  m.cod_gns = std::make_shared<const GnsSpace<K>>(gns(m.cod_state, tol));
  m.inadmissible_witness = detail::radical_escape(f.matrix, *m.dom_gns, *m.cod_gns, tol);
  return m;
}

template <class K>
MarkovMorphism<K> to_markov(const PhysMorphism<K>& m) {
  return {m.dom_state, m.cod_state, to_linear(m.hom),
          m.dom_gns,   m.cod_gns,   m.inadmissible_witness};
}

template <class K>
MarkovMorphism<K> identity_markov(const State<K>& phi, const ToleranceConfig& tol = {}) {
  return markov_morphism(identity_linear(phi.algebra), phi, tol);
}

template <class K>
MarkovMorphism<K> tensor_markov(const MarkovMorphism<K>& m1, const MarkovMorphism<K>& m2,
                                const ToleranceConfig& tol = {}) {
  return markov_morphism(tensor_linear(m1.map, m2.map),
                         tensor_state(m1.dom_state, m2.dom_state), tol);
}

// ---------------------------------------------------------------------------
// Admissibility for plain *-linear maps: every radical vector of the
// pulled-back form must land in the radical of the target form.

template <class K>
struct AdmissibilityResult {
  bool admissible = false;
  std::optional<Vec<K>> witness;
};

template <class K>
AdmissibilityResult<K> is_admissible_linear(const StarLinearMap<K>& f, const State<K>& phi,
                                            const ToleranceConfig& tol = {}) {
  MarkovMorphism<K> m = markov_morphism(f, phi, tol);
  return {m.admissible(), m.inadmissible_witness};
}

// ---------------------------------------------------------------------------
// The quotient transport [x] |-> [Phi(x)], GNS(psi) -> GNS(phi). Unlike the
// homomorphism case it is neither isometric nor a module map in general.

template <class K>
Mat<K> gns_m(const MarkovMorphism<K>& m, const ToleranceConfig& tol = {}) {
  if (!m.admissible())
    fail("NotAdmissible", "the process does not map the radical into the radical");
  const GnsSpace<K>& gd = *m.dom_gns;
  const GnsSpace<K>& gc = *m.cod_gns;
  Mat<K> out(gd.dim(), gc.dim());
  for (int b = 0; b < gc.dim(); ++b) {
    Vec<K> col = gd.reduce(m.map.matrix * gc.quotient_reps[b]);
    for (int r = 0; r < gd.dim(); ++r) out(r, b) = col[r];
  }
  // Transport must be independent of representatives: on every basis class,
  // reducing then mapping agrees with mapping then reducing.
  double eps = 0.0;
  if constexpr (!is_exact_v<K>)
    eps = tol.spec_tol * std::max({mat_scale(out), mat_scale(m.map.matrix), 1.0});
  const int d = m.cod_state.algebra->dim;
  for (int a = 0; a < d; ++a) {
    Vec<K> via_quotient = out * gc.reduce(unit_vec<K>(d, a));
    Vec<K> direct = gd.reduce(m.map.matrix * unit_vec<K>(d, a));
    if (!detail::near_equal_vec(via_quotient, direct, eps))
      fail("BackendError", "quotient transport is inconsistent at basis " +
                               m.cod_state.algebra->labels[a]);
  }
  return out;
}

template <class K>
Mat<K> gns_m(const StarLinearMap<K>& f, const State<K>& phi, const ToleranceConfig& tol = {}) {
  return gns_m(markov_morphism(f, phi, tol), tol);
}

// The covariant companion, defined between positive states.
template <class K>
Mat<K> gns_mc(const MarkovMorphism<K>& m, const ToleranceConfig& tol = {}) {
  if (!is_positive(m.dom_state, tol).psd)
    fail("NotPositive", "the domain state is not positive");
  if (!is_positive(m.cod_state, tol).psd)
    fail("NotPositive", "the codomain state is not positive");
  return adjoint_wrt_forms(gns_m(m, tol), m.cod_gns->gram(), m.dom_gns->gram(), tol);
}

template <class K>
Mat<K> gns_mc(const StarLinearMap<K>& f, const State<K>& phi, const ToleranceConfig& tol = {}) {
  return gns_mc(markov_morphism(f, phi, tol), tol);
}

// ---------------------------------------------------------------------------
// Chains of processes. The carrier maps compose contravariantly.

template <class K>
MarkovMorphism<K> evolve(const State<K>& start, const std::vector<MarkovMorphism<K>>& chain,
                         const ToleranceConfig& tol = {}) {
  if (chain.empty()) return identity_markov(start, tol);
  const State<K>* at = &start;
  for (size_t k = 0; k < chain.size(); ++k) {
    const State<K>& next = chain[k].dom_state;
    bool same = same_algebra(at->algebra, next.algebra);
    if (same) {
      if constexpr (is_exact_v<K>) {
        same = at->functional == next.functional;
      } else {
        double s = std::max({vec_scale(at->functional), vec_scale(next.functional), 1.0});
        same = max_abs_diff(at->functional, next.functional) <= tol.spec_tol * s;
      }
    }
    if (!same) fail("NotComposable", "chain breaks at index " + std::to_string(k));
    at = &chain[k].cod_state;
  }
  Mat<K> total = chain.front().map.matrix;
  for (size_t k = 1; k < chain.size(); ++k) total = total * chain[k].map.matrix;
  StarLinearMap<K> f{chain.back().map.dom, chain.front().map.cod, std::move(total)};
  return markov_morphism(f, start, tol);
}

template <class K>
MarkovMorphism<K> evolve(const std::vector<MarkovMorphism<K>>& chain,
                         const ToleranceConfig& tol = {}) {
  if (chain.empty()) fail("NotComposable", "empty chain needs an explicit starting state");
  return evolve(chain.front().dom_state, chain, tol);
}

// ---------------------------------------------------------------------------
// Complete positivity. The certificate is the block Gram matrix of the map
// over the domain basis, represented faithfully on the codomain side:
// C[(i,r),(j,s)] = rep(Phi(e_i* e_j))[r,s]. It is Hermitian by *-linearity
// and positive semidefinite exactly when the map is completely positive.

template <class K>
struct CpMap {
  StarLinearMap<K> underlying;
  Mat<K> choi;
  bool unital = false;
};

template <class K>
struct CpCertificate {
  bool cp = false;
  Mat<K> choi;
  std::optional<Vec<K>> witness;  // vector with a negative Choi expectation
  std::optional<CpMap<K>> map;
};

template <class K>
CpCertificate<K> is_completely_positive(const StarLinearMap<K>& f,
                                        const ToleranceConfig& tol = {}) {
  if (!f.dom->faithful_rep || !f.cod->faithful_rep)
    fail("NoFaithfulRep", "complete positivity needs faithful representations on both sides");
  const StarAlgebra<K>& a = *f.dom;
  const int da = a.dim;
  const int dr = f.cod->faithful_rep->dim;
  std::vector<Vec<K>> stars;
  stars.reserve(da);
  for (int i = 0; i < da; ++i) stars.push_back(star_coords(a, unit_vec<K>(da, i)));
  Mat<K> choi(da * dr, da * dr);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) {
      Vec<K> prod = mul_coords(a, stars[i], unit_vec<K>(da, j));
      Mat<K> block = rep_matrix(*f.cod, f.matrix * prod);
      for (int r = 0; r < dr; ++r)
        for (int s = 0; s < dr; ++s) choi(i * dr + r, j * dr + s) = block(r, s);
    }
  CpCertificate<K> cert;
  cert.choi = choi;
  PsdResult<K> psd = psd_certify(choi, tol);
  cert.cp = psd.psd;
  cert.witness = psd.witness;
  if (cert.cp) {
    double eps = 0.0;
    if constexpr (!is_exact_v<K>) eps = tol.spec_tol * std::max(mat_scale(f.matrix), 1.0);
    bool unital = detail::near_equal_vec(f.matrix * f.dom->unit, f.cod->unit, eps);
    cert.map = CpMap<K>{f, choi, unital};
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Dilation of a completely positive map Phi: A -> B against a positive state
// phi on B. The carrier is A (x) B with the form
//   <a1 (x) b1, a2 (x) b2> = phi(b2* Phi(a2* a1) b1),
// quotiented by its radical; V embeds GNS(phi) as 1 (x) B and pi acts by
// left multiplication on the A leg. V* pi(a) V recovers the GNS action of
// Phi(a) on every basis element.

template <class K>
struct StinespringDilation {
  int h_dim = 0;
  Mat<K> form;             // quotient form on H; positive semidefinite
  Mat<K> v;                // GNS(phi) -> H
  std::vector<Mat<K>> pi;  // representation of the domain algebra on H
};

template <class K>
StinespringDilation<K> stinespring(const CpMap<K>& c, const State<K>& phi,
                                   const ToleranceConfig& tol = {}) {
  const StarLinearMap<K>& f = c.underlying;
  require_same_algebra(f.cod, phi.algebra, "state does not live on the map's codomain");
  if (!is_positive(phi, tol).psd) fail("NotPositive", "dilation needs a positive state");
  const StarAlgebra<K>& a = *f.dom;
  const StarAlgebra<K>& b = *f.cod;
  const int da = a.dim;
  const int db = b.dim;
  GnsSpace<K> gphi = gns(phi, tol);
  const Mat<K>& gb = gphi.gram_full();  // gb(m, l) = phi(e_l* e_m)

  std::vector<Vec<K>> stars;
  stars.reserve(da);
  for (int k = 0; k < da; ++k) stars.push_back(star_coords(a, unit_vec<K>(da, k)));
  Mat<K> form(da * db, da * db);
  for (int k = 0; k < da; ++k)
    for (int i = 0; i < da; ++i) {
      Vec<K> img = f.matrix * mul_coords(a, stars[k], unit_vec<K>(da, i));
      Mat<K> y(db, db);  // column j: Phi(e_k* e_i) e_j in B coordinates
      for (int j = 0; j < db; ++j) {
        Vec<K> col = mul_coords(b, img, unit_vec<K>(db, j));
        for (int r = 0; r < db; ++r) y(r, j) = col[r];
      }
      Mat<K> block = transpose(y) * gb;  // block(j, l) = phi(e_l* (Phi(e_k* e_i) e_j))
      for (int j = 0; j < db; ++j)
        for (int l = 0; l < db; ++l) form(i * db + j, k * db + l) = block(j, l);
    }

  FormQuotient<K> fq = form_quotient(form, tol);
  PsdResult<K> psd = psd_certify(fq.gram, tol);
  if (!psd.psd) fail("NotCP", "the dilation form is not positive semidefinite");

  StinespringDilation<K> d;
  d.h_dim = fq.qdim;
  d.form = fq.gram;

  std::vector<Vec<K>> vcols;
  vcols.reserve(gphi.dim());
  for (const Vec<K>& r : gphi.quotient_reps) vcols.push_back(fq.reduce(kron(a.unit, r)));
  d.v = mat_from_columns(vcols, fq.qdim);

  d.pi.reserve(da);
  for (int t = 0; t < da; ++t) {
    std::vector<Vec<K>> cols;
    cols.reserve(fq.qdim);
    for (int p : fq.pivots) {
      Vec<K> left = mul_coords(a, unit_vec<K>(da, t), unit_vec<K>(da, p / db));
      cols.push_back(fq.reduce(kron(left, unit_vec<K>(db, p % db))));
    }
    d.pi.push_back(mat_from_columns(cols, fq.qdim));
  }

  Mat<K> vstar = adjoint_wrt_forms(d.v, gphi.gram(), fq.gram, tol);
  double eps = 0.0;
  if constexpr (!is_exact_v<K>)
    eps = tol.spec_tol * std::max({mat_scale(form), mat_scale(f.matrix), 1.0});
  for (int t = 0; t < da; ++t) {
    Mat<K> lhs = vstar * (d.pi[t] * d.v);
    Mat<K> rhs = gphi.action_of(column_of(f.matrix, t));
    if (max_abs_diff(lhs, rhs) > eps)
      fail("BackendError", "dilation factorization failed at basis " + a.labels[t]);
  }
  return d;
}

template <class K>
StinespringDilation<K> stinespring(const StarLinearMap<K>& f, const State<K>& phi,
                                   const ToleranceConfig& tol = {}) {
  CpCertificate<K> cert = is_completely_positive(f, tol);
  if (!cert.cp) fail("NotCP", "the map is not completely positive");
  return stinespring(*cert.map, phi, tol);
}

// ---------------------------------------------------------------------------
// Conditioning by a projection: Phi(a) = PaP against a positive state. The
// pulled-back state is represented by P.Omega, the transport factors as the
// isometric inclusion [x] |-> [xP] followed by the action of P, and when the
// two GNS spaces match in size the covariant transport is the action of P
// itself under that inclusion.

template <class K>
struct ConditioningReport {
  K collapse_probability{};  // psi(1)
  K p_expectation{};         // phi(P); always equals psi(1)
  Mat<K> j;                  // inclusion GNS(psi) -> GNS(phi)
  Mat<K> m;                  // gns_m, equal to action(P) o j
  Mat<K> mc;                 // gns_mc
  Vec<K> collapsed_vector;   // P.Omega in GNS(phi)
  bool j_isometric = false;
  bool factorized = false;
  bool omega_matches = false;   // mc(Omega_phi) = Omega_psi and j(Omega_psi) = P.Omega
  bool composite_checked = false;
  bool composite_is_p = false;  // j o mc = action(P) when dimensions agree
  bool ok = false;
};

template <class K>
struct Conditioning {
  MarkovMorphism<K> morphism;
  ConditioningReport<K> report;
};

template <class K>
Conditioning<K> conditioning(const Element<K>& p, const State<K>& phi,
                             const ToleranceConfig& tol = {}) {
  require_same_algebra(p.algebra, phi.algebra, "projection is not in the state's algebra");
  if (!is_projection(p, tol)) fail("NotProjection", "conditioning needs a projection");
  if (!is_positive(phi, tol).psd) fail("NotPositive", "conditioning needs a positive state");
  const StarAlgebra<K>& a = *phi.algebra;
  std::vector<Vec<K>> cols;
  cols.reserve(a.dim);
  for (int i = 0; i < a.dim; ++i)
    cols.push_back(mul_coords(a, mul_coords(a, p.coords, unit_vec<K>(a.dim, i)), p.coords));
  StarLinearMap<K> f{phi.algebra, phi.algebra, mat_from_columns(cols, a.dim)};

  Conditioning<K> out;
  out.morphism = markov_morphism(f, phi, tol);
  const GnsSpace<K>& gd = *out.morphism.dom_gns;
  const GnsSpace<K>& gc = *out.morphism.cod_gns;
  ConditioningReport<K>& rep = out.report;

  rep.collapse_probability = out.morphism.cod_state.normalization;
  rep.p_expectation = evaluate(phi, p.coords);

  std::vector<Vec<K>> jcols;
  jcols.reserve(gc.dim());
  for (const Vec<K>& r : gc.quotient_reps) jcols.push_back(gd.reduce(mul_coords(a, r, p.coords)));
  rep.j = mat_from_columns(jcols, gd.dim());
  Mat<K> action_p = gd.action_of(p.coords);
  rep.m = gns_m(out.morphism, tol);
  rep.mc = gns_mc(out.morphism, tol);
  rep.collapsed_vector = action_p * gd.omega;

  double eps = 0.0;
  if constexpr (!is_exact_v<K>)
    eps = tol.spec_tol * std::max({mat_scale(gd.gram()), mat_scale(rep.j), 1.0});
  rep.j_isometric = true;
  for (int x = 0; x < gc.dim(); ++x)
    for (int y = 0; y < gc.dim(); ++y) {
      K got = form_pair(gd.gram(), column_of(rep.j, x), column_of(rep.j, y));
      rep.j_isometric =
          rep.j_isometric && detail::near_equal_scalar(got, gc.gram()(x, y), eps);
    }
  rep.factorized = detail::near_equal_mat(rep.m, action_p * rep.j, eps);
  rep.omega_matches =
      detail::near_equal_vec(rep.mc * gd.omega, gc.omega, eps) &&
      detail::near_equal_vec(rep.j * gc.omega, rep.collapsed_vector, eps);
  rep.composite_checked = gd.dim() == gc.dim();
  if (rep.composite_checked)
    rep.composite_is_p = detail::near_equal_mat(rep.j * rep.mc, action_p, eps);
  rep.ok = rep.j_isometric && rep.factorized && rep.omega_matches &&
           detail::near_equal_scalar(rep.collapse_probability, rep.p_expectation, eps) &&
           (!rep.composite_checked || rep.composite_is_p);
  return out;
}

// ---------------------------------------------------------------------------
// Scattering through a finite stand-in for the field space: channels enter
// and leave a unitary S through an isometry and a coisometry, and the whole
// process is the conjugation by W = p_beta S i_alpha against the vectorial
// state picked out by the incoming vector.

template <class K>
struct Scattering {
  MarkovMorphism<K> morphism;
  Mat<K> w;                     // p_beta S i_alpha
  K transition_probability{};   // psi(1) = |W v|^2
  bool probability_bounded = false;
  bool intertwines = false;     // emb_beta o gns_mc = W o emb_alpha
  bool ok = false;
};

template <class K>
Scattering<K> scattering(const Mat<K>& s, const Mat<K>& i_alpha, const Mat<K>& p_beta,
                         const Vec<K>& v_alpha, const ToleranceConfig& tol = {}) {
  double eps = 0.0;
  if constexpr (!is_exact_v<K>)
    eps = tol.spec_tol * std::max({mat_scale(s), mat_scale(i_alpha), mat_scale(p_beta), 1.0});
  if (s.rows != s.cols || !detail::near_equal_mat(dagger(s) * s, Mat<K>::identity(s.cols), eps))
    fail("NotUnitary", "S must be unitary on the field space");
  if (i_alpha.rows != s.rows) fail("ShapeMismatch", "incoming isometry does not land in F");
  if (p_beta.cols != s.rows) fail("ShapeMismatch", "outgoing coisometry does not read F");
  if (!detail::near_equal_mat(dagger(i_alpha) * i_alpha, Mat<K>::identity(i_alpha.cols), eps))
    fail("NotIsometric", "the incoming channel map is not an isometry");
  if (!detail::near_equal_mat(p_beta * dagger(p_beta), Mat<K>::identity(p_beta.rows), eps))
    fail("NotIsometric", "the outgoing channel map is not a coisometry");
  const int ha = i_alpha.cols;
  const int hb = p_beta.rows;
  if (static_cast<int>(v_alpha.size()) != ha)
    fail("ShapeMismatch", "incoming vector does not live in the incoming channel");

  Scattering<K> out;
  out.w = p_beta * (s * i_alpha);
  AlgebraPtr<K> end_a = make_matrix_algebra<K>(ha);
  AlgebraPtr<K> end_b = make_matrix_algebra<K>(hb);
  Mat<K> fm(ha * ha, hb * hb);  // Phi(E_pq) = W* E_pq W, columnwise
  for (int p = 0; p < hb; ++p)
    for (int q = 0; q < hb; ++q)
      for (int k = 0; k < ha; ++k)
        for (int l = 0; l < ha; ++l)
          fm(k * ha + l, p * hb + q) = conj_s(out.w(p, k)) * out.w(q, l);
  StarLinearMap<K> f{end_b, end_a, std::move(fm)};
  State<K> phi = vectorial_state(end_a, v_alpha, tol);
  out.morphism = markov_morphism(f, phi, tol);
  out.transition_probability = out.morphism.cod_state.normalization;

  const K& psi1 = out.transition_probability;
  const K& phi1 = phi.normalization;
  if constexpr (is_exact_v<K>) {
    out.probability_bounded = psi1.im == 0 && psi1.re >= 0 && psi1.re <= phi1.re;
  } else {
    double slack = tol.psd_tol * std::max(mag(phi1), 1.0);
    out.probability_bounded = std::abs(psi1.imag()) <= slack && psi1.real() >= -slack &&
                              psi1.real() <= phi1.real() + slack;
  }

  if (out.morphism.cod_gns->dim() == 0) {
    out.intertwines = true;  // zero transition: nothing to transport
  } else {
    Mat<K> mc = gns_mc(out.morphism, tol);
    Mat<K> emb_a = cyclic_embedding(*out.morphism.dom_gns, end_a->faithful_rep->mats, v_alpha);
    Mat<K> emb_b =
        cyclic_embedding(*out.morphism.cod_gns, end_b->faithful_rep->mats, out.w * v_alpha);
    out.intertwines = detail::near_equal_mat(emb_b * mc, out.w * emb_a, eps);
  }
  out.ok = out.probability_bounded && out.intertwines;
  return out;
}

}  // namespace gnslab
