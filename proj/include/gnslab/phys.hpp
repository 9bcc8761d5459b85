#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "gnslab/gns.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// Morphisms of states. A morphism (A, phi) -> (B, psi) is carried by a
// *-homomorphism f: B -> A with psi = phi o f; the observable map runs
// against the arrow. Admissibility failure is recorded as data, not thrown.

template <class K>
struct PhysMorphism {
  State<K> dom_state;  // (A, phi)
  State<K> cod_state;  // (B, psi)
  StarHomomorphism<K> hom;  // f: B -> A
  std::shared_ptr<const GnsSpace<K>> dom_gns;
  std::shared_ptr<const GnsSpace<K>> cod_gns;
  // A radical vector of GNS(psi) whose image misses the radical of GNS(phi).
  std::optional<Vec<K>> inadmissible_witness;

  bool admissible() const { return !inadmissible_witness.has_value(); }
};

template <class K>
State<K> pullback_state(const StarHomomorphism<K>& f, const State<K>& s) {
  require_same_algebra(f.cod, s.algebra, "state does not live on the map's codomain");
  State<K> out;
  out.algebra = f.dom;
  out.functional = transpose(f.matrix) * s.functional;
  out.normalization = evaluate(out, f.dom->unit);
  return out;
}

namespace detail {

// First radical vector of the pulled-back form whose image fails to be
// radical for the target form, if any.
template <class K>
std::optional<Vec<K>> radical_escape(const Mat<K>& f, const GnsSpace<K>& target,
                                     const GnsSpace<K>& source, const ToleranceConfig& tol) {
  const Mat<K>& g_dom = target.gram_full();
  for (const Vec<K>& x : source.radical_basis()) {
    Vec<K> y = f * x;
    Vec<K> residue = transpose(g_dom) * y;  // zero iff y is radical for the target
    bool inside;
    if constexpr (is_exact_v<K>) {
      inside = is_zero_vec(residue);
    } else {
      double eps = tol.rank_tol * std::max(mat_scale(g_dom), 1.0) * std::max(vec_scale(y), 1.0);
      inside = true;
      for (const auto& r : residue) inside = inside && mag(r) <= eps;
    }
    if (!inside) return x;
  }
  return std::nullopt;
}

}  // namespace detail

template <class K>
PhysMorphism<K> phys_morphism(const StarHomomorphism<K>& f, const State<K>& phi,
                              const ToleranceConfig& tol = {}) {
  require_same_algebra(f.cod, phi.algebra, "state does not live on the map's codomain");
  PhysMorphism<K> m;
  m.dom_state = phi;
  m.cod_state = pullback_state(f, phi);
  m.hom = f;
  m.dom_gns = std::make_shared<const GnsSpace<K>>(gns(m.dom_state, tol));
  m.cod_gns = std::make_shared<const GnsSpace<K>>(gns(m.cod_state, tol));
  m.inadmissible_witness = detail::radical_escape(f.matrix, *m.dom_gns, *m.cod_gns, tol);
  return m;
}

// Morphism construction against a claimed codomain state; rejects the claim
// unless it is exactly the pullback.
template <class K>
PhysMorphism<K> phys_morphism_to(const StarHomomorphism<K>& f, const State<K>& phi,
                                 const State<K>& psi, const ToleranceConfig& tol = {}) {
  require_same_algebra(f.dom, psi.algebra, "claimed state does not live on the map's domain");
  check_same_normalization(phi, psi, tol);
  State<K> pulled = pullback_state(f, phi);
  bool same;
  if constexpr (is_exact_v<K>) {
    same = pulled.functional == psi.functional;
  } else {
    double s = std::max({vec_scale(pulled.functional), vec_scale(psi.functional), 1.0});
    same = max_abs_diff(pulled.functional, psi.functional) <= tol.spec_tol * s;
  }
  if (!same) fail("NotSameState", "claimed codomain state is not the pullback along the map");
  return phys_morphism(f, phi, tol);
}

template <class K>
PhysMorphism<K> identity_phys(const State<K>& phi, const ToleranceConfig& tol = {}) {
  return phys_morphism(identity_hom(phi.algebra), phi, tol);
}

// m2 after m1 (m1: phi -> psi, m2: psi -> chi); the carrier homs compose the
// other way around.
template <class K>
PhysMorphism<K> compose(const PhysMorphism<K>& m2, const PhysMorphism<K>& m1,
                        const ToleranceConfig& tol = {}) {
  if (!same_algebra(m1.cod_state.algebra, m2.dom_state.algebra))
    fail("NotComposable", "codomain and domain algebras differ");
  bool same;
  if constexpr (is_exact_v<K>) {
    same = m1.cod_state.functional == m2.dom_state.functional;
  } else {
    double s = std::max({vec_scale(m1.cod_state.functional),
                         vec_scale(m2.dom_state.functional), 1.0});
    same = max_abs_diff(m1.cod_state.functional, m2.dom_state.functional) <= tol.spec_tol * s;
  }
  if (!same) fail("NotComposable", "codomain state and domain state differ");
  StarHomomorphism<K> h{m2.hom.dom, m1.hom.cod, m1.hom.matrix * m2.hom.matrix};
  return phys_morphism(h, m1.dom_state, tol);
}

// ---------------------------------------------------------------------------
// The contravariant GNS functor: GNS(psi) -> GNS(phi), [x] |-> [f(x)].

template <class K>
Mat<K> gns_map(const PhysMorphism<K>& m) {
  if (!m.admissible())
    fail("NotAdmissible", "the morphism does not map the radical into the radical");
  const GnsSpace<K>& gd = *m.dom_gns;
  const GnsSpace<K>& gc = *m.cod_gns;
  Mat<K> f(gd.dim(), gc.dim());
  for (int b = 0; b < gc.dim(); ++b) {
    Vec<K> col = gd.reduce(m.hom.matrix * gc.quotient_reps[b]);
    for (int r = 0; r < gd.dim(); ++r) f(r, b) = col[r];
  }
  return f;
}

// The covariant companion: the adjoint of gns_map, GNS(phi) -> GNS(psi).
// Defined for positive states, where the forms are inner products.
template <class K>
Mat<K> gns_c(const PhysMorphism<K>& m, const ToleranceConfig& tol = {}) {
  if (!is_positive(m.dom_state, tol).psd)
    fail("NotPositive", "the domain state is not positive");
  if (!is_positive(m.cod_state, tol).psd)
    fail("NotPositive", "the codomain state is not positive");
  return adjoint_wrt_forms(gns_map(m), m.cod_gns->gram(), m.dom_gns->gram(), tol);
}

// ---------------------------------------------------------------------------
// Monoidal structure

template <class K>
PhysMorphism<K> tensor_phys(const PhysMorphism<K>& m1, const PhysMorphism<K>& m2,
                            const ToleranceConfig& tol = {}) {
  return phys_morphism(tensor_hom(m1.hom, m2.hom),
                       tensor_state(m1.dom_state, m2.dom_state), tol);
}

// GNS(phi) (x) GNS(psi) -> GNS(phi (x) psi), sending the tensor of quotient
// basis classes (a, b) |-> [rep_a (x) rep_b]; the column index is a*dim+b.
template <class K>
Mat<K> monoidal_iso(const State<K>& phi, const State<K>& psi, const ToleranceConfig& tol = {}) {
  GnsSpace<K> gp = gns(phi, tol);
  GnsSpace<K> gq = gns(psi, tol);
  GnsSpace<K> gt = gns(tensor_state(phi, psi), tol);
  if (gt.dim() != gp.dim() * gq.dim())
    fail("DegenerateForm", "tensor GNS dimension disagrees with the factor dimensions");
  Mat<K> iso(gt.dim(), gt.dim());
  for (int a = 0; a < gp.dim(); ++a)
    for (int b = 0; b < gq.dim(); ++b) {
      Vec<K> col = gt.reduce(kron(gp.quotient_reps[a], gq.quotient_reps[b]));
      for (int r = 0; r < gt.dim(); ++r) iso(r, a * gq.dim() + b) = col[r];
    }
  if (!inverse(iso, tol)) fail("DegenerateForm", "monoidal comparison map is not invertible");
  return iso;
}

// ---------------------------------------------------------------------------
// Schrödinger lifting: an isometry U and a vector psi produce the morphism
// U psi -> psi over the embedded copy U A U*, whose gns_map is U restricted
// to A psi. When U is square unitary the corollary form applies and the
// covariant map is U as well.

template <class K>
struct SchrodingerLift {
  PhysMorphism<K> morphism;      // (B, state at U psi) -> (A, state at psi)
  std::vector<Mat<K>> embedded;  // U rho(e_i) U^H, the concrete copy of A
  Mat<K> embed_base;             // GNS(psi) into the domain space: [x] |-> rho(x) psi
  Mat<K> embed_lifted;           // GNS(U psi) into the codomain space
  bool unitary = false;          // square U with U U* = I: corollary applies
};

template <class K>
SchrodingerLift<K> lift_schrodinger(const Mat<K>& u, const Vec<K>& psivec,
                                    const AlgebraPtr<K>& algebra,
                                    const ToleranceConfig& tol = {}) {
  if (!algebra->faithful_rep)
    fail("NotFaithful", "the algebra does not act on the domain space");
  const Rep<K>& rep = *algebra->faithful_rep;
  if (rep.dim != u.cols) fail("NotFaithful", "the representation space is not the domain of U");
  {
    Mat<K> stacked(rep.dim * rep.dim, algebra->dim);
    for (int i = 0; i < algebra->dim; ++i)
      for (int p = 0; p < rep.dim; ++p)
        for (int q = 0; q < rep.dim; ++q) stacked(p * rep.dim + q, i) = rep.mats[i](p, q);
    if (!kernel_basis(stacked, tol).empty()) fail("NotFaithful", "the action has a kernel");
  }
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) {
    double s = std::max(mat_scale(u), 1.0);
    eps = tol.spec_tol * s * s;
  }
  {
    Mat<K> gram = dagger(u) * u;
    bool iso;
    if constexpr (is_exact_v<K>) {
      iso = gram == Mat<K>::identity(u.cols);
    } else {
      iso = max_abs_diff(gram, Mat<K>::identity(u.cols)) <= eps;
    }
    if (!iso) fail("NotIsometric", "U* U != I");
  }
  if (static_cast<int>(psivec.size()) != u.cols)
    fail("ShapeMismatch", "vector does not live in the domain of U");
  if (detail::near_zero_vec(psivec, tol.rank_tol * std::max(vec_scale(psivec), 1.0)))
    fail("IsotropicState", "lift needs a nonzero vector");

  SchrodingerLift<K> lift;
  for (int i = 0; i < algebra->dim; ++i) lift.embedded.push_back(u * rep.mats[i] * dagger(u));

  State<K> base = vectorial_state(algebra, psivec, tol);
  Vec<K> upsi = u * psivec;
  Vec<K> lifted_functional(algebra->dim, K{});
  for (int i = 0; i < algebra->dim; ++i) {
    Vec<K> av = lift.embedded[i] * upsi;
    K out{};
    for (int p = 0; p < u.rows; ++p) out += conj_s(upsi[p]) * av[p];
    lifted_functional[i] = out;
  }
  State<K> lifted = make_state(algebra, std::move(lifted_functional), tol);
  lift.morphism = phys_morphism_to(identity_hom(algebra), lifted, base, tol);

  lift.embed_base = cyclic_embedding(*lift.morphism.cod_gns, rep.mats, psivec);
  lift.embed_lifted = cyclic_embedding(*lift.morphism.dom_gns, lift.embedded, upsi);
  Mat<K> square = u * lift.embed_base;
  bool ok;
  if constexpr (is_exact_v<K>) {
    ok = lift.embed_lifted == square;
  } else {
    ok = max_abs_diff(lift.embed_lifted, square) <=
         tol.spec_tol * std::max({mat_scale(square), vec_scale(psivec), 1.0});
  }
  if (!ok) fail("BackendError", "lift verification failed beyond tolerance");

  if (u.rows == u.cols) {
    Mat<K> uu = u * dagger(u);
    if constexpr (is_exact_v<K>) {
      lift.unitary = uu == Mat<K>::identity(u.rows);
    } else {
      lift.unitary = max_abs_diff(uu, Mat<K>::identity(u.rows)) <= eps;
    }
  }
  return lift;
}

// ---------------------------------------------------------------------------
// Composite axioms for a pair of normalized states on the tensor product:
// the coordinate projections are morphisms, do not interact, and commute.

struct CompositeAxiomReport {
  bool left_pullback = false;
  bool right_pullback = false;
  bool noninteraction = false;
  bool commutation = false;
  bool ok = false;
};

template <class K>
CompositeAxiomReport composite_axiom_check(const State<K>& phi, const State<K>& psi,
                                           const ToleranceConfig& tol = {}) {
  K one = scalar_from_int<K>(1);
  auto normalized = [&](const State<K>& s) {
    if constexpr (is_exact_v<K>) {
      return s.normalization == one;
    } else {
      return mag(s.normalization - one) <= tol.spec_tol;
    }
  };
  if (!normalized(phi) || !normalized(psi))
    fail("NotNormalized", "composite axioms need phi(1) = psi(1) = 1");

  const AlgebraPtr<K>& a = phi.algebra;
  const AlgebraPtr<K>& b = psi.algebra;
  State<K> t = tensor_state(phi, psi);
  const AlgebraPtr<K>& ab = t.algebra;
  double eps = 0.0;
  if constexpr (!is_exact_v<K>)
    eps = tol.spec_tol * std::max({vec_scale(phi.functional), vec_scale(psi.functional), 1.0});

  CompositeAxiomReport rep;
  rep.left_pullback = rep.right_pullback = rep.noninteraction = rep.commutation = true;
  for (int i = 0; i < a->dim; ++i) {
    K got = evaluate(t, kron(unit_vec<K>(a->dim, i), b->unit));
    rep.left_pullback =
        rep.left_pullback && detail::near_equal_scalar(got, phi.functional[i], eps);
  }
  for (int j = 0; j < b->dim; ++j) {
    K got = evaluate(t, kron(a->unit, unit_vec<K>(b->dim, j)));
    rep.right_pullback =
        rep.right_pullback && detail::near_equal_scalar(got, psi.functional[j], eps);
  }
  for (int i = 0; i < a->dim; ++i) {
    Vec<K> pa = kron(unit_vec<K>(a->dim, i), b->unit);
    for (int j = 0; j < b->dim; ++j) {
      Vec<K> pb = kron(a->unit, unit_vec<K>(b->dim, j));
      Vec<K> prod = mul_coords(*ab, pa, pb);
      rep.noninteraction =
          rep.noninteraction &&
          detail::near_equal_scalar(evaluate(t, prod), phi.functional[i] * psi.functional[j],
                                    eps);
      rep.commutation =
          rep.commutation &&
          detail::near_equal_vec(prod, mul_coords(*ab, pb, pa), eps);
    }
  }
  rep.ok = rep.left_pullback && rep.right_pullback && rep.noninteraction && rep.commutation;
  return rep;
}

}  // namespace gnslab
