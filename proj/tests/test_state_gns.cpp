#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "gnslab/phys.hpp"
#include "test_support.hpp"

using namespace gnslab;
using testsup::error_code_of;
using E = ExactScalar;
using F = FloatScalar;

namespace {

E q(long long n, long long d = 1) { return scalar_from_ratio<E>(n, d); }

State<E> m2_vectorial(const Vec<E>& v) {
  return vectorial_state(make_matrix_algebra<E>(2), v);
}

}  // namespace

TEST_CASE("state construction and star-linearity") {
  auto c2 = make_function_algebra<E>({"x", "y"});
  State<E> diff = make_state(c2, Vec<E>{q(1), q(-1)});
  CHECK(diff.normalization == q(0));

  State<E> zero = make_state(c2, Vec<E>(2, E{}));
  CHECK(zero.normalization == q(0));

  State<E> lam = make_I(q(7));
  CHECK(lam.normalization == q(7));

  auto m2 = make_matrix_algebra<E>(2);
  CHECK(error_code_of([&] {
          make_state(m2, Vec<E>{q(0), q(1), q(0), q(0)});
        }) == "NotStarLinear");

  State<E> vec = m2_vectorial(Vec<E>{q(1), q(0)});
  CHECK(vec.functional == Vec<E>{q(1), q(0), q(0), q(0)});
  CHECK(vec.normalization == q(1));
}

TEST_CASE("positivity with witnesses") {
  auto c2 = make_function_algebra<E>({"x", "y"});
  State<E> delta = make_state(c2, Vec<E>{q(1), q(0)});
  CHECK(is_positive(delta).psd);

  State<E> diff = make_state(c2, Vec<E>{q(1), q(-1)});
  auto res = is_positive(diff);
  REQUIRE(!res.psd);
  REQUIRE(res.witness.has_value());
  Element<E> w = make_element(c2, *res.witness);
  E val = evaluate(diff, mul(star(w), w));
  CHECK(is_real(val));
  CHECK(val.re < 0);

  CHECK(is_positive(m2_vectorial(Vec<E>{q(1), q(2)})).psd);
}

TEST_CASE("gns of a point evaluation") {
  auto c2 = make_function_algebra<E>({"x", "y"});
  GnsSpace<E> g = gns(make_state(c2, Vec<E>{q(1), q(0)}));
  CHECK(g.dim() == 1);
  CHECK(g.gram() == Mat<E>{{q(1)}});
  CHECK(g.actions[0] == Mat<E>{{q(1)}});
  CHECK(g.actions[1] == Mat<E>{{q(0)}});
  CHECK(g.omega == Vec<E>{q(1)});
  REQUIRE(g.radical_basis().size() == 1);
}

TEST_CASE("gns of vectorial states on M2") {
  GnsSpace<E> g = gns(m2_vectorial(Vec<E>{q(1), q(0)}));
  CHECK(g.dim() == 2);
  CHECK(g.form.pivots == std::vector<int>{0, 2});
  CHECK(g.gram() == Mat<E>::identity(2));
  CHECK(g.omega == Vec<E>{q(1), q(0)});

  GnsSpace<E> g2 = gns(m2_vectorial(Vec<E>{q(1), q(1)}));
  CHECK(g2.form.pivots == std::vector<int>{0, 2});
  CHECK(g2.gram() == Mat<E>::identity(2));
  CHECK(g2.omega == Vec<E>{q(1), q(1)});

  // omega represents the state and the module is cyclic
  State<E> back = vector_state(g2, g2.omega);
  CHECK(back.functional == m2_vectorial(Vec<E>{q(1), q(1)}).functional);

  // actions are star-adjoint with respect to the quotient form
  for (int i = 0; i < 4; ++i) {
    Vec<E> st = star_coords(*g2.algebra, unit_vec<E>(4, i));
    CHECK(g2.action_of(st) == adjoint_wrt_forms(g2.actions[i], g2.gram(), g2.gram()));
  }
}

TEST_CASE("gns of an indefinite state") {
  auto c2 = make_function_algebra<E>({"x", "y"});
  GnsSpace<E> g = gns(make_state(c2, Vec<E>{q(1), q(-1)}));
  CHECK(g.dim() == 2);
  CHECK(g.gram() == Mat<E>{{q(1), q(0)}, {q(0), q(-1)}});
  CHECK(g.radical_basis().empty());
}

TEST_CASE("vector states") {
  GnsSpace<E> g = gns(m2_vectorial(Vec<E>{q(1), q(0)}));
  CHECK(vector_state(g, Vec<E>(2, E{})).functional == Vec<E>(4, E{}));
  // a shifted vector gives the state conjugated by the shift
  State<E> s = vector_state(g, Vec<E>{q(0), q(1)});
  CHECK(s.functional == Vec<E>{q(0), q(0), q(0), q(1)});
}

TEST_CASE("normalization ops") {
  State<E> vec = m2_vectorial(Vec<E>{q(1), q(1)});
  State<E> n = normalize(vec);
  CHECK(n.normalization == q(1));
  CHECK(n.functional == Vec<E>{q(1, 2), q(1, 2), q(1, 2), q(1, 2)});

  auto c2 = make_function_algebra<E>({"x", "y"});
  CHECK(error_code_of([&] {
          normalize(make_state(c2, Vec<E>{q(1), q(-1)}));
        }) == "IsotropicState");

  State<E> a = make_I(q(2));
  State<E> b = make_I(q(3));
  State<E> t = tensor_state(a, b);
  CHECK(t.normalization == q(6));
  CHECK(t.functional == make_I(q(6)).functional);
  CHECK(t.algebra->struct_consts == make_I(q(6)).algebra->struct_consts);

  CHECK(error_code_of([&] {
          check_same_normalization(make_I(q(1)), make_I(q(2)));
        }) == "NotSameState");
}

TEST_CASE("morphisms, pullbacks and admissibility") {
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  PhysMorphism<E> id = identity_phys(phi);
  CHECK(id.admissible());
  CHECK(id.cod_state.functional == phi.functional);
  CHECK(gns_map(id) == Mat<E>::identity(2));

  // unital inclusion of scalars into C({x,y}) against the indefinite state:
  // psi = 0, its radical is everything, but f(1) pairs nontrivially
  auto c2 = make_function_algebra<E>({"x", "y"});
  auto c1 = make_matrix_algebra<E>(1);
  Mat<E> inclm(2, 1);
  inclm(0, 0) = q(1);
  inclm(1, 0) = q(1);
  auto incl = check_homomorphism(c1, c2, inclm);
  State<E> diff = make_state(c2, Vec<E>{q(1), q(-1)});
  PhysMorphism<E> bad = phys_morphism(incl, diff);
  CHECK(!bad.admissible());
  CHECK(bad.cod_state.functional == Vec<E>{q(0)});
  CHECK(error_code_of([&] { gns_map(bad); }) == "NotAdmissible");

  // positive states are always admissible
  State<E> delta = make_state(c2, Vec<E>{q(1), q(0)});
  CHECK(phys_morphism(incl, delta).admissible());
}

TEST_CASE("gns_map of a subalgebra inclusion") {
  auto m2 = make_matrix_algebra<E>(2);
  Element<E> a = make_element(m2, Vec<E>{q(1), q(0), q(0), q(-1)});
  auto sub = generated_subalgebra<E>({a});
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  PhysMorphism<E> m = phys_morphism(sub.inclusion, phi);
  CHECK(m.admissible());
  CHECK(m.cod_gns->gram() == Mat<E>{{q(2), q(0)}, {q(0), q(2)}});
  Mat<E> f = gns_map(m);
  CHECK(f == Mat<E>{{q(1), q(1)}, {q(1), q(-1)}});
  // isometry: <F x, F y>_phi = <x, y>_psi on basis pairs
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      CHECK(form_pair(m.dom_gns->gram(), column_of(f, x), column_of(f, y)) ==
            m.cod_gns->gram()(x, y));
  // omega goes to omega
  CHECK(f * m.cod_gns->omega == m.dom_gns->omega);

  // the covariant map is the adjoint and is a coisometry here
  Mat<E> fc = gns_c(m);
  CHECK(fc * f == Mat<E>::identity(2));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      CHECK(form_pair(m.dom_gns->gram(), column_of(f, x), unit_vec<E>(2, y)) ==
            form_pair(m.cod_gns->gram(), unit_vec<E>(2, x), column_of(fc, y)));
}

TEST_CASE("functoriality of gns_map on a composable pair") {
  auto m2 = make_matrix_algebra<E>(2);
  Element<E> a = make_element(m2, Vec<E>{q(1), q(0), q(0), q(-1)});
  auto sub = generated_subalgebra<E>({a});
  auto c1 = make_matrix_algebra<E>(1);
  Mat<E> unitm(2, 1);
  for (int i = 0; i < 2; ++i) unitm(i, 0) = sub.algebra->unit[i];
  auto unit_incl = check_homomorphism(c1, sub.algebra, unitm);

  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  PhysMorphism<E> m1 = phys_morphism(sub.inclusion, phi);
  PhysMorphism<E> m2m = phys_morphism(unit_incl, m1.cod_state);
  PhysMorphism<E> chain = compose(m2m, m1);
  CHECK(gns_map(chain) == gns_map(m1) * gns_map(m2m));

  CHECK(error_code_of([&] { compose(m1, m2m); }) == "NotComposable");
}

TEST_CASE("claimed codomain states are verified") {
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  auto one = identity_hom(phi.algebra);
  CHECK(phys_morphism_to(one, phi, phi).admissible());
  State<E> doubled = m2_vectorial(Vec<E>{q(1), q(1)});
  doubled.functional = q(2) * doubled.functional;
  doubled.normalization = q(2) * doubled.normalization;
  CHECK(error_code_of([&] {
          phys_morphism_to(one, phi, doubled);
        }) == "NotSameState");
}

TEST_CASE("tensor states and the monoidal comparison") {
  auto cx = make_function_algebra<E>({"x", "y"});
  auto cu = make_function_algebra<E>({"u", "v"});
  State<E> dx = make_state(cx, Vec<E>{q(1), q(0)});
  State<E> du = make_state(cu, Vec<E>{q(1), q(0)});
  Mat<E> iso = monoidal_iso(dx, du);
  CHECK(iso == Mat<E>{{q(1)}});

  State<E> v1 = m2_vectorial(Vec<E>{q(1), q(0)});
  State<E> v2 = m2_vectorial(Vec<E>{q(0), q(1)});
  State<E> t = tensor_state(v1, v2);
  GnsSpace<E> gt = gns(t);
  CHECK(gt.dim() == 4);
  Mat<E> iso2 = monoidal_iso(v1, v2);
  GnsSpace<E> g1 = gns(v1);
  GnsSpace<E> g2 = gns(v2);
  Mat<E> kg = kron(g1.gram(), g2.gram());
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      CHECK(form_pair(gt.gram(), column_of(iso2, x), column_of(iso2, y)) == kg(x, y));

  // the unit state is a monoidal unit: phi (x) I_1 has the same gns dimension
  State<E> unit_t = tensor_state(v1, make_I(q(1)));
  CHECK(gns(unit_t).dim() == gns(v1).dim());
}

TEST_CASE("naturality of the monoidal comparison") {
  auto m2 = make_matrix_algebra<E>(2);
  Element<E> a = make_element(m2, Vec<E>{q(1), q(0), q(0), q(-1)});
  auto sub = generated_subalgebra<E>({a});
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  State<E> rho = m2_vectorial(Vec<E>{q(1), q(0)});
  PhysMorphism<E> m = phys_morphism(sub.inclusion, phi);
  PhysMorphism<E> idr = identity_phys(rho);
  PhysMorphism<E> mt = tensor_phys(m, idr);
  CHECK(mt.admissible());
  // iso_dom o (gns_map(m) (x) gns_map(id)) = gns_map(m (x) id) o iso_cod
  Mat<E> lhs = monoidal_iso(m.dom_state, rho) * kron(gns_map(m), gns_map(idr));
  Mat<E> rhs = gns_map(mt) * monoidal_iso(m.cod_state, idr.cod_state);
  CHECK(lhs == rhs);
}

TEST_CASE("dinaturality of vector states") {
  auto m2 = make_matrix_algebra<E>(2);
  Element<E> a = make_element(m2, Vec<E>{q(1), q(0), q(0), q(-1)});
  auto sub = generated_subalgebra<E>({a});
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  PhysMorphism<E> m = phys_morphism(sub.inclusion, phi);
  Mat<E> f = gns_map(m);
  Vec<E> v{q(1), q(2)};  // a vector in GNS(psi)
  State<E> through_phi = vector_state(*m.dom_gns, f * v);
  State<E> pulled = pullback_state(m.hom, through_phi);
  State<E> direct = vector_state(*m.cod_gns, v);
  CHECK(pulled.functional == direct.functional);
}

TEST_CASE("cyclic isomorphism against a concrete module") {
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(0)});
  GnsSpace<E> g = gns(phi);
  CyclicModule<E> concrete{2, phi.algebra->faithful_rep->mats, Mat<E>::identity(2),
                           Vec<E>{q(1), q(0)}};
  Mat<E> t = cyclic_isomorphism(g, concrete);
  CHECK(t == Mat<E>::identity(2));

  // a permuted copy of the module is matched by the permutation
  CyclicModule<E> perm = concrete;
  Mat<E> p{{q(0), q(1)}, {q(1), q(0)}};
  for (auto& mt : perm.actions) mt = p * mt * p;
  perm.omega = p * perm.omega;
  Mat<E> t2 = cyclic_isomorphism(g, perm);
  CHECK(t2 == p);

  CyclicModule<E> wrong = concrete;
  wrong.omega = Vec<E>{q(0), q(1)};
  CHECK(error_code_of([&] { cyclic_isomorphism(g, wrong); }) == "NotSameState");

  // the identity module viewed through the gns space itself
  Mat<E> t3 = cyclic_isomorphism(g, as_cyclic_module(g));
  CHECK(t3 == Mat<E>::identity(2));
}

TEST_CASE("conjugate states and their gns spaces") {
  auto m2 = make_matrix_algebra<E>(2);
  State<E> phi = vectorial_state(m2, Vec<E>{q(1), scalar_i<E>()});
  State<E> bar = conjugate_state(phi);
  CHECK(conjugate_state(bar).functional == phi.functional);
  auto rep = verify_conjugate_gns(phi);
  CHECK(rep.pivots_match);
  CHECK(rep.gram_is_conjugate);
  CHECK(rep.ok);

  auto cx = make_function_algebra<E>({"x", "y"});
  State<E> real_state = make_state(cx, Vec<E>{q(1), q(2)});
  CHECK(conjugate_state(real_state).functional == real_state.functional);
  CHECK(verify_conjugate_gns(real_state).ok);
}

TEST_CASE("schrodinger lifts") {
  auto m2 = make_matrix_algebra<E>(2);
  Vec<E> psi{q(1), q(0)};

  SUBCASE("identity") {
    auto lift = lift_schrodinger(Mat<E>::identity(2), psi, m2);
    CHECK(lift.unitary);
    CHECK(lift.morphism.admissible());
    CHECK(lift.embed_lifted == lift.embed_base);
    CHECK(gns_map(lift.morphism) == Mat<E>::identity(2));
  }

  SUBCASE("flip unitary: the corollary applies") {
    Mat<E> u{{q(0), q(1)}, {q(1), q(0)}};
    auto lift = lift_schrodinger(u, psi, m2);
    CHECK(lift.unitary);
    // the concrete content: embeddings intertwine along U on both pictures
    CHECK(lift.embed_lifted == u * lift.embed_base);
    Mat<E> gc = gns_c(lift.morphism);
    CHECK(lift.embed_lifted * gc == u * lift.embed_base);
  }

  SUBCASE("strict isometry embeds the scalars") {
    auto c1 = make_matrix_algebra<E>(1);
    Mat<E> u(2, 1);
    u(0, 0) = q(1);
    auto lift = lift_schrodinger(u, Vec<E>{q(1)}, c1);
    CHECK(!lift.unitary);
    REQUIRE(lift.embedded.size() == 1);
    CHECK(lift.embedded[0] == Mat<E>{{q(1), q(0)}, {q(0), q(0)}});
    CHECK(lift.embed_lifted == u * lift.embed_base);
  }

  SUBCASE("rejections") {
    CHECK(error_code_of([&] {
            lift_schrodinger(Mat<E>{{q(2)}}, Vec<E>{q(1)}, make_matrix_algebra<E>(1));
          }) == "NotIsometric");
    CHECK(error_code_of([&] {
            lift_schrodinger(Mat<E>::identity(3), Vec<E>{q(1), q(0), q(0)}, m2);
          }) == "NotFaithful");
    CHECK(error_code_of([&] {
            lift_schrodinger(Mat<E>::identity(2), Vec<E>(2, E{}), m2);
          }) == "IsotropicState");
  }
}

TEST_CASE("composite axioms for normalized tensor pairs") {
  auto cx = make_function_algebra<E>({"x", "y"});
  auto cu = make_function_algebra<E>({"u", "v"});
  State<E> dx = make_state(cx, Vec<E>{q(1), q(0)});
  State<E> du = make_state(cu, Vec<E>{q(1), q(0)});
  auto rep = composite_axiom_check(dx, du);
  CHECK(rep.ok);

  State<E> v1 = normalize(m2_vectorial(Vec<E>{q(1), q(1)}));
  State<E> v2 = normalize(m2_vectorial(Vec<E>{q(1), q(0)}));
  CHECK(composite_axiom_check(v1, v2).ok);

  CHECK(error_code_of([&] {
          composite_axiom_check(make_I(q(2)), make_I(q(1)));
        }) == "NotNormalized");
}

TEST_CASE("orthonormal frames need the float backend") {
  State<F> phi = vectorial_state(make_matrix_algebra<F>(2), Vec<F>{F(1), F(1)});
  auto m2 = make_matrix_algebra<F>(2);
  Element<F> a = make_element(m2, Vec<F>{F(1), F(0), F(0), F(-1)});
  auto sub = generated_subalgebra<F>({a});
  PhysMorphism<F> m = phys_morphism(sub.inclusion, phi);
  Mat<F> t = orthonormal_frame(*m.cod_gns);  // gram diag(2,2)
  const Mat<F>& gram = m.cod_gns->gram();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      F lhs = form_pair(gram, unit_vec<F>(2, x), unit_vec<F>(2, y));
      F rhs{};
      Vec<F> tx = t * unit_vec<F>(2, x), ty = t * unit_vec<F>(2, y);
      for (int r2 = 0; r2 < 2; ++r2) rhs += conj_s(ty[r2]) * tx[r2];
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }

  GnsSpace<E> ge = gns(m2_vectorial(Vec<E>{q(1), q(0)}));
  CHECK(error_code_of([&] { orthonormal_frame(ge); }) == "BackendError");

  auto c2 = make_function_algebra<F>({"x", "y"});
  GnsSpace<F> indef = gns(make_state(c2, Vec<F>{F(1), F(-1)}));
  CHECK(error_code_of([&] { orthonormal_frame(indef); }) == "NotPositive");
}

TEST_CASE("radical lemma for positive states") {
  // vectors with zero self-pairing lie in the radical
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  GnsSpace<E> g = gns(phi);
  const Mat<E>& gf = g.gram_full();
  for (const auto& r : g.radical_basis()) {
    CHECK(form_pair(gf, r, r) == q(0));
  }
  // and conversely: a combination of radical vectors stays isotropic
  REQUIRE(g.radical_basis().size() == 2);
  Vec<E> mix = g.radical_basis()[0] + q(3) * g.radical_basis()[1];
  CHECK(form_pair(gf, mix, mix) == q(0));
  CHECK(is_zero_vec(transpose(gf) * mix));
}
