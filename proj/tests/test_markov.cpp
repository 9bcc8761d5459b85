#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "gnslab/markov.hpp"
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

// The diagonal-part map a |-> (a + uau*)/2 for u = diag(1,-1): a completely
// positive unital map that is not a homomorphism.
StarLinearMap<E> diagonal_part(const AlgebraPtr<E>& m2) {
  Mat<E> f(4, 4);
  f(0, 0) = q(1);
  f(3, 3) = q(1);
  return check_star_linear(m2, m2, f);
}

StarLinearMap<E> transpose_map(const AlgebraPtr<E>& m2) {
  Mat<E> f(4, 4);
  f(0, 0) = q(1);
  f(2, 1) = q(1);
  f(1, 2) = q(1);
  f(3, 3) = q(1);
  return check_star_linear(m2, m2, f);
}

}  // namespace

TEST_CASE("admissibility of star-linear maps") {
  auto m2 = make_matrix_algebra<E>(2);
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});

  // homomorphisms against positive states are admissible
  Element<E> a = make_element(m2, Vec<E>{q(1), q(0), q(0), q(-1)});
  auto sub = generated_subalgebra<E>({a});
  CHECK(is_admissible_linear(to_linear(sub.inclusion), phi).admissible);

  // completely positive maps against positive states are admissible
  CHECK(is_admissible_linear(diagonal_part(m2), phi).admissible);

  // the indefinite pullback example fails with the unit as witness
  auto c2 = make_function_algebra<E>({"x", "y"});
  auto c1 = make_matrix_algebra<E>(1);
  Mat<E> inclm(2, 1);
  inclm(0, 0) = q(1);
  inclm(1, 0) = q(1);
  auto incl = check_homomorphism(c1, c2, inclm);
  State<E> diff = make_state(c2, Vec<E>{q(1), q(-1)});
  auto res = is_admissible_linear(to_linear(incl), diff);
  CHECK(!res.admissible);
  REQUIRE(res.witness.has_value());
  CHECK(*res.witness == Vec<E>{q(1)});
  CHECK(error_code_of([&] {
          gns_m(to_linear(incl), diff);
        }) == "NotAdmissible");
}

TEST_CASE("quotient transport for a homomorphism matches the functor") {
  auto m2 = make_matrix_algebra<E>(2);
  Element<E> a = make_element(m2, Vec<E>{q(1), q(0), q(0), q(-1)});
  auto sub = generated_subalgebra<E>({a});
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  PhysMorphism<E> pm = phys_morphism(sub.inclusion, phi);
  MarkovMorphism<E> mm = to_markov(pm);
  CHECK(gns_m(mm) == gns_map(pm));
  CHECK(gns_mc(mm) == gns_c(pm));
}

TEST_CASE("quotient transport of the diagonal-part map") {
  auto m2 = make_matrix_algebra<E>(2);
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  MarkovMorphism<E> m = markov_morphism(diagonal_part(m2), phi);
  CHECK(m.admissible());
  CHECK(m.cod_state.functional == Vec<E>{q(1), q(0), q(0), q(1)});
  CHECK(m.cod_gns->gram() == Mat<E>::identity(4));

  Mat<E> t = gns_m(m);
  CHECK(t == Mat<E>{{q(1), q(0), q(0), q(0)}, {q(0), q(0), q(0), q(1)}});
  // Omega transport
  CHECK(t * m.cod_gns->omega == m.dom_gns->omega);
  // not an isometry: the class of E12 has norm one but is sent to zero
  Vec<E> e12 = unit_vec<E>(4, 1);
  CHECK(form_pair(m.cod_gns->gram(), e12, e12) == q(1));
  CHECK(is_zero_vec(t * e12));
  // covariant companion is the adjoint
  Mat<E> tc = gns_mc(m);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 4; ++y)
      CHECK(form_pair(m.dom_gns->gram(), column_of(t, y), unit_vec<E>(2, x)) ==
            form_pair(m.cod_gns->gram(), unit_vec<E>(4, y), column_of(tc, x)));
}

TEST_CASE("identity and chains") {
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  MarkovMorphism<E> id = identity_markov(phi);
  CHECK(gns_m(id) == Mat<E>::identity(2));
  CHECK(gns_mc(id) == Mat<E>::identity(2));

  MarkovMorphism<E> empty = evolve(phi, {});
  CHECK(empty.map.matrix == Mat<E>::identity(4));
  CHECK(empty.cod_state.functional == phi.functional);

  CHECK(error_code_of([&] { evolve(std::vector<MarkovMorphism<E>>{}); }) == "NotComposable");
}

TEST_CASE("complete positivity certificates") {
  auto m2 = make_matrix_algebra<E>(2);

  SUBCASE("homomorphisms are completely positive and unital") {
    Mat<E> flip(4, 4);
    flip(3, 0) = q(1);
    flip(2, 1) = q(1);
    flip(1, 2) = q(1);
    flip(0, 3) = q(1);
    auto hom = check_homomorphism(m2, m2, flip);
    auto cert = is_completely_positive(to_linear(hom));
    CHECK(cert.cp);
    REQUIRE(cert.map.has_value());
    CHECK(cert.map->unital);
    CHECK(cert.choi.rows == 8);
  }

  SUBCASE("the transpose is not completely positive") {
    auto cert = is_completely_positive(transpose_map(m2));
    CHECK(!cert.cp);
    REQUIRE(cert.witness.has_value());
    E val = quad_form(cert.choi, *cert.witness, *cert.witness);
    CHECK(is_real(val));
    CHECK(val.re < 0);
  }

  SUBCASE("transpose Choi spectrum in floating point") {
    auto m2f = make_matrix_algebra<F>(2);
    Mat<F> f(4, 4);
    f(0, 0) = F(1);
    f(2, 1) = F(1);
    f(1, 2) = F(1);
    f(3, 3) = F(1);
    auto cert = is_completely_positive(check_star_linear(m2f, m2f, f));
    CHECK(!cert.cp);
    auto clusters = spectral_clusters(cert.choi, ToleranceConfig{});
    REQUIRE(clusters.size() == 2);
    CHECK(std::abs(clusters[0].eigenvalue - F(-1)) < 1e-12);
    CHECK(std::abs(clusters[1].eigenvalue - F(1)) < 1e-12);
    F tr0{}, tr1{};
    for (int i = 0; i < 8; ++i) {
      tr0 += clusters[0].projection(i, i);
      tr1 += clusters[1].projection(i, i);
    }
    CHECK(std::abs(tr0 - F(2)) < 1e-10);
    CHECK(std::abs(tr1 - F(6)) < 1e-10);
  }

  SUBCASE("corner compression is completely positive but not unital") {
    Mat<E> f(4, 4);
    f(0, 0) = q(1);  // E11 a E11 keeps only the (1,1) entry
    auto cert = is_completely_positive(check_star_linear(m2, m2, f));
    CHECK(cert.cp);
    REQUIRE(cert.map.has_value());
    CHECK(!cert.map->unital);
  }

  SUBCASE("composites of certified maps stay certified") {
    Mat<E> corner(4, 4);
    corner(0, 0) = q(1);
    auto f = check_star_linear(m2, m2, corner);
    auto g = diagonal_part(m2);
    auto cert = is_completely_positive(compose(g, f));
    CHECK(cert.cp);
  }

  SUBCASE("missing representations are rejected") {
    StarAlgebra<E> bare = *make_matrix_algebra<E>(1);
    bare.faithful_rep.reset();
    auto a = make_algebra(std::move(bare));
    CHECK(error_code_of([&] {
            is_completely_positive(identity_linear(a));
          }) == "NoFaithfulRep");
  }
}

TEST_CASE("stinespring dilation of the identity map") {
  auto m2 = make_matrix_algebra<E>(2);
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  auto d = stinespring(identity_linear(m2), phi);
  CHECK(d.h_dim == 2);
  // V is a form isometry here because the map is unital
  GnsSpace<E> g = gns(phi);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      CHECK(form_pair(d.form, column_of(d.v, x), column_of(d.v, y)) == g.gram()(x, y));
  // pi is unital
  Mat<E> punit(d.h_dim, d.h_dim);
  for (int i = 0; i < 4; ++i) punit = punit + m2->unit[i] * d.pi[i];
  CHECK(punit == Mat<E>::identity(d.h_dim));
}

TEST_CASE("stinespring dilation of a corner compression") {
  auto m2 = make_matrix_algebra<E>(2);
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  Mat<E> corner(4, 4);
  corner(0, 0) = q(1);
  auto f = check_star_linear(m2, m2, corner);
  auto d = stinespring(f, phi);
  CHECK(d.h_dim == 2);
  // the representation respects the star through the form
  for (int t = 0; t < 4; ++t) {
    Vec<E> st = star_coords(*m2, unit_vec<E>(4, t));
    Mat<E> pist(d.h_dim, d.h_dim);
    for (int i = 0; i < 4; ++i) pist = pist + st[i] * d.pi[i];
    CHECK(adjoint_wrt_forms(d.pi[t], d.form, d.form) == pist);
  }
}

TEST_CASE("stinespring rejects non-cp maps and bad states") {
  auto m2 = make_matrix_algebra<E>(2);
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  CHECK(error_code_of([&] { stinespring(transpose_map(m2), phi); }) == "NotCP");

  State<E> bad = make_state(m2, Vec<E>{q(0), q(0), q(0), q(-1)});
  CHECK(error_code_of([&] {
          stinespring(identity_linear(m2), bad);
        }) == "NotPositive");
}

TEST_CASE("conditioning by a rank-one projection") {
  auto m2 = make_matrix_algebra<E>(2);
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  Element<E> p = basis_element(m2, 0);  // E11
  auto c = conditioning(p, phi);
  const auto& rep = c.report;

  CHECK(rep.collapse_probability == q(1));
  CHECK(rep.p_expectation == q(1));
  CHECK(rep.collapsed_vector == Vec<E>{q(1), q(0)});
  CHECK(rep.j == Mat<E>::identity(2));
  CHECK(rep.m == Mat<E>{{q(1), q(0)}, {q(0), q(0)}});
  CHECK(rep.mc == Mat<E>{{q(1), q(0)}, {q(0), q(0)}});
  CHECK(rep.j_isometric);
  CHECK(rep.factorized);
  CHECK(rep.omega_matches);
  CHECK(rep.composite_checked);
  CHECK(rep.composite_is_p);
  CHECK(rep.ok);

  // the post-collapse state, rescaled, is the vectorial state at P.Omega
  State<E> collapsed = normalize(c.morphism.cod_state);
  CHECK(collapsed.functional == m2_vectorial(Vec<E>{q(1), q(0)}).functional);
}

TEST_CASE("conditioning edge projections") {
  auto m2 = make_matrix_algebra<E>(2);
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});

  SUBCASE("the unit is the identity process") {
    auto c = conditioning(unit_element(m2), phi);
    CHECK(c.report.collapse_probability == q(2));
    CHECK(c.morphism.cod_state.functional == phi.functional);
    CHECK(c.report.m == Mat<E>::identity(2));
    CHECK(c.report.ok);
  }

  SUBCASE("the zero projection annihilates") {
    auto c = conditioning(make_element(m2, Vec<E>(4, E{})), phi);
    CHECK(c.report.collapse_probability == q(0));
    CHECK(c.morphism.cod_gns->dim() == 0);
    CHECK(!c.report.composite_checked);
    CHECK(c.report.ok);
  }

  SUBCASE("rejections") {
    CHECK(error_code_of([&] {
            conditioning(basis_element(m2, 1), phi);
          }) == "NotProjection");
    State<E> bad = make_state(m2, Vec<E>{q(0), q(0), q(0), q(-1)});
    CHECK(error_code_of([&] {
            conditioning(basis_element(m2, 0), bad);
          }) == "NotPositive");
  }
}

TEST_CASE("conditioning is idempotent and multiplicative on commuting projections") {
  auto c3 = make_function_algebra<E>({"x", "y", "z"});
  State<E> phi = make_state(c3, Vec<E>{q(1), q(1), q(1)});
  Element<E> p = make_element(c3, Vec<E>{q(1), q(1), q(0)});
  Element<E> qproj = make_element(c3, Vec<E>{q(0), q(1), q(1)});

  auto c1 = conditioning(p, phi);
  auto c2 = conditioning(p, c1.morphism.cod_state);
  CHECK(c2.morphism.cod_state.functional == c1.morphism.cod_state.functional);
  MarkovMorphism<E> twice = evolve(phi, {c1.morphism, c2.morphism});
  CHECK(twice.map.matrix == c1.morphism.map.matrix);
  CHECK(gns_m(twice) == gns_m(c1.morphism) * gns_m(c2.morphism));

  auto cq = conditioning(qproj, c1.morphism.cod_state);
  MarkovMorphism<E> both = evolve(phi, {c1.morphism, cq.morphism});
  Element<E> meet = mul(qproj, p);  // 1_y
  auto direct = conditioning(meet, phi);
  CHECK(both.map.matrix == direct.morphism.map.matrix);
  CHECK(both.cod_state.functional == direct.morphism.cod_state.functional);

  CHECK(error_code_of([&] {
          evolve(phi, {c1.morphism, c1.morphism});
        }) == "NotComposable");
}

TEST_CASE("transport is monoidal against the comparison isomorphism") {
  auto m2 = make_matrix_algebra<E>(2);
  State<E> phi = m2_vectorial(Vec<E>{q(1), q(1)});
  MarkovMorphism<E> m = markov_morphism(diagonal_part(m2), phi);
  MarkovMorphism<E> idr = identity_markov(m2_vectorial(Vec<E>{q(1), q(0)}));
  MarkovMorphism<E> mt = tensor_markov(m, idr);
  CHECK(mt.admissible());
  Mat<E> lhs = monoidal_iso(m.dom_state, idr.dom_state) * kron(gns_m(m), gns_m(idr));
  Mat<E> rhs = gns_m(mt) * monoidal_iso(m.cod_state, idr.cod_state);
  CHECK(lhs == rhs);
}

TEST_CASE("scattering through a two-level field") {
  Mat<E> i_in(2, 1);
  i_in(0, 0) = q(1);
  Mat<E> p_out(1, 2);
  p_out(0, 0) = q(1);
  Vec<E> v{q(1)};

  SUBCASE("identity S is the identity process") {
    auto sc = scattering(Mat<E>::identity(2), i_in, p_out, v);
    CHECK(sc.w == Mat<E>{{q(1)}});
    CHECK(sc.transition_probability == q(1));
    CHECK(sc.probability_bounded);
    CHECK(sc.intertwines);
    CHECK(sc.ok);
  }

  SUBCASE("a flip sends the channel to its complement") {
    Mat<E> flip{{q(0), q(1)}, {q(1), q(0)}};
    auto sc = scattering(flip, i_in, p_out, v);
    CHECK(sc.w == Mat<E>{{q(0)}});
    CHECK(sc.transition_probability == q(0));
    CHECK(sc.morphism.cod_gns->dim() == 0);
    CHECK(sc.ok);
  }

  SUBCASE("rejections") {
    CHECK(error_code_of([&] {
            scattering(Mat<E>{{q(2), q(0)}, {q(0), q(1)}}, i_in, p_out, v);
          }) == "NotUnitary");
    Mat<E> skew(2, 1);
    skew(0, 0) = q(1);
    skew(1, 0) = q(1);
    CHECK(error_code_of([&] {
            scattering(Mat<E>::identity(2), skew, p_out, v);
          }) == "NotIsometric");
    CHECK(error_code_of([&] {
            scattering(Mat<E>::identity(2), i_in, p_out, Vec<E>{q(1), q(0)});
          }) == "ShapeMismatch");
  }
}

TEST_CASE("scattering through a permutation on three modes") {
  Mat<E> s(3, 3);  // cycle e1 -> e2 -> e3 -> e1
  s(1, 0) = q(1);
  s(2, 1) = q(1);
  s(0, 2) = q(1);
  Mat<E> i_in(3, 2);
  i_in(0, 0) = q(1);
  i_in(1, 1) = q(1);
  Mat<E> p_out(2, 3);
  p_out(0, 1) = q(1);
  p_out(1, 2) = q(1);
  auto sc = scattering(s, i_in, p_out, Vec<E>{q(1), q(1)});
  CHECK(sc.w == Mat<E>::identity(2));
  CHECK(sc.transition_probability == q(2));
  CHECK(sc.probability_bounded);
  CHECK(sc.intertwines);
  CHECK(sc.ok);
}

TEST_CASE("scattering amplitude in floating point") {
  const double r = 1.0 / std::sqrt(2.0);
  Mat<F> had{{F(r), F(r)}, {F(r), F(-r)}};
  Mat<F> i_in(2, 1);
  i_in(0, 0) = F(1);
  Mat<F> p_out(1, 2);
  p_out(0, 0) = F(1);
  auto sc = scattering(had, i_in, p_out, Vec<F>{F(1)});
  CHECK(std::abs(sc.transition_probability - F(0.5)) < 1e-12);
  CHECK(sc.ok);
}
