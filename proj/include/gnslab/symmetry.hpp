#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gnslab/markov.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// Finite group actions on states: a multiplication table, a preserved state,
// and one automorphism of its algebra per group element (left action).

template <class K>
struct GroupAction {
  std::vector<std::vector<int>> group;  // g * h = group[g][h]
  State<K> state;
  std::vector<StarHomomorphism<K>> automorphisms;
  int identity = 0;
};

namespace detail {

inline int group_identity(const std::vector<std::vector<int>>& table) {
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
        if (table[table[i][j]][k] != table[i][table[j][k]]) fail("NotAGroup", "associativity fails");
  int e = -1;
  for (int c = 0; c < n; ++c) {
    bool unit = true;
    for (int g = 0; g < n; ++g) unit = unit && table[c][g] == g && table[g][c] == g;
    if (unit) {
      e = c;
      break;
    }
  }
  if (e < 0) fail("NotAGroup", "no identity element");
  for (int g = 0; g < n; ++g) {
    bool has_inverse = false;
    for (int h = 0; h < n; ++h) has_inverse = has_inverse || table[g][h] == e;
    if (!has_inverse) fail("NotAGroup", "element " + std::to_string(g) + " has no inverse");
  }
  return e;
}

inline std::vector<int> group_inverses(const std::vector<std::vector<int>>& table, int e) {
  std::vector<int> inv(table.size(), e);
  for (int g = 0; g < static_cast<int>(table.size()); ++g)
    for (int h = 0; h < static_cast<int>(table.size()); ++h)
      if (table[g][h] == e) {
        inv[g] = h;
        break;
      }
  return inv;
}

}  // namespace detail

template <class K>
GroupAction<K> group_action(std::vector<std::vector<int>> table, State<K> state,
                            std::vector<StarHomomorphism<K>> automorphisms,
                            const ToleranceConfig& tol = {}) {
  const int e = detail::group_identity(table);
  const int n = static_cast<int>(table.size());
  if (static_cast<int>(automorphisms.size()) != n)
    fail("ShapeMismatch", "one automorphism per group element");
  for (const auto& f : automorphisms) {
    if (!same_algebra(f.dom, state.algebra) || !same_algebra(f.cod, state.algebra))
      fail("AlgebraMismatch", "automorphisms must act on the state's algebra");
  }
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) {
    double s = 1.0;
    for (const auto& f : automorphisms) s = std::max(s, mat_scale(f.matrix));
    eps = tol.spec_tol * s * std::max(1.0, vec_scale(state.functional));
  }
  if (!detail::near_equal_mat(automorphisms[e].matrix, Mat<K>::identity(state.algebra->dim), eps))
    fail("NotAnAction", "the identity element acts nontrivially");
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h)
      if (!detail::near_equal_mat(automorphisms[g].matrix * automorphisms[h].matrix,
                                  automorphisms[table[g][h]].matrix, eps))
        fail("NotAnAction", "alpha(g) alpha(h) != alpha(gh) at (" + std::to_string(g) + ", " +
                                std::to_string(h) + ")");
  for (int g = 0; g < n; ++g) {
    State<K> pulled = pullback_state(automorphisms[g], state);
    if (!detail::near_equal_vec(pulled.functional, state.functional, eps))
      fail("NotAnAction", "the state is not invariant under element " + std::to_string(g));
  }
  return GroupAction<K>{std::move(table), std::move(state), std::move(automorphisms), e};
}

// Product of two actions: the direct-product group acting factorwise on the
// tensor state, element (g, h) at index g * |G'| + h.
template <class K>
GroupAction<K> action_tensor(const GroupAction<K>& x, const GroupAction<K>& y,
                             const ToleranceConfig& tol = {}) {
  const int nx = static_cast<int>(x.group.size());
  const int ny = static_cast<int>(y.group.size());
  std::vector<std::vector<int>> table(nx * ny, std::vector<int>(nx * ny, 0));
  for (int g1 = 0; g1 < nx; ++g1)
    for (int h1 = 0; h1 < ny; ++h1)
      for (int g2 = 0; g2 < nx; ++g2)
        for (int h2 = 0; h2 < ny; ++h2)
          table[g1 * ny + h1][g2 * ny + h2] = x.group[g1][g2] * ny + y.group[h1][h2];
  State<K> prod = tensor_state(x.state, y.state);
  std::vector<StarHomomorphism<K>> autos;
  for (int g = 0; g < nx; ++g)
    for (int h = 0; h < ny; ++h) {
      StarHomomorphism<K> t = tensor_hom(x.automorphisms[g], y.automorphisms[h]);
      autos.push_back({prod.algebra, prod.algebra, std::move(t.matrix)});
    }
  return group_action(std::move(table), std::move(prod), std::move(autos), tol);
}

// ---------------------------------------------------------------------------
// Equivariant transport. The covariant GNS image of the process of g (whose
// carrier hom is alpha(g^-1), so that g |-> process(g) composes covariantly)
// is a gram-unitary fixing omega, multiplicative over the table, and
// intertwining the module actions: U(g) action(b) = action(alpha(g) b) U(g).

template <class K>
struct UnitaryRep {
  int dim = 0;
  Mat<K> gram;
  std::vector<Mat<K>> matrices;  // one per group element
};

template <class K>
UnitaryRep<K> equivariant_gns(const GroupAction<K>& action, const ToleranceConfig& tol = {}) {
  GroupAction<K> act = group_action(action.group, action.state, action.automorphisms, tol);
  if (!is_positive(act.state, tol).psd)
    fail("NotPositive", "equivariant transport needs a positive state");
  GnsSpace<K> g = gns(act.state, tol);
  const int n = static_cast<int>(act.group.size());
  const int q = g.dim();
  const std::vector<int> inv = detail::group_inverses(act.group, act.identity);

  UnitaryRep<K> rep;
  rep.dim = q;
  rep.gram = g.gram();
  for (int c = 0; c < n; ++c) {
    PhysMorphism<K> m = phys_morphism(act.automorphisms[inv[c]], act.state, tol);
    rep.matrices.push_back(gns_c(m, tol));
  }

  double eps = 0.0;
  if constexpr (!is_exact_v<K>) {
    double s = std::max(1.0, mat_scale(rep.gram));
    for (const auto& u : rep.matrices) s = std::max(s, mat_scale(u));
    eps = tol.spec_tol * s * s;
  }
  auto guard = [&](bool okay, const std::string& law) {
    if (!okay) fail("BackendError", "equivariant transport broke: " + law);
  };
  guard(detail::near_equal_mat(rep.matrices[act.identity], Mat<K>::identity(q), eps),
        "U(e) != identity");
  for (int c = 0; c < n; ++c) {
    const Mat<K>& u = rep.matrices[c];
    guard(detail::near_equal_vec(u * g.omega, g.omega, eps), "U(g) moves omega");
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        guard(detail::near_equal_scalar(
                  form_pair(rep.gram, column_of(u, a), column_of(u, b)), rep.gram(a, b), eps),
              "U(g) is not gram-unitary");
    for (int h = 0; h < n; ++h)
      guard(detail::near_equal_mat(u * rep.matrices[h], rep.matrices[act.group[c][h]], eps),
            "U(g) U(h) != U(gh)");
    for (int b = 0; b < act.state.algebra->dim; ++b) {
      Vec<K> moved = act.automorphisms[c].matrix * unit_vec<K>(act.state.algebra->dim, b);
      guard(detail::near_equal_mat(u * g.actions[b], g.action_of(moved) * u, eps),
            "covariance fails at " + act.state.algebra->labels[b]);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Antiunitary operators as matrix-plus-conjugation pairs; composition tracks
// the conjugation parity.

template <class K>
struct Antiunitary {
  Mat<K> mat;
  bool conjugates = true;
};

template <class K>
Vec<K> apply(const Antiunitary<K>& t, const Vec<K>& x) {
  return t.conjugates ? t.mat * conjugate(x) : t.mat * x;
}

// g after f.
template <class K>
Antiunitary<K> compose(const Antiunitary<K>& g, const Antiunitary<K>& f) {
  Mat<K> m = g.conjugates ? g.mat * conjugate(f.mat) : g.mat * f.mat;
  return {std::move(m), g.conjugates != f.conjugates};
}

// +1 / -1 when the square is plus or minus the identity; empty otherwise.
template <class K>
std::optional<int> square_sign(const Antiunitary<K>& t, const ToleranceConfig& tol = {}) {
  Antiunitary<K> sq = compose(t, t);
  if (sq.conjugates || sq.mat.rows != sq.mat.cols) return std::nullopt;
  double eps = 0.0;
  if constexpr (!is_exact_v<K>) eps = tol.spec_tol * std::max(1.0, mat_scale(sq.mat));
  Mat<K> id = Mat<K>::identity(sq.mat.rows);
  if (detail::near_equal_mat(sq.mat, id, eps)) return 1;
  Mat<K> neg(id.rows, id.cols);
  for (int i = 0; i < id.rows; ++i) neg(i, i) = -scalar_from_int<K>(1);
  if (detail::near_equal_mat(sq.mat, neg, eps)) return -1;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Time reversal: an isomorphism from the conjugate state onto the state,
// composed with the canonical conjugation identification of the conjugate
// GNS space with the entrywise-conjugated one, is an antiunitary on GNS(phi).

template <class K>
struct TimeReversal {
  Antiunitary<K> op;
  Mat<K> gram;                // form of the underlying GNS space
  Mat<K> square;              // linear part of op applied twice
  std::optional<int> sign;    // square = sign * identity when classifiable
  bool form_swapped = false;  // <T x, T y> = <y, x>
};

template <class K>
TimeReversal<K> time_reversal(const PhysMorphism<K>& iso, const ToleranceConfig& tol = {}) {
  const State<K>& phi = iso.cod_state;
  if (!same_algebra(iso.dom_state.algebra, conjugate_algebra(phi.algebra)))
    fail("AlgebraMismatch", "the witness must start on the conjugate presentation");
  double eps = 0.0;
  if constexpr (!is_exact_v<K>)
    eps = tol.spec_tol * std::max(1.0, vec_scale(phi.functional));
  if (!detail::near_equal_vec(iso.dom_state.functional, conjugate(phi.functional), eps))
    fail("NotSameState", "the witness must start at the conjugate state");
  if (!is_positive(phi, tol).psd) fail("NotPositive", "time reversal needs a positive state");
  if (!inverse(iso.hom.matrix, tol)) fail("NotInvertible", "the witness is not invertible");

  Mat<K> m = gns_map(iso);
  if (!inverse(m, tol)) fail("NotInvertible", "the transported witness is not invertible");

  TimeReversal<K> out;
  out.op = {conjugate(m), true};
  out.gram = iso.cod_gns->gram();

  double feps = 0.0;
  if constexpr (!is_exact_v<K>)
    feps = tol.spec_tol * std::max(1.0, mat_scale(out.op.mat)) *
           std::max(1.0, mat_scale(out.op.mat)) * std::max(1.0, mat_scale(out.gram));
  Mat<K> swapped = transpose(out.op.mat) * out.gram * conjugate(out.op.mat);
  out.form_swapped = detail::near_equal_mat(swapped, transpose(out.gram), feps);
  out.square = compose(out.op, out.op).mat;
  out.sign = square_sign(out.op, tol);
  return out;
}

// ---------------------------------------------------------------------------
// Time chains over a finite labeled grid. Arrows carry processes between the
// states at their endpoints; the report states which category of time the
// data realizes: the pair groupoid (Time), the order from the first time on
// (Time_th), or the order from a chosen start (Time_th^t0). Consecutive
// forward steps from the start are the minimum evaluable data; every other
// provided arrow is checked against the composite of the steps it spans.

template <class K>
struct TimeArrow {
  std::string from;
  std::string to;
  MarkovMorphism<K> morphism;
};

template <class K>
TimeArrow<K> time_arrow(std::string from, std::string to, MarkovMorphism<K> m) {
  return {std::move(from), std::move(to), std::move(m)};
}

template <class K>
TimeArrow<K> time_arrow(std::string from, std::string to, const PhysMorphism<K>& m) {
  return {std::move(from), std::move(to), to_markov(m)};
}

struct TimeChainReport {
  bool time_ok = false;        // pair groupoid: consistent and invertible
  bool time_th_ok = false;     // order category from the first time on
  bool time_th_t0_ok = false;  // order category from the chosen start on
  std::string t0;
  std::vector<std::string> notes;
};

template <class K>
TimeChainReport check_time_chain(const std::vector<std::string>& times,
                                 const std::vector<TimeArrow<K>>& arrows, int t0_index = 0,
                                 const ToleranceConfig& tol = {}) {
  const int n = static_cast<int>(times.size());
  if (n < 1) fail("ShapeMismatch", "a time chain needs at least one time");
  if (t0_index < 0 || t0_index >= n) fail("ShapeMismatch", "start index out of range");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (times[i] == times[j]) fail("DuplicateLabel", "time label \"" + times[i] + "\"");

  auto index_of = [&](const std::string& t) -> int {
    for (int i = 0; i < n; ++i)
      if (times[i] == t) return i;
    fail("ShapeMismatch", "arrow references unknown time \"" + t + "\"");
  };
  std::vector<std::pair<std::pair<int, int>, const MarkovMorphism<K>*>> given;
  for (const auto& a : arrows) given.push_back({{index_of(a.from), index_of(a.to)}, &a.morphism});
  auto find_arrow = [&](int i, int j) -> const MarkovMorphism<K>* {
    for (const auto& [key, m] : given)
      if (key.first == i && key.second == j) return m;
    return nullptr;
  };

  double eps = 0.0;
  if constexpr (!is_exact_v<K>) {
    double s = 1.0;
    for (const auto& a : arrows) s = std::max(s, mat_scale(a.morphism.map.matrix));
    eps = tol.spec_tol * s * s;
  }
  auto state_matches = [&](const State<K>& a, const State<K>& b) {
    return same_algebra(a.algebra, b.algebra) &&
           detail::near_equal_vec(a.functional, b.functional, eps);
  };

  TimeChainReport rep;
  rep.t0 = times[t0_index];

  // Consecutive steps from lo on; the suffix from t0 is mandatory.
  auto collect_steps =
      [&](int lo, bool mandatory) -> std::optional<std::vector<MarkovMorphism<K>>> {
    std::vector<MarkovMorphism<K>> steps;
    for (int i = lo; i + 1 < n; ++i) {
      const MarkovMorphism<K>* m = find_arrow(i, i + 1);
      if (!m) {
        if (mandatory) fail("MissingArrow", "no arrow from " + times[i] + " to " + times[i + 1]);
        return std::nullopt;
      }
      steps.push_back(*m);
    }
    return steps;
  };

  struct Verdict {
    bool poset = true;  // forward arrows match composites, diagonals are identities
    bool group = true;  // steps invertible, backward arrows invert the composites
  };
  auto assess = [&](int lo, const std::vector<MarkovMorphism<K>>& steps, int note_below) {
    Verdict v;
    auto composite = [&](int i, int j) {
      std::vector<MarkovMorphism<K>> part(steps.begin() + (i - lo), steps.begin() + (j - lo));
      return evolve(steps[i - lo].dom_state, part, tol);
    };
    auto note = [&](int i, int j, const std::string& what) {
      if (std::min(i, j) < note_below)
        rep.notes.push_back("U(" + times[i] + ", " + times[j] + ") " + what);
    };
    for (const auto& [key, mp] : given) {
      auto [i, j] = key;
      if (i < lo || j < lo) continue;
      const MarkovMorphism<K>& m = *mp;
      if (i == j) {
        bool diag = state_matches(m.dom_state, m.cod_state) &&
                    detail::near_equal_mat(m.map.matrix, Mat<K>::identity(m.map.matrix.rows), eps);
        if (!diag) {
          v.poset = false;
          note(i, j, "is not the identity");
        }
      } else if (i < j) {
        MarkovMorphism<K> expect = composite(i, j);
        bool same = state_matches(m.dom_state, expect.dom_state) &&
                    state_matches(m.cod_state, expect.cod_state) &&
                    detail::near_equal_mat(m.map.matrix, expect.map.matrix, eps);
        if (!same) {
          v.poset = false;
          note(i, j, "differs from the composite of the steps");
        }
      } else {
        MarkovMorphism<K> fwd = composite(j, i);
        const Mat<K>& b = m.map.matrix;
        const Mat<K>& f = fwd.map.matrix;
        bool inverts = state_matches(m.dom_state, fwd.cod_state) &&
                       state_matches(m.cod_state, fwd.dom_state) && b.rows == f.cols &&
                       b.cols == f.rows &&
                       detail::near_equal_mat(f * b, Mat<K>::identity(b.cols), eps) &&
                       detail::near_equal_mat(b * f, Mat<K>::identity(b.rows), eps);
        if (!inverts) {
          v.group = false;
          note(i, j, "does not invert the forward composite");
        }
      }
    }
    for (const auto& m : steps)
      if (!inverse(m.map.matrix, tol)) {
        v.group = false;
        if (note_below > 0) rep.notes.push_back("a consecutive step is not invertible");
        break;
      }
    return v;
  };

  std::vector<MarkovMorphism<K>> suffix = *collect_steps(t0_index, true);
  Verdict at_t0 = assess(t0_index, suffix, n);
  rep.time_th_t0_ok = at_t0.poset;
  if (t0_index == 0) {
    rep.time_th_ok = at_t0.poset;
    rep.time_ok = at_t0.poset && at_t0.group;
  } else if (auto full = collect_steps(0, false)) {
    Verdict whole = assess(0, *full, t0_index);
    rep.time_th_ok = whole.poset;
    rep.time_ok = whole.poset && whole.group;
  } else {
    rep.notes.push_back("a step before " + rep.t0 + " is missing");
  }
  return rep;
}

}  // namespace gnslab
