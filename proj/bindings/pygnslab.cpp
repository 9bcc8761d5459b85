#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <string>
#include <vector>

#include "gnslab/error.hpp"
#include "gnslab/gns.hpp"
#include "gnslab/markov.hpp"
#include "gnslab/phys.hpp"
#include "gnslab/prob.hpp"
#include "gnslab/scenario.hpp"
#include "gnslab/star_algebra.hpp"
#include "gnslab/state.hpp"
#include "gnslab/suites.hpp"

namespace py = pybind11;

namespace {

using F = gnslab::FloatScalar;
using CRows = std::vector<std::vector<std::complex<double>>>;

gnslab::Mat<F> to_mat(const CRows& rows) {
  if (rows.empty()) gnslab::fail("ShapeMismatch", "matrix needs at least one row");
  gnslab::Mat<F> m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int r = 0; r < m.rows; ++r) {
    if (static_cast<int>(rows[r].size()) != m.cols)
      gnslab::fail("ShapeMismatch", "matrix rows have inconsistent lengths");
    for (int c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

CRows from_mat(const gnslab::Mat<F>& m) {
  CRows rows(m.rows, std::vector<std::complex<double>>(m.cols));
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) rows[r][c] = m(r, c);
  return rows;
}

struct PyAlgebra {
  gnslab::AlgebraPtr<F> ptr;
};

struct PyState {
  gnslab::State<F> state;
};

gnslab::ToleranceConfig tolerances(double tol) {
  gnslab::ToleranceConfig cfg{};
  if (tol > 0.0) {
    cfg.rank_tol = tol;
    cfg.psd_tol = tol;
    cfg.spec_tol = tol;
  }
  return cfg;
}

gnslab::PhysMorphism<F> morphism_of(const PyAlgebra& dom, const PyAlgebra& cod,
                                    const CRows& matrix, const PyState& on_cod, double tol) {
  gnslab::ToleranceConfig cfg = tolerances(tol);
  gnslab::StarHomomorphism<F> f =
      gnslab::check_homomorphism(dom.ptr, cod.ptr, to_mat(matrix), cfg);
  return gnslab::phys_morphism(f, on_cod.state, cfg);
}

}  // namespace

PYBIND11_MODULE(pygnslab, m) {
  m.doc() = "GNS construction workbench: algebras, states, and their Hilbert spaces";

  py::register_exception<gnslab::Error>(m, "GnsError");

  py::class_<PyAlgebra>(m, "Algebra", "finite-dimensional *-algebra with a faithful representation")
      .def_property_readonly("dim", [](const PyAlgebra& a) { return a.ptr->dim; })
      .def_property_readonly("labels", [](const PyAlgebra& a) { return a.ptr->labels; })
      .def("unit", [](const PyAlgebra& a) { return a.ptr->unit; })
      .def(
          "mul",
          [](const PyAlgebra& a, const gnslab::Vec<F>& x, const gnslab::Vec<F>& y) {
            return gnslab::mul_coords(*a.ptr, x, y);
          },
          py::arg("x"), py::arg("y"))
      .def("star",
           [](const PyAlgebra& a, const gnslab::Vec<F>& x) {
             return gnslab::star_coords(*a.ptr, x);
           })
      .def("__repr__", [](const PyAlgebra& a) {
        return "<Algebra dim=" + std::to_string(a.ptr->dim) + ">";
      });

  py::class_<PyState>(m, "State", "linear functional on an algebra, phi(e_i) tabulated")
      .def_property_readonly("functional", [](const PyState& s) { return s.state.functional; })
      .def_property_readonly("normalization",
                             [](const PyState& s) { return s.state.normalization; })
      .def("__repr__", [](const PyState& s) {
        return "<State on dim=" + std::to_string(s.state.algebra->dim) + ">";
      });

  m.def(
      "matrix_algebra", [](int n) { return PyAlgebra{gnslab::make_matrix_algebra<F>(n)}; },
      py::arg("n"), "full matrix algebra M_n");
  m.def(
      "function_algebra",
      [](const std::vector<std::string>& points) {
        return PyAlgebra{gnslab::make_function_algebra<F>(points)};
      },
      py::arg("points"), "commutative algebra of functions on a finite set");
  m.def(
      "group_algebra",
      [](const std::vector<std::vector<int>>& table) {
        return PyAlgebra{gnslab::make_group_algebra<F>(table)};
      },
      py::arg("table"), "group algebra from a multiplication table");
  m.def(
      "tensor_algebra",
      [](const PyAlgebra& a, const PyAlgebra& b) {
        return PyAlgebra{gnslab::tensor_algebra(a.ptr, b.ptr)};
      },
      py::arg("left"), py::arg("right"));

  m.def(
      "make_state",
      [](const PyAlgebra& a, const gnslab::Vec<F>& functional, double tol) {
        return PyState{gnslab::make_state(a.ptr, functional, tolerances(tol))};
      },
      py::arg("algebra"), py::arg("functional"), py::arg("tol") = 0.0);
  m.def(
      "vectorial_state",
      [](const PyAlgebra& a, const gnslab::Vec<F>& vector, double tol) {
        return PyState{gnslab::vectorial_state(a.ptr, vector, tolerances(tol))};
      },
      py::arg("algebra"), py::arg("vector"), py::arg("tol") = 0.0,
      "state a -> <rep(a) v, v> through the faithful representation");
  m.def(
      "tensor_state",
      [](const PyState& a, const PyState& b) {
        return PyState{gnslab::tensor_state(a.state, b.state)};
      },
      py::arg("left"), py::arg("right"));
  m.def(
      "evaluate",
      [](const PyState& s, const gnslab::Vec<F>& coords) {
        return gnslab::evaluate(s.state, coords);
      },
      py::arg("state"), py::arg("coords"));

  m.def(
      "gns",
      [](const PyState& s, double tol) {
        gnslab::GnsSpace<F> g = gnslab::gns(s.state, tolerances(tol));
        py::dict out;
        out["dim"] = g.dim();
        out["gram"] = from_mat(g.gram());
        out["omega"] = g.omega;
        return out;
      },
      py::arg("state"), py::arg("tol") = 0.0,
      "GNS space of a state: dimension, inner-product matrix, cyclic vector");
  m.def(
      "is_positive",
      [](const PyState& s, double tol) {
        gnslab::PsdResult<F> r = gnslab::is_positive(s.state, tolerances(tol));
        py::dict out;
        out["positive"] = r.psd;
        if (r.witness) out["witness"] = *r.witness;
        return out;
      },
      py::arg("state"), py::arg("tol") = 0.0);

  m.def(
      "born",
      [](const PyState& s, const gnslab::Vec<F>& observable, double tol) {
        gnslab::Element<F> a = gnslab::make_element(s.state.algebra, observable);
        gnslab::SpectralDistribution<F> d =
            gnslab::born_distribution(a, s.state, tolerances(tol));
        py::list entries;
        for (const auto& e : d.entries) {
          py::dict row;
          row["eigenvalue"] = e.eigenvalue;
          row["weight"] = e.weight;
          entries.append(row);
        }
        py::dict out;
        out["entries"] = entries;
        out["total"] = d.total;
        return out;
      },
      py::arg("state"), py::arg("observable"), py::arg("tol") = 0.0,
      "spectral weights the state assigns to a normal observable");
  m.def(
      "ee_link",
      [](const PyState& s, const gnslab::Vec<F>& observable, std::complex<double> lam,
         double tol) {
        gnslab::Element<F> a = gnslab::make_element(s.state.algebra, observable);
        gnslab::EeLinkReport r = gnslab::ee_link_check(a, s.state, F(lam), tolerances(tol));
        py::dict out;
        out["eigenvector"] = r.eigenvector;
        out["almost_everywhere"] = r.almost_everywhere;
        out["full_weight"] = r.full_weight;
        out["agree"] = r.agree;
        return out;
      },
      py::arg("state"), py::arg("observable"), py::arg("lam"), py::arg("tol") = 0.0);

  m.def(
      "transport",
      [](const PyAlgebra& dom, const PyAlgebra& cod, const CRows& matrix, const PyState& state,
         double tol) {
        gnslab::PhysMorphism<F> mo = morphism_of(dom, cod, matrix, state, tol);
        py::dict out;
        out["matrix"] = from_mat(gnslab::gns_map(mo));
        out["pullback"] = mo.cod_state.functional;
        return out;
      },
      py::arg("dom"), py::arg("cod"), py::arg("matrix"), py::arg("state"), py::arg("tol") = 0.0,
      "GNS transport of a *-homomorphism against a state on its codomain");
  m.def(
      "transport_adjoint",
      [](const PyAlgebra& dom, const PyAlgebra& cod, const CRows& matrix, const PyState& state,
         double tol) {
        gnslab::PhysMorphism<F> mo = morphism_of(dom, cod, matrix, state, tol);
        return from_mat(gnslab::gns_c(mo, tolerances(tol)));
      },
      py::arg("dom"), py::arg("cod"), py::arg("matrix"), py::arg("state"), py::arg("tol") = 0.0);

  m.def(
      "collapse",
      [](const PyState& s, const gnslab::Vec<F>& projection, double tol) {
        gnslab::Element<F> p = gnslab::make_element(s.state.algebra, projection);
        gnslab::Conditioning<F> c = gnslab::conditioning(p, s.state, tolerances(tol));
        py::dict out;
        out["probability"] = c.report.collapse_probability;
        out["conditioned"] = c.morphism.cod_state.functional;
        out["isometric"] = c.report.j_isometric;
        out["omega_matches"] = c.report.omega_matches;
        out["ok"] = c.report.ok;
        return out;
      },
      py::arg("state"), py::arg("projection"), py::arg("tol") = 0.0,
      "condition a state on a projection; reports the collapse probability");

  m.def(
      "stinespring",
      [](const PyAlgebra& dom, const PyAlgebra& cod, const CRows& matrix, const PyState& state,
         double tol) {
        gnslab::ToleranceConfig cfg = tolerances(tol);
        gnslab::StarLinearMap<F> f =
            gnslab::check_star_linear(dom.ptr, cod.ptr, to_mat(matrix), cfg);
        gnslab::StinespringDilation<F> d = gnslab::stinespring(f, state.state, cfg);
        py::dict out;
        out["h_dim"] = d.h_dim;
        out["isometry"] = from_mat(d.v);
        return out;
      },
      py::arg("dom"), py::arg("cod"), py::arg("matrix"), py::arg("state"), py::arg("tol") = 0.0,
      "dilate a completely positive map to a representation plus isometry");

  m.def(
      "kernel_to_cp",
      [](const std::vector<std::string>& dom, const std::vector<std::string>& cod,
         const CRows& matrix, double tol) {
        gnslab::ToleranceConfig cfg = tolerances(tol);
        gnslab::MarkovKernel<F> k = gnslab::markov_kernel(dom, cod, to_mat(matrix), cfg);
        gnslab::CpMap<F> c = gnslab::kernel_to_cp(k, cfg);
        py::dict out;
        out["matrix"] = from_mat(c.underlying.matrix);
        out["unital"] = c.unital;
        return out;
      },
      py::arg("dom"), py::arg("cod"), py::arg("matrix"), py::arg("tol") = 0.0);
  m.def(
      "cp_to_kernel",
      [](const PyAlgebra& dom, const PyAlgebra& cod, const CRows& matrix, double tol) {
        gnslab::ToleranceConfig cfg = tolerances(tol);
        gnslab::StarLinearMap<F> f =
            gnslab::check_star_linear(dom.ptr, cod.ptr, to_mat(matrix), cfg);
        gnslab::MarkovKernel<F> k = gnslab::cp_to_kernel(f, cfg);
        py::dict out;
        out["dom"] = k.dom;
        out["cod"] = k.cod;
        out["matrix"] = from_mat(k.matrix);
        return out;
      },
      py::arg("dom"), py::arg("cod"), py::arg("matrix"), py::arg("tol") = 0.0);
  m.def(
      "prism",
      [](const std::vector<std::string>& dom, const std::vector<std::string>& cod,
         const CRows& matrix, const gnslab::Vec<F>& weights, double tol) {
        gnslab::ToleranceConfig cfg = tolerances(tol);
        gnslab::MarkovKernel<F> k = gnslab::markov_kernel(dom, cod, to_mat(matrix), cfg);
        gnslab::FiniteProbSpace<F> mu = gnslab::prob_space(dom, weights, cfg);
        gnslab::PrismReport<F> r = gnslab::prism_compare(k, mu, cfg);
        py::dict out;
        out["match"] = r.match;
        out["gns_matrix"] = from_mat(r.gns_matrix);
        out["cl2_matrix"] = from_mat(r.cl2_matrix);
        return out;
      },
      py::arg("dom"), py::arg("cod"), py::arg("matrix"), py::arg("weights"),
      py::arg("tol") = 0.0,
      "compare the GNS transport of a kernel with its classical L2 form");

  m.def(
      "run_scenario",
      [](const std::string& text, const std::string& backend, double tol, bool normalize) {
        gnslab::Scenario sc = gnslab::Scenario::from_text(text);
        gnslab::RunOptions opts;
        if (!backend.empty()) opts.backend = backend;
        if (tol > 0.0) opts.tol = tol;
        opts.normalize = normalize;
        return sc.run(opts).dump(2);
      },
      py::arg("text"), py::arg("backend") = "", py::arg("tol") = 0.0,
      py::arg("normalize") = false,
      "evaluate a scenario document and return the JSON report");
  m.def(
      "validate_scenario",
      [](const std::string& text) {
        gnslab::Scenario sc = gnslab::Scenario::from_text(text);
        py::list out;
        for (const gnslab::Diagnostic& d : sc.validate()) {
          py::dict row;
          row["code"] = d.code;
          row["where"] = d.where;
          row["message"] = d.message;
          out.append(row);
        }
        return out;
      },
      py::arg("text"), "statically check a scenario document");

  m.def("suite_names", [] { return gnslab::suite_names(); });
  m.def(
      "run_suite",
      [](const std::string& name, std::uint64_t seed) {
        gnslab::SuiteResult r = gnslab::run_suite(name, seed);
        py::dict out;
        out["name"] = r.name;
        out["pass"] = r.pass;
        out["checks"] = r.checks;
        out["wall_ms"] = r.wall_ms;
        out["detail"] = r.detail;
        return out;
      },
      py::arg("name"), py::arg("seed") = gnslab::kDefaultSuiteSeed,
      "run one built-in property suite");
}
