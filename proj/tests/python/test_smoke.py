import json
import math

import pytest

import pygnslab as g


def approx_eq(a, b, eps=1e-9):
    return abs(a - b) <= eps


def test_gns_of_a_vector_state_on_m2():
    m2 = g.matrix_algebra(2)
    assert m2.dim == 4
    phi = g.vectorial_state(m2, [1, 0])
    space = g.gns(phi)
    assert space["dim"] == 2
    assert space["gram"] == [[1, 0], [0, 1]]
    assert space["omega"] == [1, 0]
    assert g.is_positive(phi)["positive"]


def test_algebra_arithmetic_matches_matrix_units():
    m2 = g.matrix_algebra(2)
    e01 = [0, 1, 0, 0]
    e10 = [0, 0, 1, 0]
    # E01 * E10 = E00
    assert g.Algebra.mul(m2, e01, e10) == [1, 0, 0, 0]
    assert g.Algebra.star(m2, e01) == e10


def test_born_weights_for_sigma_z():
    m2 = g.matrix_algebra(2)
    plus = g.vectorial_state(m2, [1, 1])
    dist = g.born(plus, [1, 0, 0, -1])
    assert approx_eq(dist["total"], 2.0)
    eigs = sorted(e["eigenvalue"].real for e in dist["entries"])
    assert eigs == pytest.approx([-1.0, 1.0])
    for entry in dist["entries"]:
        assert approx_eq(entry["weight"], 1.0)
    sharp = g.ee_link(plus, [1, 0, 0, -1], 1.0)
    assert sharp["agree"] and not sharp["eigenvector"]


def test_collapse_probability_is_the_projection_weight():
    cx = g.function_algebra(["a", "b"])
    mu = g.make_state(cx, [1 / 3, 2 / 3])
    out = g.collapse(mu, [1, 0], tol=1e-9)
    assert approx_eq(out["probability"], 1 / 3)
    assert out["ok"]


def test_transport_of_the_swap_automorphism():
    cx = g.function_algebra(["a", "b"])
    uniform = g.make_state(cx, [0.5, 0.5])
    swap = [[0, 1], [1, 0]]
    out = g.transport(cx, cx, swap, uniform, tol=1e-9)
    assert out["matrix"] == [[0, 1], [1, 0]]
    assert out["pullback"] == [0.5, 0.5]
    adj = g.transport_adjoint(cx, cx, swap, uniform, tol=1e-9)
    assert adj == [[0, 1], [1, 0]]


def test_kernel_duality_roundtrip():
    k = [[0.5, 0.5], [0.0, 1.0]]
    dual = g.kernel_to_cp(["a", "b"], ["c", "d"], k, tol=1e-9)
    assert dual["unital"]
    cx = g.function_algebra(["a", "b"])
    cy = g.function_algebra(["c", "d"])
    back = g.cp_to_kernel(cy, cx, dual["matrix"], tol=1e-9)
    assert back["dom"] == ["a", "b"]
    assert back["cod"] == ["c", "d"]
    for row_got, row_want in zip(back["matrix"], k):
        assert row_got == pytest.approx(row_want)
    report = g.prism(["a", "b"], ["c", "d"], k, [1 / 3, 2 / 3], tol=1e-9)
    assert report["match"]


def test_stinespring_dilation_shapes():
    cx = g.function_algebra(["a", "b"])
    cy = g.function_algebra(["c", "d"])
    dual = [[0.5, 0.5], [0.0, 1.0]]  # cod.dim x dom.dim, columns are f(1_c), f(1_d)
    mu = g.make_state(cx, [1 / 3, 2 / 3])
    out = g.stinespring(cy, cx, dual, mu, tol=1e-9)
    assert out["h_dim"] >= 1
    assert len(out["isometry"]) == out["h_dim"]


def test_errors_carry_library_codes():
    cx = g.function_algebra(["a", "b"])
    with pytest.raises(g.GnsError, match="NotStarLinear"):
        g.make_state(cx, [1j, 1.0])
    with pytest.raises(g.GnsError, match="NotProjection"):
        g.collapse(g.make_state(cx, [0.5, 0.5]), [2, 0], tol=1e-9)


def test_scenario_report_roundtrips_through_json():
    scenario = {
        "version": "gnslab-scenario/1",
        "backend": "float",
        "declarations": [
            {"name": "m2", "kind": "matrix_algebra", "n": 2},
            {"name": "sz", "kind": "element", "algebra": "m2", "coords": [1, 0, 0, -1]},
            {"name": "plus", "kind": "vectorial_state", "algebra": "m2", "vector": [1, 1]},
        ],
        "commands": [{"op": "born", "observable": "sz", "state": "plus"}],
    }
    report = json.loads(g.run_scenario(json.dumps(scenario), normalize=True))
    assert report["version"] == "gnslab-report/1"
    assert report["summary"]["all_passed"]
    weights = [e["weight"] for e in report["records"][0]["payload"]["entries"]]
    assert weights == pytest.approx([0.5, 0.5])


def test_scenario_validation_names_dangling_references():
    scenario = {
        "version": "gnslab-scenario/1",
        "backend": "exact",
        "declarations": [],
        "commands": [{"op": "gns", "state": "psi"}],
    }
    diags = g.validate_scenario(json.dumps(scenario))
    assert len(diags) == 1
    assert diags[0]["code"] == "UnresolvedReference"
    assert '"psi"' in diags[0]["message"]


def test_single_suite_runs_clean():
    result = g.run_suite("born", seed=7)
    assert result["pass"]
    assert result["checks"] > 0
