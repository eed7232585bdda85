import json
import pathlib

import numpy as np
import pytest

import ncball

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def test_eval_fixture():
    x11 = np.array([[0, 1], [1, 0]], dtype=complex)
    x21 = np.array([[1, 0], [0, -1]], dtype=complex)
    value = ncball.eval_poly("2 x11 x21 - x21", 2, 1, [x11, x21])
    np.testing.assert_array_equal(value, 2 * x11 @ x21 - x21)


def test_parse_round_trip():
    text = ncball.parse_poly("2 x1 x2 - x2", 2, 1)
    assert ncball.parse_poly(text, 2, 1) == text


def test_ball_and_moebius():
    rng = np.random.default_rng(1)
    v = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    v *= 0.5 / np.linalg.norm(v, 2)
    u = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    u *= 0.8 / np.linalg.norm(u, 2)
    fu = ncball.moebius_apply(v, u)
    assert np.linalg.norm(fu, 2) < 1
    np.testing.assert_allclose(ncball.moebius_apply(v, fu), u, atol=1e-10)
    status, norm = ncball.classify_ball(1, 1, [np.eye(2) * 0.5])
    assert status == "interior" and norm == pytest.approx(0.5)


def test_fock_identities():
    r = ncball.fock_identities(2, 2, 2)
    assert r["star_product"] and r["product_star"] and r["nilpotent"]


def test_isometry_and_trace_map():
    one, zero = np.ones((1, 1)), np.zeros((1, 1))
    assert not ncball.certify_isometry(2, 2, [one, zero, zero, one])["accepted"]
    ident = [np.array([[1, 0]], dtype=complex), np.array([[0, 1]], dtype=complex)]
    r = ncball.certify_isometry(1, 2, ident)
    assert r["accepted"] and r["certificate"]["residual"] < 1e-12


def test_distinguished_pencil_clings():
    pencil = json.loads((DATA / "distinguished_pencil.json").read_text())
    coeffs = []
    for c in (entry for row in pencil["coeffs"] for entry in row):
        flat = np.array([complex(re, im) for re, im in c["data"]])
        coeffs.append(flat.reshape(c["rows"], c["cols"]))
    r = ncball.analyze_clinging(coeffs, levels=3, samples=100, seed=7)
    assert r["psd"] and r["clings_scalar"] and r["max_sample"] < 1e-7


def test_canonical_form_and_planted_block():
    assert ncball.canonical_form((DATA / "square_map.ncs").read_text())["accepted"]
    planted = ncball.canonical_form((DATA / "planted_block.ncs").read_text())
    assert not planted["accepted"]
    assert planted["violation"][1] == "b2"


def test_cofactor():
    r = ncball.cofactor_solve([["x1"]], [["x2 x1"]], variables=2)
    assert r["success"] and r["exact_verified"]
    assert not ncball.cofactor_solve([["x1"]], [["x2"]], variables=2, max_degree=2)["success"]


def test_suite_filter():
    report = ncball.run_suite(42, ["moebius"])
    assert report["pass"] and report["checks_run"] == 2
