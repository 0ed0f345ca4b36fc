import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mtphi import archimedean as ar
from mtphi import filmod as fm
from mtphi import grading as gr
from mtphi import logpoint as lp
from mtphi import serialize as ser
from mtphi.errors import ValidationError
from mtphi.padic import LocalField, random_scalar

K = LocalField(5, 10)
RAM = LocalField(3, 8, ("3", "0", "1")).with_branch(2)


@given(st.integers(0, 10**6), st.booleans())
def test_scalar_round_trip_keeps_precision(seed, ramified):
    field = RAM if ramified else K
    x = random_scalar(field, random.Random(seed), -2, 3)
    y = ser.scalar_from_json(field, ser.scalar_to_json(x))
    assert y == x and y.prec == x.prec


def test_field_round_trip():
    for field in (K, RAM, K.with_branch("1/3")):
        back = ser.field_from_json(ser.field_to_json(field))
        assert ser.field_to_json(back) == ser.field_to_json(field)


@given(st.integers(0, 10**6))
def test_module_eta_ceta_round_trips(seed):
    rng = random.Random(seed)
    M = fm.random_mixed_tate(K, rng, max_dim=4, monodromy=True)
    M2 = ser.module_from_json(ser.module_to_json(M))
    assert fm.modules_equal(M, M2)
    E = lp.eta_st(M)
    assert ser.eta_from_json(K, ser.eta_to_json(E)) == E
    V = gr.random_ceta(RAM, rng, max_dim=4)
    assert ser.ceta_from_json(ser.ceta_to_json(V)) == V


def test_mths_round_trip():
    H = ar.random_mths(random.Random(4))
    H2 = ser.mths_from_json(ser.mths_to_json(H))
    assert np.allclose(ar.compute_d(H), ar.compute_d(H2))


def test_plain_rationals_accepted():
    assert ser.scalar_from_json(K, "3/5") == K("3/5")
    assert ser.scalar_from_json(K, 7) == 7
    assert ser.scalar_from_json(K, {"rational": "-1/2"}) == K("-1/2")


GOOD = {"field": {"p": 5, "precision": 6}, "dim": 2, "phi": [["1", "0"], ["0", "1"]],
        "monodromy": [["0", "0"], ["0", "0"]], "filtration": [{"step": 0, "basis": [["1", "0"], ["0", "1"]]}]}


@pytest.mark.parametrize("patch, where", [
    ({"field": {"precision": 6}}, "$.field.p"),
    ({"dim": "2"}, "$.dim"),
    ({"phi": [["1", "0"], ["0", "x"]]}, "$.phi[1][1]"),
    ({"phi": [["1", "0"], ["0", True]]}, "$.phi[1][1]"),
    ({"monodromy": [["0", "0"]]}, "$.monodromy"),
    ({"filtration": [{"basis": []}]}, "$.filtration[0].step"),
    ({"filtration": [{"step": 0, "basis": [["1"]]}]}, "$.filtration[0].basis[0]"),
    ({"field": {"p": 5, "precision": 6, "eisenstein": ["a"]}}, "$.field.eisenstein[0]"),
    ({"phi": [[{"pi_coeffs": []}, "0"], ["0", "1"]]}, "$.phi[0][0].pi_coeffs"),
])
def test_module_decode_errors_name_the_path(patch, where):
    doc = dict(GOOD, **patch)
    with pytest.raises(ValidationError) as info:
        ser.module_from_json(doc)
    assert str(info.value).startswith(where)


def test_other_decode_errors_name_the_path():
    with pytest.raises(ValidationError, match=r"^\$\.dims\.x"):
        ser.ceta_from_json({"field": {"p": 5, "precision": 4}, "dims": {"x": 1}, "eta": [["1"]]})
    with pytest.raises(ValidationError, match=r"^\$\.eta"):
        ser.ceta_from_json({"field": {"p": 5, "precision": 4}, "dims": {"0": 2}, "eta": [["1"]]})
    with pytest.raises(ValidationError, match=r"^\$\.hodge\[0\]\.basis\[0\]\[1\]"):
        ser.mths_from_json({"dim": 2, "weights": [], "hodge": [{"step": 0, "basis": [[1, "i"]]}]})
    with pytest.raises(ValidationError, match=r"^\$\.weights\[0\]\.basis\[0\]"):
        ser.mths_from_json({"dim": 2, "weights": [{"step": 0, "basis": [[1, [0, 1]]]}], "hodge": []})
    with pytest.raises(ValidationError, match=r"^\$: expected an object"):
        ser.module_from_json([])
