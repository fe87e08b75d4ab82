import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homoglab.structure import ElementRangeError, FinStructure, Signature, SignatureError, graph


def test_signature_rejects_bad_arity():
    with pytest.raises(SignatureError):
        Signature.of(("T", 3))


def test_signature_rejects_duplicates():
    with pytest.raises(SignatureError):
        Signature.of(("E", 2), ("E", 1))


def test_tuple_outside_universe():
    with pytest.raises(ElementRangeError):
        FinStructure(Signature.of(("E", 2)), 2, {"E": {(0, 2)}})


def test_wrong_width():
    with pytest.raises(SignatureError):
        FinStructure(Signature.of(("U", 1)), 2, {"U": {(0, 1)}})


def test_undeclared_relation():
    with pytest.raises(SignatureError):
        FinStructure(Signature.of(("E", 2)), 2, {"F": set()})


def test_json_layout():
    S = FinStructure(Signature.of(("Q", 2), ("P", 1)), 3, {"P": {(2,)}, "Q": {(1, 0), (0, 1)}})
    data = json.loads(S.to_json())
    assert [r["name"] for r in data["signature"]] == ["P", "Q"]
    assert data["relations"]["Q"] == [[0, 1], [1, 0]]
    assert data["size"] == 3


def test_induced_renumbers():
    S = graph(4, [(0, 1), (1, 2), (2, 3)])
    T = S.induced([3, 2, 0])
    assert T.holds("E", 0, 1)
    assert not T.holds("E", 1, 2)


@st.composite
def structures(draw):
    n = draw(st.integers(0, 6))
    U = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    E = draw(st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=n, max_size=n))
    sig = Signature.of(("U", 1), ("E", 2))
    return FinStructure.from_matrices(sig, n, {"U": np.array(U, bool)}, {"E": np.array(E, bool).reshape(n, n)})


@given(structures())
@settings(max_examples=60, deadline=None)
def test_json_roundtrip_is_bit_exact(S):
    text = S.to_json()
    back = FinStructure.from_json(text)
    assert back == S
    assert back.to_json() == text
