import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from homoglab.equiv import _labels, discover_equiv_relations
from homoglab.families.bipede import e_b, e_r
from homoglab.structure import FinStructure, Signature


def partition(labels):
    return labels[:, None] == labels[None, :]


def test_crosscut_relations(crosscut333):
    S = crosscut333.structure
    P, Q = S.matrix("P"), S.matrix("Q")
    found = [d.relation(S) for d in discover_equiv_relations(S)]
    assert len(found) == 3
    for want in (P, Q, P & Q):
        assert sum(np.array_equal(r, want) for r in found) == 1


def test_bipede_relations(bipede_frag):
    bf = bipede_frag.info["bipede"]
    S = bipede_frag.structure
    found = [d.relation(S) for d in discover_equiv_relations(S)]
    assert len(found) == 2
    EB, ER = partition(e_b(bf)), partition(e_r(bf))
    assert any(np.array_equal(r, EB) for r in found)
    assert any(np.array_equal(r, ER) for r in found)
    assert np.array_equal(EB & ER, np.eye(S.size, dtype=bool))


def test_empty_signature():
    assert discover_equiv_relations(FinStructure(Signature.of(), 4)) == []


def test_unary_predicate_defines_a_relation():
    S = FinStructure(Signature.of(("U", 1)), 4, {"U": {(0,), (1,)}})
    found = sorted(d.classes(S) for d in discover_equiv_relations(S))
    assert found == sorted([[[0], [1], [2, 3]], [[0, 1], [2, 3]], [[0, 1], [2], [3]]])


def test_descriptor_classes(crosscut333):
    S = crosscut333.structure
    for d in discover_equiv_relations(S):
        assert d.is_equivalence(S)
        cls = d.classes(S)
        assert sorted(x for c in cls for x in c) == list(range(S.size))


@st.composite
def equivalence_pairs(draw):
    n = draw(st.integers(2, 8))
    a = np.array(draw(st.lists(st.integers(0, 2), min_size=n, max_size=n)))
    b = np.array(draw(st.lists(st.integers(0, 2), min_size=n, max_size=n)))
    sig = Signature.of(("A", 2), ("B", 2))
    return FinStructure.from_matrices(sig, n, binary={"A": partition(a), "B": partition(b)})


@given(equivalence_pairs())
@settings(max_examples=40, deadline=None)
def test_outputs_partition_and_intersect(S):
    rels = [d.relation(S) for d in discover_equiv_relations(S)]
    for r in rels:
        assert np.array_equal(r, partition(_labels(r)))
    for r in rels:
        for s in rels:
            both = r & s
            assert np.array_equal(both, partition(_labels(both)))
    keys = {r.tobytes() for r in rels}
    assert len(keys) == len(rels)
