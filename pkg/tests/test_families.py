import random
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homoglab.families.bipede import CODES, BipedeFamily, build_bipede, cl, divides_bipede, m_in_age, reverse_code
from homoglab.families.crosscut import CrosscutFamily, CrosscutSpec, build_crosscut
from homoglab.families.omegapede import OmegapedeFamily, build_omegapede, divides_omegapede


# -- bipede ---------------------------------------------------------------------


def random_subset(rng, n):
    feet = rng.sample(range(n), rng.randint(0, 3))
    bodies = [tuple(sorted(rng.sample(range(n), 2))) for _ in range(rng.randint(0, 3))]
    return set(feet) | set(bodies)


def test_closure_laws():
    rng = random.Random(11)
    for _ in range(500):
        A, B = random_subset(rng, 9), random_subset(rng, 9)
        cA = cl(A)
        assert A <= cA
        assert cl(cA) == cA
        assert cA <= cl(A | B)


def test_closure_of_two_bodies():
    assert cl([(0, 1), (1, 2)]) == {0, 1, 2, (0, 1), (1, 2), (0, 2)}


def test_closure_rejects_outside_feet():
    bf = build_bipede(4, 1)
    with pytest.raises(ValueError):
        cl([(0, bf.nFeet)], bf)


def test_divides_shared_foot():
    assert divides_bipede([(1, 2)], [(2, 3)], [])


def test_base_meeting_a_blocks_clause_b():
    assert not divides_bipede([(1, 2)], [(2, 3)], [(2, 4)])


def test_body_on_feet_of_b_and_base():
    # (0,1) is the body on one foot of b and one of the base
    assert divides_bipede([(0, 1)], [(0, 2)], [(1, 3)])
    assert not divides_bipede([(0, 1)], [(2, 3)], [(1, 4)])


def test_disjoint_bodies_independent():
    assert not divides_bipede([(0, 1)], [(2, 3)], [])


def test_reverse_code_involution():
    for c in CODES:
        assert reverse_code(reverse_code(c)) == c
    assert len(set(CODES)) == 24


def test_codes_are_reversed_consistently():
    bf = build_bipede(5, 1)
    for a, b in combinations(bf.bodies, 2):
        assert bf.code(b, a) == reverse_code(bf.code(a, b))


def test_fragment_in_age(bipede_frag):
    assert m_in_age(bipede_frag.structure)
    assert len(bipede_frag.family.pair_types()) == 24


def test_bipede_deterministic():
    assert build_bipede(5, 2).to_dict() == build_bipede(5, 2).to_dict()


def test_three_bodies_on_three_feet_force_a_triangle():
    # bodies sharing feet pairwise but with no common foot must sit on a triangle
    bf = build_bipede(5, 1)
    frag = BipedeFamily().fragment(bf)
    idx = [bf.body_index(b) for b in ((0, 1), (1, 2), (0, 2))]
    assert m_in_age(frag.structure.induced(idx))


# -- crosscut -------------------------------------------------------------------


def test_crosscut_shape():
    spec = CrosscutSpec(2, 3, 4)
    S = build_crosscut(spec)
    assert S.size == 24
    x = spec.element(1, 2, 3)
    assert spec.coords(x) == (1, 2, 3)
    P = S.matrix("P")
    assert P[x].sum() == 12


def test_crosscut_in_age():
    fam = CrosscutFamily()
    assert fam.in_age(build_crosscut(CrosscutSpec(2, 2, 2)))
    assert len(fam.pair_types()) == 4


def test_crosscut_divides(crosscut333):
    spec = crosscut333.info["spec"]
    fam = crosscut333.family
    a, b = spec.element(0, 0, 0), spec.element(0, 1, 0)
    c = spec.element(0, 2, 0)
    assert fam.divides(crosscut333, (a,), (b,), ())
    assert not fam.divides(crosscut333, (a,), (b,), (c,))
    assert not fam.divides(crosscut333, (a,), (spec.element(1, 1, 0),), ())


# -- omegapede ------------------------------------------------------------------


def test_omegapede_axioms(omegapede_frag):
    assert OmegapedeFamily().in_age(omegapede_frag.structure)


def test_omegapede_breaking_an_axiom():
    om = build_omegapede(2, 2, 2, 1)
    S = om.structure()
    L = S.matrix("L").copy()
    a = 0
    L[a, om.fPoints] = True  # L-related to both cells of a class
    from homoglab.structure import FinStructure

    bad = FinStructure.from_matrices(S.signature, S.size, {"F": S.unary_array("F")},
                                     {"E0": S.matrix("E0"), "E1": S.matrix("E1"), "L": L})
    assert not OmegapedeFamily().in_age(bad)


def test_omegapede_divides(omegapede_frag):
    om = omegapede_frag.info["omegapede"]
    S = omegapede_frag.structure
    c, d = om.f_point(0, 0, 0), om.f_point(0, 1, 0)
    other = om.f_point(1, 0, 0)
    assert divides_omegapede(S, [c], [d], [])
    assert not divides_omegapede(S, [c], [d], [om.f_point(0, 0, 1)])
    assert not divides_omegapede(S, [c], [other], [])
    assert not divides_omegapede(S, [0], [1], [])


@given(st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=9, deadline=None)
def test_omegapede_builds_in_age(classes, k):
    om = build_omegapede(classes + 1, k + 3, 2, k)
    assert OmegapedeFamily().in_age(om.structure())
    P = np.array(om.pattern)
    assert set(np.unique(P)) <= {0, 1}
