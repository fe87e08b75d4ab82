from itertools import combinations

import pytest

from homoglab.extend import extension_deficits, generic_extend, type_deficits
from homoglab.families.bipede import BipedeFamily
from homoglab.families.crosscut import CrosscutFamily
from homoglab.families.omegapede import OmegapedeFamily
from homoglab.families.urysohn import UrysohnFamily
from homoglab.saturate import SaturationInfeasible


def test_urysohn_rado_like(R012):
    fam = UrysohnFamily(R012)
    frag = fam.build(20, 2)
    assert frag.size == 20
    assert extension_deficits(frag) == []
    D = frag.info["space"].dist
    # every pair and every edge/non-edge pattern toward it has three common witnesses
    for p, q in combinations(range(20), 2):
        for u in (1, 2):
            for v in (1, 2):
                if abs(u - v) <= D[p][q] <= min(2, u + v):
                    hits = [x for x in range(20) if x not in (p, q) and D[x][p] == u and D[x][q] == v]
                    assert len(hits) >= 3


def test_bipede_feet_have_both_colours():
    frag = BipedeFamily().build(10, 1)
    bf = frag.info["bipede"]
    assert extension_deficits(frag) == []
    for a in range(10):
        blue = sum(1 for x in range(bf.nFeet) if x != a and bf.blue_end(a, x) == a)
        red = sum(1 for x in range(bf.nFeet) if x != a and bf.blue_end(a, x) == x)
        assert blue >= 3 and red >= 3


def test_omegapede_patterns_have_classes():
    frag = OmegapedeFamily().build(None, 1)
    om = frag.info["omegapede"]
    assert extension_deficits(frag) == []
    for a in range(2):
        for cell in (0, 1):
            assert sum(1 for X in range(om.nClasses) if om.pattern[a][X] == cell) >= 3


def test_crosscut_levels():
    for k in (1, 2):
        frag = CrosscutFamily().build(None, k)
        assert type_deficits(frag, k, 3) == []


def test_higher_level_is_stricter():
    frag = CrosscutFamily().build(None, 1)
    assert type_deficits(frag, 2, 3)


def test_generic_extend_deterministic(R0134):
    for fam, N, k in [(UrysohnFamily(R0134), None, 1), (BipedeFamily(), 4, 1), (OmegapedeFamily(), None, 1), (CrosscutFamily(), None, 2)]:
        assert generic_extend(fam, N, k).to_json() == generic_extend(fam, N, k).to_json()


def test_fragments_satisfy_axioms(R012, R0134):
    for fam, N, k in [(UrysohnFamily(R012), 20, 2), (UrysohnFamily(R0134), None, 1), (BipedeFamily(), 5, 2),
                      (OmegapedeFamily(), None, 2), (CrosscutFamily(), None, 2)]:
        frag = fam.build(N, k)
        assert fam.axiom_violations(frag) == []


def test_size_bound_reports_demand(R0134):
    with pytest.raises(SaturationInfeasible) as err:
        UrysohnFamily(R0134).build(20, 2)
    assert err.value.demand is not None
    with pytest.raises(SaturationInfeasible):
        CrosscutFamily().build(10, 2)
