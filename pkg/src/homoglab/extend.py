"""Deterministic generic structures and an independent check of their extension property."""

from __future__ import annotations

from itertools import combinations, product
from typing import Sequence

from .families.base import Family, Fragment, _pair_table, one_point_extension
from .saturate import Demand
from .structure import FinStructure


def generic_extend(family: Family, N: int | None, k: int, m: int = 3) -> FinStructure:
    """Saturated fragment of ``family`` at level ``k``; raises ``SaturationInfeasible`` past ``N``."""
    return family.build(N, k, m).structure


def _family_index(frag: Fragment) -> dict[int, int]:
    """Fragment pair-type index -> position in ``family.pair_types()``."""
    T, types = _pair_table(frag)
    known = frag.family.pair_types()
    out = {}
    for i, t in enumerate(types):
        if t in known:
            out[i] = known.index(t)
    return out


def type_deficits(
    frag: Fragment,
    k: int,
    m: int = 3,
    elements: Sequence[int] | None = None,
    limit: int | None = None,
) -> list[Demand]:
    """Admissible one-point types over ``<= k`` elements realized fewer than ``m`` times.

    A type over ``A`` is a choice of family pair type toward each member of
    ``A``; it is admissible when the one-point extension stays in the age.
    Subsets are drawn from ``elements`` (default: the whole fragment),
    realizations from the whole fragment. Keys in the returned demands are
    positions in ``family.pair_types()``.
    """
    S = frag.structure
    fam = frag.family
    pts = fam.pair_types()
    T, _ = _pair_table(frag)
    fidx = _family_index(frag)
    pool = list(range(S.size)) if elements is None else list(elements)
    admissible: dict[tuple, list[tuple]] = {}
    out: list[Demand] = []
    for size in range(1, k + 1):
        for A in combinations(pool, size):
            shape = tuple(int(T[x, y]) for x in A for y in A)
            if shape not in admissible:
                keys = []
                for key in product(range(len(pts)), repeat=size):
                    ext = one_point_extension(S, A, [pts[i] for i in key])
                    if ext is not None and fam.in_age(ext):
                        keys.append(key)
                admissible[shape] = keys
            counts: dict[tuple, int] = {}
            inside = set(A)
            for x in range(S.size):
                if x in inside:
                    continue
                key = tuple(fidx.get(int(T[x, a]), -1) for a in A)
                counts[key] = counts.get(key, 0) + 1
            for key in admissible[shape]:
                if counts.get(key, 0) < m:
                    out.append(Demand(A, key))
                    if limit is not None and len(out) >= limit:
                        return out
    return out


def extension_deficits(frag: Fragment, k: int | None = None, m: int | None = None) -> list[Demand]:
    """Unmet extension demands of a built fragment at the level it was built for."""
    k = frag.info["k"] if k is None else k
    m = frag.info.get("m", 3) if m is None else m
    return frag.family.extension_deficits(frag, k, m)
