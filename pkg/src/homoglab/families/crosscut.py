"""Two equivalence relations P and Q whose intersection cuts every class of each into cells."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ..saturate import Demand, SaturationInfeasible
from ..structure import FinStructure, Signature
from ..types import atp
from .base import Family, Fragment, RefinementRule, divides_by_classes

SIGNATURE = Signature.of(("P", 2), ("Q", 2))


@dataclass(frozen=True)
class CrosscutSpec:
    nP: int
    nQ: int
    cell: int

    def __post_init__(self):
        if min(self.nP, self.nQ, self.cell) < 1:
            raise ValueError("crosscut dimensions must be positive")

    @property
    def size(self) -> int:
        return self.nP * self.nQ * self.cell

    def coords(self, x: int) -> tuple[int, int, int]:
        pq, i = divmod(x, self.cell)
        p, q = divmod(pq, self.nQ)
        return p, q, i

    def element(self, p: int, q: int, i: int) -> int:
        return (p * self.nQ + q) * self.cell + i


def build_crosscut(spec: CrosscutSpec) -> FinStructure:
    idx = np.arange(spec.size)
    p = idx // (spec.nQ * spec.cell)
    q = (idx // spec.cell) % spec.nQ
    return FinStructure.from_matrices(
        SIGNATURE, spec.size, binary={"P": p[:, None] == p[None, :], "Q": q[:, None] == q[None, :]}
    )


def _is_equivalence(rel: np.ndarray) -> bool:
    if not rel.diagonal().all() or not (rel == rel.T).all():
        return False
    r = rel.astype(np.int64)
    return bool(((r @ r > 0) <= rel).all())


class CrosscutFamily(Family):
    name = "crosscut"
    signature = SIGNATURE

    def in_age(self, S: FinStructure) -> bool:
        return _is_equivalence(S.matrix("P")) and _is_equivalence(S.matrix("Q"))

    def pair_types(self):
        out = []
        for p, q in product((True, False), repeat=2):
            S = FinStructure.from_matrices(
                SIGNATURE, 2,
                binary={"P": np.array([[1, p], [p, 1]], bool), "Q": np.array([[1, q], [q, 1]], bool)},
            )
            out.append(atp(S, (0, 1)))
        return out

    def premise_rule(self):
        return RefinementRule()

    def fragment(self, spec: CrosscutSpec) -> Fragment:
        return Fragment(self, build_crosscut(spec), {"spec": spec})

    def divides(self, frag, a, b, base):
        (a,), (b,) = a, b
        S = frag.structure
        P, Q = S.matrix("P"), S.matrix("Q")
        rels = {"P": P, "Q": Q}

        def algebraic(name, x, C):
            return any(rels[name][x, c] for c in C)

        return divides_by_classes(frag, rels, algebraic, a, b, tuple(base))

    def build(self, N: int | None, k: int, m: int = 3) -> Fragment:
        """Smallest grid with the ``k``-extension property at multiplicity ``m``.

        A new point over ``A`` picks a P-class (one of ``A``'s or a fresh one),
        likewise a Q-class; the worst cases need ``k + 1`` classes each way and
        ``k + m`` points per cell.
        """
        spec = CrosscutSpec(k + 1, k + 1, k + m)
        if N is not None and spec.size > N:
            raise SaturationInfeasible(
                f"size bound {N} below {spec.size} needed for a cell holding {k} points of A plus {m} witnesses",
                Demand(tuple(range(min(k, N))), ("P", "Q")),
            )
        frag = self.fragment(spec)
        frag.info["k"], frag.info["m"] = k, m
        return frag
