"""ω-pedes: non-F points that L-relate to exactly one of the two E1-cells of each E0-class of F."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ..saturate import saturate_bipartite
from ..structure import FinStructure, Signature
from ..types import atp
from .base import Family, Fragment

SIGNATURE = Signature.of(("F", 1), ("E0", 2), ("E1", 2), ("L", 2))


@dataclass(frozen=True)
class OmegapedeFragment:
    """``pattern[a][X]`` is the cell of class ``X`` that non-F point ``a`` is L-related to."""

    pattern: tuple[tuple[int, ...], ...]
    cellSize: int
    satLevel: tuple[int, int] = (0, 0)

    @property
    def nPoints(self) -> int:
        return len(self.pattern)

    @property
    def nClasses(self) -> int:
        return len(self.pattern[0]) if self.pattern else 0

    @property
    def size(self) -> int:
        return self.nPoints + 2 * self.nClasses * self.cellSize

    @property
    def fPoints(self) -> list[int]:
        return list(range(self.nPoints, self.size))

    def f_point(self, cls: int, cell: int, i: int) -> int:
        return self.nPoints + (2 * cls + cell) * self.cellSize + i

    def locate(self, x: int) -> tuple[int, int, int] | None:
        """``(class, cell, index)`` of an F point, ``None`` for the others."""
        if x < self.nPoints:
            return None
        q, i = divmod(x - self.nPoints, self.cellSize)
        return q // 2, q % 2, i

    def classes(self) -> list[list[list[int]]]:
        return [[[self.f_point(X, y, i) for i in range(self.cellSize)] for y in (0, 1)] for X in range(self.nClasses)]

    def structure(self) -> FinStructure:
        n = self.size
        F = np.zeros(n, dtype=bool)
        F[self.nPoints:] = True
        cls = np.full(n, -1)
        cell = np.full(n, -1)
        for x in self.fPoints:
            X, y, _ = self.locate(x)
            cls[x], cell[x] = X, y
        E0 = cls[:, None] == cls[None, :]
        E1 = E0 & (cell[:, None] == cell[None, :])
        L = np.zeros((n, n), dtype=bool)
        if self.nPoints and self.nClasses:
            P = np.array(self.pattern)
            fp = np.array(self.fPoints)
            L[: self.nPoints, fp] = P[:, cls[fp]] == cell[fp][None, :]
        return FinStructure.from_matrices(SIGNATURE, n, {"F": F}, {"E0": E0, "E1": E1, "L": L})


def build_omegapede(nClasses: int, cellSize: int, nPoints: int, k: int, m: int = 3) -> OmegapedeFragment:
    """Saturate the pattern matrix over the first ``nPoints`` points and ``nClasses`` classes.

    (i) every ``<= k`` core points and every pattern on them get ``m`` classes;
    (ii) every ``<= k`` core classes and every pattern get ``m`` non-F points.
    Cells of size ``cellSize`` should be at least ``k + m`` for the one-point
    extensions inside a cell.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    start = [[(i + j) % 2 for j in range(nClasses)] for i in range(nPoints)]
    V = saturate_bipartite(start, k, m, nPoints, nClasses)
    return OmegapedeFragment(tuple(tuple(r) for r in V), cellSize, (k, m))


def _equivalence(rel: np.ndarray) -> bool:
    if not rel.diagonal().all() or not (rel == rel.T).all():
        return False
    r = rel.astype(np.int64)
    return bool(((r @ r > 0) <= rel).all())


class OmegapedeFamily(Family):
    name = "omegapede"
    signature = SIGNATURE

    def in_age(self, S: FinStructure) -> bool:
        F = S.unary_array("F")
        E0, E1, L = S.matrix("E0"), S.matrix("E1"), S.matrix("L")
        if not (_equivalence(E0) and _equivalence(E1)) or (E1 & ~E0).any():
            return False
        nf = ~F
        if (E1[np.ix_(nf, nf)] == False).any() or E0[np.ix_(nf, F)].any():  # noqa: E712
            return False
        if (L & ~(nf[:, None] & F[None, :])).any():
            return False
        fs = np.flatnonzero(F)
        seen: set[int] = set()
        for x in fs.tolist():
            if x in seen:
                continue
            X = np.flatnonzero(E0[x] & F)
            seen.update(X.tolist())
            cells = []
            rest = set(X.tolist())
            while rest:
                y = min(rest)
                cell = np.flatnonzero(E1[y] & E0[x])
                rest -= set(cell.tolist())
                cells.append(cell)
            if len(cells) > 2:
                return False
            for a in np.flatnonzero(nf).tolist():
                vals = []
                for cell in cells:
                    row = L[a, cell]
                    if row.any() and not row.all():
                        return False
                    vals.append(bool(row[0]))
                if len(vals) == 2 and vals[0] == vals[1]:
                    return False
        return True

    def pair_types(self):
        if not hasattr(self, "_pairs"):
            out = []
            for bits in product((False, True), repeat=2 + 3 * 2):
                fa, fb, e0, e1, l01, l10 = bits[0], bits[1], bits[2], bits[3], bits[4], bits[5]
                if bits[6] or bits[7]:
                    continue  # L is irreflexive on the diagonal; E relations are reflexive
                eye = np.eye(2, dtype=bool)
                mats = {
                    "E0": eye | np.array([[0, e0], [e0, 0]], bool),
                    "E1": eye | np.array([[0, e1], [e1, 0]], bool),
                    "L": np.array([[0, l01], [l10, 0]], bool),
                }
                S = FinStructure.from_matrices(SIGNATURE, 2, {"F": np.array([fa, fb])}, mats)
                if self.in_age(S):
                    t = atp(S, (0, 1))
                    if t not in out:
                        out.append(t)
            self._pairs = out
        return self._pairs

    def fragment(self, om: OmegapedeFragment) -> Fragment:
        return Fragment(self, om.structure(), {"omegapede": om})

    def divides(self, frag, a, b, base):
        return divides_omegapede(frag.structure, a, b, base)

    def build(self, N: int | None, k: int, m: int = 3) -> Fragment:
        om = build_omegapede(k + 1, k + m, k + 1, k, m)
        if N is not None and om.size > N:
            from ..saturate import Demand, SaturationInfeasible

            raise SaturationInfeasible(f"size bound {N} below the {om.size} points needed at level {k}", Demand((), ()))
        frag = self.fragment(om)
        cells = [om.f_point(X, y, i) for X in range(k + 1) for y in (0, 1) for i in range(om.cellSize)]
        frag.info.update(k=k, m=m, core=list(range(k + 1)) + cells)
        return frag


def divides_omegapede(S: FinStructure, abar, bbar, cbar) -> bool:
    F = S.unary_array("F")
    E0 = S.matrix("E0")
    for a in abar:
        if a in bbar and a not in cbar:
            return True
        if F[a] and any(E0[a, b] for b in bbar) and not any(E0[a, c] for c in cbar):
            return True
    return False
