"""R-Urysohn spaces: finite R-metric spaces saturated for one-point extensions."""

from __future__ import annotations

from typing import Sequence

from ..distmonoid import (
    DistanceMonoid,
    RMetricSpace,
    decode_distances,
    divides_urysohn,
    metric_violations,
    pair_type_at,
    space_structure,
    urysohn_signature,
)
import numpy as np

from ..saturate import SaturationInfeasible, ValuedModel, repair, saturate
from ..structure import FinStructure
from .base import Family, Fragment


class UrysohnModel(ValuedModel):
    def __init__(self, R: DistanceMonoid, dist=None):
        self.R = R
        self.D = [list(row) for row in (dist or [])]
        self.options = tuple(range(1, R.size))

    def size(self):
        return len(self.D)

    def value(self, x, p):
        return self.D[x][p]

    def admissible(self, assignment):
        R, D = self.R, self.D
        items = list(assignment.items())
        for i, (p, vp) in enumerate(items):
            for q, vq in items[i + 1:]:
                dpq = D[p][q]
                if dpq > R.add(vp, vq) or vp > R.add(vq, dpq) or vq > R.add(vp, dpq):
                    return False
        return True

    def append(self, assignment):
        n = len(self.D)
        row = [assignment[p] for p in range(n)]
        for p in range(n):
            self.D[p].append(row[p])
        self.D.append(row + [0])
        return n


class UrysohnFamily(Family):
    def __init__(self, R: DistanceMonoid):
        self.R = R
        self.name = f"urysohn({','.join(R.elements)})"
        self.signature = urysohn_signature(R)

    def in_age(self, S: FinStructure) -> bool:
        D = decode_distances(self.R, S)
        if D is None:
            return False
        return not metric_violations(self.R, D.tolist())

    def pair_types(self):
        return [pair_type_at(self.R, s) for s in range(1, self.R.size)]

    def space(self, frag: Fragment) -> RMetricSpace:
        return frag.info["space"]

    def divides(self, frag, a, b, base):
        (a,), (b,) = a, b
        return divides_urysohn(self.space(frag), a, b, tuple(base))

    def fragment(self, space: RMetricSpace) -> Fragment:
        return Fragment(self, space.structure(), {"space": space})

    def build(self, N: int | None, k: int, m: int = 3, seed_points: int = 1) -> Fragment:
        """Saturate from ``seed_points`` points at pairwise maximal distance."""
        top = self.R.top
        model = UrysohnModel(self.R, [[0 if i == j else top for j in range(seed_points)] for i in range(seed_points)])
        try:
            saturate(model, k, m, max_size=N)
            D = model.D
        except SaturationInfeasible as exc:
            if N is None or k > 2:
                raise
            D = self._repair(model.D, m)
            if D is None:
                raise exc
        space = RMetricSpace(self.R, tuple(map(tuple, D)))
        frag = self.fragment(space)
        frag.info["k"], frag.info["m"] = k, m
        return frag

    def _repair(self, D, m: int):
        """Fixed-size local search when greedy appending runs out of room."""
        R = self.R
        V = np.array(D, dtype=np.int64)
        n = V.shape[0]
        options = tuple(range(1, R.size))
        plus = np.array([[R.add(a, b) for b in range(R.size)] for a in range(R.size)])

        def key_ok(dpq, v1, v2):
            return dpq <= plus[v1, v2] and v1 <= plus[v2, dpq] and v2 <= plus[v1, dpq]

        def moves(V, rng):
            p, q = rng.sample(range(n), 2)
            return p, q, rng.choice(options)

        def apply(V, move):
            p, q, v = move
            if V[p, q] == v:
                return None
            others = [r for r in range(n) if r not in (p, q)]
            a, b = V[p, others], V[q, others]
            if (v > plus[a, b]).any() or (a > plus[v, b]).any() or (b > plus[v, a]).any():
                return None
            W = V.copy()
            W[p, q] = W[q, p] = v
            return W

        V, missing = repair(V, options, m, moves, apply, key_ok, seed=n)
        return None if missing else V.tolist()


def space_fragment(space: RMetricSpace) -> Fragment:
    return UrysohnFamily(space.monoid).fragment(space)
