"""Finite distance monoids, R-metric spaces and the closed-form Urysohn calculus.

Elements of a monoid are handled by index: ``0`` is the identity and the
order ``<=`` is index order. Labels are only for display and file I/O.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .equiv import EquivRelDescriptor
from .structure import FinStructure, Signature
from .types import atp


class MonoidError(ValueError):
    """Raised for malformed tables or tables that violate the monoid axioms."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def __str__(self):
        return f"{self.axiom}: {self.witness}"


def check_monoid(elements: Sequence[str], plus: Sequence[Sequence[int]]) -> list[Violation]:
    """Return every axiom violation of ``(elements, plus)``; empty means a valid distance monoid.

    ``plus[i][j]`` is an index into ``elements``; the order is list order and
    ``elements[0]`` must be the identity. Raises :class:`MonoidError` on
    malformed dimensions or out-of-range entries.
    """
    n = len(elements)
    if n == 0:
        raise MonoidError("a distance monoid needs at least the element 0")
    if len(plus) != n or any(len(row) != n for row in plus):
        raise MonoidError(f"operation table must be {n}x{n}")
    for row in plus:
        for v in row:
            if not isinstance(v, (int, np.integer)) or not 0 <= v < n:
                raise MonoidError(f"table entry {v!r} is not an element index")
    if len(set(elements)) != n:
        raise MonoidError("element labels must be distinct")
    p = plus
    out = []
    for r in range(n):
        if p[0][r] != r or p[r][0] != r:
            out.append(Violation("identity", (r,)))
    for r, s in combinations(range(n), 2):
        if p[r][s] != p[s][r]:
            out.append(Violation("commutativity", (r, s)))
    for r, s, t in product(range(n), repeat=3):
        if p[p[r][s]][t] != p[r][p[s][t]]:
            out.append(Violation("associativity", (r, s, t)))
    for r, s, t in product(range(n), repeat=3):
        if r <= s and p[r][t] > p[s][t]:
            out.append(Violation("monotonicity", (r, s, t)))
    return out


@dataclass(frozen=True)
class DistanceMonoid:
    elements: tuple[str, ...]
    plus: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(str(e) for e in self.elements))
        object.__setattr__(self, "plus", tuple(tuple(int(v) for v in row) for row in self.plus))
        violations = check_monoid(self.elements, self.plus)
        if violations:
            raise MonoidError(f"not a distance monoid: {violations[0]}", violations)

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def top(self) -> int:
        return self.size - 1

    def add(self, *rs: int) -> int:
        acc = 0
        for r in rs:
            acc = self.plus[acc][r]
        return acc

    def double(self, r: int) -> int:
        return self.plus[r][r]

    def label(self, r: int) -> str:
        return self.elements[r]

    def index(self, label) -> int:
        return self.elements.index(str(label))

    def to_dict(self) -> dict:
        return {"elements": list(self.elements), "plus": [list(row) for row in self.plus]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "DistanceMonoid":
        return cls(tuple(data["elements"]), tuple(tuple(r) for r in data["plus"]))

    @classmethod
    def from_json(cls, text: str) -> "DistanceMonoid":
        return cls.from_dict(json.loads(text))


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else str(float(x))


def truncated_monoid(values: Iterable) -> DistanceMonoid:
    """``r + s`` truncated down into ``values``; rejected unless associative."""
    vals = sorted({Fraction(str(v)) for v in values})
    if not vals or vals[0] != 0:
        raise MonoidError("value set must contain 0")
    if any(v < 0 for v in vals):
        raise MonoidError("values must be non-negative")
    n = len(vals)
    plus = []
    for r in vals:
        row = []
        for s in vals:
            row.append(max(i for i, x in enumerate(vals) if x <= r + s))
        plus.append(tuple(row))
    labels = tuple(_fmt(v) for v in vals)
    violations = check_monoid(labels, plus)
    if violations:
        assoc = [v for v in violations if v.axiom == "associativity"]
        first = assoc[0] if assoc else violations[0]
        witness = tuple(labels[i] for i in first.witness)
        raise MonoidError(f"truncated addition on {list(labels)} fails {first.axiom} at {witness}", violations)
    return DistanceMonoid(labels, tuple(plus))


def is_simple(R: DistanceMonoid) -> bool:
    """``r + r + s == r + s`` whenever ``r <= s``."""
    return all(R.add(r, r, s) == R.add(r, s) for r in range(R.size) for s in range(r, R.size))


def idempotents(R: DistanceMonoid) -> list[int]:
    return [r for r in range(R.size) if R.double(r) == r]


def su_rank(R: DistanceMonoid) -> int:
    return sum(1 for r in idempotents(R) if r < R.top)


def coordinatization_chain(R: DistanceMonoid) -> list[int]:
    """Non-maximal idempotents in decreasing order; ends with 0 unless the monoid is trivial."""
    return sorted((r for r in idempotents(R) if r < R.top), reverse=True)


@dataclass(frozen=True)
class RMetricSpace:
    monoid: DistanceMonoid
    dist: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = tuple(tuple(int(v) for v in row) for row in self.dist)
        object.__setattr__(self, "dist", d)
        problems = metric_violations(self.monoid, d)
        if problems:
            raise ValueError(f"not an R-metric space: {problems[0]}")

    @property
    def size(self) -> int:
        return len(self.dist)

    def d(self, a: int, b: int) -> int:
        return self.dist[a][b]

    def structure(self) -> FinStructure:
        return space_structure(self.monoid, self.dist)

    def to_dict(self) -> dict:
        return {"monoid": self.monoid.to_dict(), "size": self.size, "dist": [list(r) for r in self.dist]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "RMetricSpace":
        dist = tuple(tuple(r) for r in data["dist"])
        if int(data.get("size", len(dist))) != len(dist):
            raise ValueError("size does not match distance matrix")
        return cls(DistanceMonoid.from_dict(data["monoid"]), dist)

    @classmethod
    def from_json(cls, text: str) -> "RMetricSpace":
        return cls.from_dict(json.loads(text))


def metric_violations(R: DistanceMonoid, dist) -> list[str]:
    n = len(dist)
    out = []
    for row in dist:
        if len(row) != n:
            return ["distance matrix is not square"]
        for v in row:
            if not 0 <= v < R.size:
                return [f"distance index {v} outside the monoid"]
    for a in range(n):
        if dist[a][a] != 0:
            out.append(f"d({a},{a}) != 0")
        for b in range(n):
            if a != b and dist[a][b] == 0:
                out.append(f"d({a},{b}) = 0 for distinct points")
            if dist[a][b] != dist[b][a]:
                out.append(f"d({a},{b}) != d({b},{a})")
    for a, b, c in product(range(n), repeat=3):
        if dist[a][c] > R.add(dist[a][b], dist[b][c]):
            out.append(f"triangle fails at ({a},{b},{c})")
    return out


def relation_name(R: DistanceMonoid, r: int) -> str:
    return f"d_{R.label(r)}"


def urysohn_signature(R: DistanceMonoid) -> Signature:
    return Signature.of(*((relation_name(R, r), 2) for r in range(R.size)))


def space_structure(R: DistanceMonoid, dist) -> FinStructure:
    """Relational view: ``d_r(a, b)`` iff ``d(a, b) <= r``."""
    D = np.asarray(dist, dtype=np.int64).reshape(len(dist), len(dist))
    binary = {relation_name(R, r): D <= r for r in range(R.size)}
    return FinStructure.from_matrices(urysohn_signature(R), len(dist), binary=binary)


def decode_distances(R: DistanceMonoid, S: FinStructure) -> np.ndarray | None:
    """Distance matrix of a structure in the ``d_r`` signature, or ``None`` if the relations are not nested."""
    n = S.size
    mats = [S.matrix(relation_name(R, r)) for r in range(R.size)]
    for lo, hi in zip(mats, mats[1:]):
        if (lo & ~hi).any():
            return None
    if not mats[-1].all():
        return None
    stacked = np.stack(mats)
    return np.argmax(stacked, axis=0) if n else np.zeros((0, 0), dtype=np.int64)


def pair_type_at(R: DistanceMonoid, s: int):
    """Atomic 2-type over the empty set of two points at distance ``s``."""
    if s == 0:
        return atp(space_structure(R, [[0]]), (0, 0))
    return atp(space_structure(R, [[0, s], [s, 0]]), (0, 1))


def definable_equivalences(R: DistanceMonoid) -> list[tuple[int, EquivRelDescriptor]]:
    """One descriptor ``d(x, y) <= r`` per idempotent ``r``, largest ``r`` first."""
    out = []
    for r in sorted(idempotents(R), reverse=True):
        accepted = frozenset(pair_type_at(R, s) for s in range(1, r + 1))
        out.append((r, EquivRelDescriptor(relation_name(R, r), accepted)))
    return out


def divides_urysohn(S: RMetricSpace, a: int, b: int, base: Sequence[int]) -> bool:
    """Closed-form dividing: ``2d(a,b) < 2d(a,c)`` for every ``c`` in ``base``."""
    R = S.monoid
    if b in base:
        return False
    lhs = R.double(S.d(a, b))
    if not base:
        return lhs < R.double(R.top)
    return all(lhs < R.double(S.d(a, c)) for c in base)


def find_independence_distance(S: RMetricSpace, c: int, dbar: Sequence[int]) -> int:
    """Least ``2d(c, d)`` over ``dbar`` (an idempotent when the monoid is simple); top if empty."""
    R = S.monoid
    if not dbar:
        return R.top
    return min(R.double(S.d(c, d)) for d in dbar)


def complete_metric(
    R: DistanceMonoid,
    n: int,
    known: Mapping[tuple[int, int], int],
    value_order: Callable[[int, int], Sequence[int]] | None = None,
) -> np.ndarray | None:
    """Fill the unknown distances of an ``n``-point partial R-metric space.

    Unknown pairs are assigned in lexicographic order; by default the smallest
    admissible monoid element is tried first, so the result is the
    lexicographically least completion. ``value_order(i, j)`` overrides the
    order in which values are tried for pair ``(i, j)``. Returns ``None`` if
    no completion exists.
    """
    D = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(D, 0)
    for (i, j), v in known.items():
        if i == j:
            if v != 0:
                return None
            continue
        if v == 0:
            return None
        for x, y in ((i, j), (j, i)):
            if D[x, y] not in (-1, v):
                return None
            D[x, y] = v
    for i, j, k in product(range(n), repeat=3):
        if D[i, j] >= 0 and D[j, k] >= 0 and D[i, k] >= 0 and D[i, k] > R.add(D[i, j], D[j, k]):
            return None
    unknown = [(i, j) for i in range(n) for j in range(i + 1, n) if D[i, j] < 0]
    P = np.asarray(R.plus)

    def admissible(i: int, j: int) -> list[int]:
        vals = list(range(1, R.size)) if value_order is None else list(value_order(i, j))
        ok = []
        for v in vals:
            good = True
            for k in range(n):
                if k in (i, j):
                    continue
                a, b = D[i, k], D[k, j]
                if a < 0 or b < 0:
                    continue
                if v > P[a, b] or a > P[v, b] or b > P[a, v]:
                    good = False
                    break
            if good:
                ok.append(v)
        return ok

    def rec(pos: int) -> bool:
        if pos == len(unknown):
            return True
        i, j = unknown[pos]
        for v in admissible(i, j):
            D[i, j] = D[j, i] = v
            if rec(pos + 1):
                return True
        D[i, j] = D[j, i] = -1
        return False

    return D if rec(0) else None


def metric_completion_feasible(R: DistanceMonoid, n: int, known: Mapping[tuple[int, int], int]):
    """``(feasible, completion)``; the completion is the lexicographically least one."""
    D = complete_metric(R, n, known)
    if D is None:
        return False, None
    return True, RMetricSpace(R, tuple(map(tuple, D.tolist())))
