"""Quantifier-free (atomic) types of tuples.

In a binary homogeneous structure complete types coincide with atomic types, so
everything downstream compares types through :func:`atp`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .structure import FinStructure

EQ = "="

Literal = tuple[str, tuple[int, ...], bool]


@dataclass(frozen=True)
class AtomicType:
    """Canonical atomic type.

    Positions ``0..width-1`` are the free variables, ``width..width+len(params)-1``
    stand for the parameters. ``literals`` lists every atomic formula that
    mentions at least one free position, with its truth value, sorted.
    """

    width: int
    params: tuple[int, ...]
    literals: tuple[Literal, ...]

    def positive(self) -> list[Literal]:
        return [lit for lit in self.literals if lit[2]]

    def truth(self, name: str, *args: int) -> bool:
        for n, a, t in self.literals:
            if n == name and a == tuple(args):
                return t
        raise KeyError((name, args))

    def restrict(self, positions: Sequence[int]) -> "AtomicType":
        """Type of the free positions ``positions`` (re-indexed) over no parameters."""
        index = {p: i for i, p in enumerate(positions)}
        lits = [
            (n, tuple(index[x] for x in a), t)
            for n, a, t in self.literals
            if all(x in index for x in a)
        ]
        return AtomicType(len(positions), (), tuple(sorted(lits)))

    def render(self, names: Sequence[str]) -> list[str]:
        """Human-readable literals; ``names[i]`` names position ``i``."""
        out = []
        for n, a, t in self.literals:
            body = f"{names[a[0]]}={names[a[1]]}" if n == EQ else f"{n}({','.join(names[x] for x in a)})"
            out.append(body if t else "¬" + body)
        return out


def atp(S: FinStructure, free: Sequence[int], params: Sequence[int] = ()) -> AtomicType:
    free = tuple(int(v) for v in free)
    params = tuple(int(v) for v in params)
    S.check_element(*free, *params)
    elems = free + params
    w = len(free)
    positions = range(len(elems))
    lits: list[Literal] = []
    for name in S.signature.unary:
        rows = S.tables[name]
        for i in range(w):
            lits.append((name, (i,), (elems[i],) in rows))
    for name in S.signature.binary:
        rows = S.tables[name]
        for i in positions:
            for j in positions:
                if i < w or j < w:
                    lits.append((name, (i, j), (elems[i], elems[j]) in rows))
    for i in positions:
        for j in positions:
            if i < j and i < w:
                lits.append((EQ, (i, j), elems[i] == elems[j]))
    return AtomicType(w, params, tuple(sorted(lits)))


def same_type(S: FinStructure, x: Sequence[int], y: Sequence[int], params: Sequence[int] = ()) -> bool:
    return atp(S, x, params) == atp(S, y, params)


def pair_type_matrix(S: FinStructure) -> tuple[np.ndarray, list[AtomicType]]:
    """Index every ordered pair by its atomic 2-type over the empty set.

    Returns ``(T, types)`` with ``T[x, y]`` an index into ``types`` and
    ``types[T[x, y]] == atp(S, (x, y))``. Diagonal pairs get their own indices.
    """
    n = S.size
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64), []
    planes = []
    for name in S.signature.unary:
        u = S.unary_array(name)
        planes.append(np.broadcast_to(u[:, None], (n, n)))
        planes.append(np.broadcast_to(u[None, :], (n, n)))
    for name in S.signature.binary:
        m = S.matrix(name)
        d = np.diag(m)
        planes.append(m)
        planes.append(m.T)
        planes.append(np.broadcast_to(d[:, None], (n, n)))
        planes.append(np.broadcast_to(d[None, :], (n, n)))
    planes.append(np.eye(n, dtype=bool))
    bits = np.stack(planes, axis=-1).reshape(n * n, -1)
    packed = np.packbits(bits, axis=1)
    _, first, inverse = np.unique(packed, axis=0, return_index=True, return_inverse=True)
    T = inverse.reshape(n, n)
    types = [atp(S, divmod(int(k), n)) for k in first]
    return T, types
