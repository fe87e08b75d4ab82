"""Bipedes: bodies on pairs of feet, one blue leg and one red leg per body.

Feet are ``0..n-1``; the body on feet ``i < j`` is the tuple ``(i, j)``. A
colouring is a tournament on the feet: ``V[x][y] = 0`` when the body ``{x, y}``
has its blue leg at ``x``. The full structure N has feet and bodies with
relations F, L, B, R; the reduct M lives on bodies and has one relation per
pair type of distinct bodies, named by a code:

* ``S<sa><sb><o>``: the bodies share one foot, reached by the first body's
  ``sa``-coloured leg and the second body's ``sb``-coloured leg (B or R);
  ``o`` is ``u`` if the first body's other foot is the blue end of the body on
  the two unshared feet, ``v`` otherwise.
* ``D<w1><w2><w3><w4>``: disjoint bodies; letter ``a`` or ``b`` tells which
  side is the blue end of the bodies on (aB, bB), (aB, bR), (aR, bB), (aR, bR).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable

import numpy as np

from ..saturate import Demand, ValuedModel, saturate
from ..structure import FinStructure, Signature
from ..types import atp
from .base import Family, Fragment

N_SIGNATURE = Signature.of(("F", 1), ("L", 2), ("B", 2), ("R", 2))

SHARED = [f"S{sa}{sb}{o}" for sa, sb, o in product("BR", "BR", "uv")]
DISJOINT = ["D" + "".join(w) for w in product("ab", repeat=4)]
CODES = SHARED + DISJOINT
M_SIGNATURE = Signature.of(*((c, 2) for c in CODES))


def reverse_code(code: str) -> str:
    flip = {"a": "b", "b": "a", "u": "v", "v": "u"}
    if code[0] == "S":
        return f"S{code[2]}{code[1]}{flip[code[3]]}"
    w = code[1:]
    return "D" + flip[w[0]] + flip[w[2]] + flip[w[1]] + flip[w[3]]


Body = tuple[int, int]


class TournamentModel(ValuedModel):
    options = (0, 1)

    def __init__(self, V=None):
        self.V = [list(r) for r in (V or [])]

    def size(self):
        return len(self.V)

    def value(self, x, p):
        return self.V[x][p]

    def append(self, assignment):
        n = len(self.V)
        row = [assignment[p] for p in range(n)]
        for p in range(n):
            self.V[p].append(1 - row[p])
        self.V.append(row + [-1])
        return n


@dataclass(frozen=True)
class BipedeFragment:
    """Feet ``0..n-1`` with every body on them; ``coloring[x][y] = 0`` iff {x, y} is blue at x."""

    coloring: tuple[tuple[int, ...], ...]
    core: int
    satLevel: tuple[int, int] = (0, 0)

    @property
    def nFeet(self) -> int:
        return len(self.coloring)

    @property
    def feet(self) -> list[int]:
        return list(range(self.nFeet))

    @property
    def bodies(self) -> list[Body]:
        return list(combinations(range(self.nFeet), 2))

    def body_index(self, body: Iterable[int]) -> int:
        i, j = sorted(body)
        n = self.nFeet
        return i * n - i * (i + 1) // 2 + (j - i - 1)

    def blue_end(self, x: int, y: int) -> int:
        return x if self.coloring[x][y] == 0 else y

    def blue(self, body: Body) -> int:
        return self.blue_end(*body)

    def red(self, body: Body) -> int:
        i, j = body
        return j if self.blue(body) == i else i

    def code(self, a: Body, b: Body) -> str:
        shared = set(a) & set(b)
        if len(shared) == 2:
            raise ValueError("code is defined for distinct bodies")
        if shared:
            (s,) = shared
            sa = "B" if self.blue(a) == s else "R"
            sb = "B" if self.blue(b) == s else "R"
            u = a[0] if a[1] == s else a[1]
            v = b[0] if b[1] == s else b[1]
            return f"S{sa}{sb}{'u' if self.blue_end(u, v) == u else 'v'}"
        ends = [(self.blue(a), self.blue(b)), (self.blue(a), self.red(b)), (self.red(a), self.blue(b)), (self.red(a), self.red(b))]
        return "D" + "".join("a" if self.blue_end(x, y) == x else "b" for x, y in ends)

    def n_structure(self) -> FinStructure:
        """Feet first, then bodies in lexicographic order."""
        n = self.nFeet
        bodies = self.bodies
        size = n + len(bodies)
        F = np.zeros(size, dtype=bool)
        F[:n] = True
        L = np.zeros((size, size), dtype=bool)
        B = np.zeros_like(L)
        R = np.zeros_like(L)
        for k, body in enumerate(bodies):
            x = n + k
            L[x, list(body)] = True
            B[x, self.blue(body)] = True
            R[x, self.red(body)] = True
        return FinStructure.from_matrices(N_SIGNATURE, size, {"F": F}, {"L": L, "B": B, "R": R})

    def m_structure(self) -> FinStructure:
        bodies = self.bodies
        size = len(bodies)
        mats = {c: np.zeros((size, size), dtype=bool) for c in CODES}
        for x, a in enumerate(bodies):
            for y in range(x + 1, size):
                c = self.code(a, bodies[y])
                mats[c][x, y] = True
                mats[reverse_code(c)][y, x] = True
        return FinStructure.from_matrices(M_SIGNATURE, size, binary=mats)

    def to_dict(self) -> dict:
        return {"coloring": [list(r) for r in self.coloring], "core": self.core, "satLevel": list(self.satLevel)}


def build_bipede(nFeet: int, k: int, m: int = 3) -> BipedeFragment:
    """Append feet until every ``<= k`` core feet and every colour pattern have ``m`` partner feet.

    The core starts with the body on ``i < j`` blue at ``i`` when ``i + j`` is
    even; appended feet take the colours the saturation engine picks.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    V = [[-1 if i == j else ((i + j) % 2 if i < j else 1 - (i + j) % 2) for j in range(nFeet)] for i in range(nFeet)]
    model = TournamentModel(V)
    saturate(model, k, m, core=nFeet)
    return BipedeFragment(tuple(tuple(r) for r in model.V), nFeet, (k, m))


def cl(A: Iterable, frag: BipedeFragment | None = None) -> frozenset:
    """Feet of every body in ``A``, then the body on every pair of feet present."""
    A = set(A)
    if frag is not None:
        for x in A:
            for f in (x if isinstance(x, tuple) else (x,)):
                if not 0 <= f < frag.nFeet:
                    raise ValueError(f"{x!r} lies outside the fragment")
    closed = set(A)
    for x in A:
        if isinstance(x, tuple):
            closed.update(x)
    feet = sorted(x for x in closed if not isinstance(x, tuple))
    closed.update(combinations(feet, 2))
    return frozenset(closed)


def divides_bipede(abar, bbar, cbar) -> bool:
    # b is read together with the base: a body on one foot of b and one of c is algebraic over bc
    clb, clc = cl(tuple(bbar) + tuple(cbar)), cl(cbar)
    for a in abar:
        if a in clb and a not in clc:
            return True
        if any(set(a) & set(b) for b in bbar) and not any(set(a) & set(c) for c in cbar):
            return True
    return False


class _Feet:
    """Union-find over (body, slot) pairs; slot 0 is the blue leg, 1 the red one."""

    def __init__(self, n: int):
        self.parent = list(range(2 * n))

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, u: int, v: int) -> None:
        ru, rv = self.find(u), self.find(v)
        if ru != rv:
            self.parent[max(ru, rv)] = min(ru, rv)


SLOT = {"B": 0, "R": 1}


def _code_table(S: FinStructure) -> list[list[str | None]] | None:
    n = S.size
    table: list[list[str | None]] = [[None] * n for _ in range(n)]
    count = np.zeros((n, n), dtype=np.int64)
    for c in CODES:
        M = S.matrix(c)
        count += M
        for x, y in zip(*np.nonzero(M)):
            table[x][y] = c
    off = ~np.eye(n, dtype=bool)
    if (count[off] != 1).any() or count.diagonal().any():
        return None
    return table


def m_in_age(S: FinStructure) -> bool:
    """Can these bodies, with these pairwise codes, be drawn on feet with a consistent colouring?"""
    table = _code_table(S)
    if table is None:
        return False
    n = S.size
    uf = _Feet(n)
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            c = table[x][y]
            if table[y][x] != reverse_code(c):
                return False
            if c[0] == "S":
                uf.union(2 * x + SLOT[c[1]], 2 * y + SLOT[c[2]])
    foot = [uf.find(v) for v in range(2 * n)]
    if any(foot[2 * x] == foot[2 * x + 1] for x in range(n)):
        return False
    blue: dict[frozenset, int] = {}

    def orient(u: int, v: int, b: int) -> bool:
        return blue.setdefault(frozenset((u, v)), b) == b

    for x in range(n):
        if not orient(foot[2 * x], foot[2 * x + 1], foot[2 * x]):
            return False
    for x in range(n):
        for y in range(x + 1, n):
            c = table[x][y]
            shared = {(s, t) for s in (0, 1) for t in (0, 1) if foot[2 * x + s] == foot[2 * y + t]}
            if c[0] == "S":
                sa, sb = SLOT[c[1]], SLOT[c[2]]
                if shared != {(sa, sb)}:
                    return False
                u, v = foot[2 * x + 1 - sa], foot[2 * y + 1 - sb]
                if not orient(u, v, u if c[3] == "u" else v):
                    return False
            else:
                if shared:
                    return False
                for w, (s, t) in zip(c[1:], ((0, 0), (0, 1), (1, 0), (1, 1))):
                    u, v = foot[2 * x + s], foot[2 * y + t]
                    if not orient(u, v, u if w == "a" else v):
                        return False
    return True


class BipedeFamily(Family):
    name = "bipede"
    signature = M_SIGNATURE
    imaginary_rule = "feet"
    literal_minimization = 0

    def in_age(self, S: FinStructure) -> bool:
        return m_in_age(S)

    def pair_types(self):
        if not hasattr(self, "_pairs"):
            out = []
            for c in CODES:
                mats = {name: np.zeros((2, 2), dtype=bool) for name in CODES}
                mats[c][0, 1] = True
                mats[reverse_code(c)][1, 0] = True
                out.append(atp(FinStructure.from_matrices(M_SIGNATURE, 2, binary=mats), (0, 1)))
            self._pairs = out
        return self._pairs

    def fragment(self, bf: BipedeFragment) -> Fragment:
        return Fragment(self, bf.m_structure(), {"bipede": bf})

    def divides(self, frag, a, b, base):
        bodies = frag.info["bipede"].bodies
        return divides_bipede([bodies[x] for x in a], [bodies[x] for x in b], [bodies[x] for x in base])

    def premise_rule(self):
        return FeetRule()

    def build(self, N: int | None, k: int, m: int = 3) -> Fragment:
        """``N`` is the number of core feet."""
        frag = self.fragment(build_bipede(N if N is not None else k + 1, k, m))
        frag.info.update(k=k, m=m)
        return frag

    def extension_deficits(self, frag, k, m):
        """Checked on the feet: every colour pattern toward ``<= k`` core feet needs ``m`` feet."""
        bf: BipedeFragment = frag.info["bipede"]
        out = []
        for size in range(1, k + 1):
            for A in combinations(range(bf.core), size):
                counts: dict[tuple, int] = {}
                for x in range(bf.nFeet):
                    if x not in A:
                        key = tuple(bf.coloring[x][a] for a in A)
                        counts[key] = counts.get(key, 0) + 1
                for key in product((0, 1), repeat=size):
                    if counts.get(key, 0) < m:
                        out.append(Demand(A, key))
        return out


class FeetRule:
    """Class imaginaries of the bipede read through the feet they pin down.

    An E_B-class is its blue foot, an E_R-class its red foot, an equality class
    the body with both feet, the total class nothing.
    """

    def base(self, frag: Fragment, members, c: int) -> tuple[set[int], list[Body]]:
        bf: BipedeFragment = frag.info["bipede"]
        bodies = bf.bodies
        body = bodies[c]
        ms = set(members)
        if ms == {c}:
            return set(body), [body]
        if len(ms) == len(bodies):
            return set(), []
        for pick in (bf.blue, bf.red):
            f = pick(body)
            if all(pick(bodies[z]) == f for z in ms):
                return {f}, []
        raise ValueError("class is not one of E_B, E_R, equality or total")

    def divides(self, frag, x, Y, members, c) -> bool:
        bodies = frag.info["bipede"].bodies
        feet, named = self.base(frag, members, c)
        X = bodies[x]
        Yb = [bodies[y] for y in Y]
        if X in cl(Yb + list(feet) + named) and X not in cl(list(feet) + named):
            return True
        return any(set(X) & set(y) for y in Yb) and not set(X) & feet

    def _pattern(self, bf: BipedeFragment, X: Body, feet) -> tuple:
        # a foot off X still sees how the bodies joining it to X's legs are coloured
        out = []
        for f in sorted(feet):
            if f in X:
                out.append("B" if bf.blue(X) == f else "R")
            else:
                out.append("".join("x" if bf.blue_end(g, f) == g else "f" for g in (bf.blue(X), bf.red(X))))
        return tuple(out)

    def type_eq(self, frag, a, b, members, c, acl: bool = True) -> bool:
        bf: BipedeFragment = frag.info["bipede"]
        bodies = bf.bodies
        feet, named = self.base(frag, members, c)
        A, Bd = bodies[a], bodies[b]
        if self._pattern(bf, A, feet) != self._pattern(bf, Bd, feet):
            return False
        for body in named:
            ka = "=" if A == body else bf.code(A, body)
            kb = "=" if Bd == body else bf.code(Bd, body)
            if ka != kb:
                return False
        return True


def e_b(frag: BipedeFragment) -> np.ndarray:
    """Class labels of E_B: bodies sharing the foot at the end of their blue legs."""
    return np.array([frag.blue(b) for b in frag.bodies])


def e_r(frag: BipedeFragment) -> np.ndarray:
    return np.array([frag.red(b) for b in frag.bodies])


def find_pattern(bf: BipedeFragment):
    """Distinct feet ``i, j, k, l, m`` with B(a,j), R(c,j), B(b,l), R(d,l) for the bodies below."""
    n = bf.nFeet
    for j, l in product(range(n), repeat=2):
        if j == l or bf.blue_end(j, l) != l:  # c = {j, l} must be red at j
            continue
        for i in range(n):
            if i in (j, l) or bf.blue_end(i, j) != j:
                continue
            for k in range(n):
                if k in (i, j, l) or bf.blue_end(k, l) != l:
                    continue
                for m in range(n):
                    if m in (i, j, k, l) or bf.blue_end(l, m) != m:
                        continue
                    return i, j, k, l, m
    return None


def body(x: int, y: int) -> Body:
    return (min(x, y), max(x, y))


def forced_trace(bf: BipedeFragment, a: Body, c: Body, b: Body, d: Body) -> str | None:
    """Follow the forced choice of a solution on the feet and name the literal that breaks.

    A solution e must meet c where a does, with a's colour there; it must meet d
    as b does, and cannot be c. The colour e then shows at the foot it shares
    with d is compared with b's.
    """
    (j,) = set(a) & set(c)
    colour_j = "B" if bf.blue(a) == j else "R"
    (l,) = set(b) & set(d)
    (m,) = set(d) - {l}
    other = [x for x in d if x != j]
    for x in other:
        e = body(j, x)
        if e == c or e == d:
            continue
        # the colour of e at x is the opposite of its colour at j
        colour_x = "R" if colour_j == "B" else "B"
        want = "B" if bf.blue(b) == l else "R"
        if x == m and colour_x != want:
            return f"{colour_x}(e,m) contradicts tp(e,d)=tp(b,d)"
    return None
