"""Strong embeddings, automorphism extension, homogeneity and amalgamation checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterator, Mapping, Sequence

import numpy as np

from .structure import FinStructure, SignatureError, same_signature
from .types import pair_type_matrix


def _search(A: FinStructure, B: FinStructure, fixed: Mapping[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    """Lexicographic backtracking with forward checking.

    Yields maps as tuples ``m`` with ``m[a]`` the image of ``a``. Pairs in
    ``fixed`` are imposed before the search starts.
    """
    nA, nB = A.size, B.size
    if nA > nB:
        return
    base = np.ones((nA, nB), dtype=bool)
    for name in A.signature.unary:
        ua, ub = A.unary_array(name), B.unary_array(name)
        base &= ua[:, None] == ub[None, :]
    binary = [(A.matrix(name), B.matrix(name)) for name in A.signature.binary]
    for ma, mb in binary:
        base &= np.diag(ma)[:, None] == np.diag(mb)[None, :]

    def narrow(cand: np.ndarray, a: int, b: int, rest: np.ndarray) -> np.ndarray:
        out = cand.copy()
        out[:, b] = False
        for ma, mb in binary:
            out[rest] &= mb[b][None, :] == ma[a, rest][:, None]
            out[rest] &= mb[:, b][None, :] == ma[rest, a][:, None]
        return out

    assignment = [-1] * nA
    cand = base
    fixed = dict(fixed or {})
    for a in sorted(fixed):
        b = fixed[a]
        if not cand[a, b]:
            return
        rest = np.array([x for x in range(nA) if assignment[x] < 0 and x != a], dtype=np.int64)
        assignment[a] = b
        cand = narrow(cand, a, b, rest)
        if rest.size and not cand[rest].any(axis=1).all():
            return
    order = [a for a in range(nA) if assignment[a] < 0]

    def rec(depth: int, cand: np.ndarray) -> Iterator[tuple[int, ...]]:
        if depth == len(order):
            yield tuple(assignment)
            return
        a = order[depth]
        rest = np.array(order[depth + 1:], dtype=np.int64)
        for b in np.flatnonzero(cand[a]).tolist():
            nxt = narrow(cand, a, b, rest)
            if rest.size and not nxt[rest].any(axis=1).all():
                continue
            assignment[a] = b
            yield from rec(depth + 1, nxt)
            assignment[a] = -1

    yield from rec(0, cand)


def find_embeddings(A: FinStructure, B: FinStructure, limit: int | None = None) -> list[tuple[int, ...]]:
    """All strong embeddings of ``A`` into ``B`` in lexicographic order (at most ``limit``)."""
    if not same_signature(A, B):
        raise SignatureError("find_embeddings needs structures over the same signature")
    out = []
    for m in _search(A, B):
        out.append(m)
        if limit is not None and len(out) >= limit:
            break
    return out


def extend_to_automorphism(S: FinStructure, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...] | None:
    """Some automorphism mapping ``u`` to ``v`` pointwise, or ``None``."""
    if len(u) != len(v):
        return None
    fixed = {}
    for x, y in zip(u, v):
        if fixed.get(x, y) != y:
            return None
        fixed[x] = y
    if len(set(fixed.values())) != len(fixed):
        return None
    return next(_search(S, S, fixed), None)


@dataclass(frozen=True)
class HomogeneityVerdict:
    homogeneous: bool
    checked_upto: int
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def __bool__(self):
        return self.homogeneous


def _injective_tuples(n: int, length: int) -> Iterator[tuple[int, ...]]:
    return permutations(range(n), length)


def is_homogeneous_upto(S: FinStructure, k: int) -> HomogeneityVerdict:
    """Check that equal atomic type implies same automorphism orbit for tuples of length <= k.

    On failure the witness is the first offending pair of smallest length: a
    class representative and a tuple of equal atomic type outside its orbit.
    """
    if k > S.size:
        raise ValueError(f"k={k} exceeds structure size {S.size}")
    T, _ = pair_type_matrix(S)
    generators: list[np.ndarray] = []
    for length in range(1, k + 1):
        classes: dict[tuple, list[tuple[int, ...]]] = {}
        for u in _injective_tuples(S.size, length):
            idx = np.array(u)
            key = tuple(T[np.ix_(idx, idx)].ravel().tolist())
            classes.setdefault(key, []).append(u)
        for key in sorted(classes):
            members = classes[key]
            rep = members[0]
            orbit = _orbit(rep, generators)
            for v in members:
                if v in orbit:
                    continue
                sigma = extend_to_automorphism(S, rep, v)
                if sigma is None:
                    return HomogeneityVerdict(False, length, (rep, v))
                generators.append(np.array(sigma))
                orbit = _orbit(rep, generators)
    return HomogeneityVerdict(True, k)


def _orbit(start: tuple[int, ...], generators: list[np.ndarray]) -> set[tuple[int, ...]]:
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for t in frontier:
            idx = np.array(t)
            for g in generators:
                img = tuple(g[idx].tolist())
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return seen


@dataclass(frozen=True)
class AmalgamationFailure:
    base: int
    left: int
    right: int
    left_map: tuple[int, ...]
    right_map: tuple[int, ...]


def amalgamation_check(instances: Sequence[FinStructure], k: int) -> list[AmalgamationFailure]:
    """Find spans ``B1 <- A -> B2`` (all of size <= k) with no amalgam among ``instances``."""
    if instances:
        first = instances[0]
        for other in instances[1:]:
            if not same_signature(first, other):
                raise SignatureError("amalgamation_check needs a shared signature")
    small = [i for i, s in enumerate(instances) if s.size <= k]
    failures = []
    for ia in small:
        A = instances[ia]
        for i1 in small:
            B1 = instances[i1]
            maps1 = find_embeddings(A, B1)
            if not maps1:
                continue
            for i2 in small:
                if i2 < i1:
                    continue
                B2 = instances[i2]
                for f1 in maps1:
                    for f2 in find_embeddings(A, B2):
                        if not _has_amalgam(B1, B2, f1, f2, instances):
                            failures.append(AmalgamationFailure(ia, i1, i2, f1, f2))
    return failures


def _has_amalgam(B1, B2, f1, f2, instances) -> bool:
    for C in instances:
        if C.size < max(B1.size, B2.size):
            continue
        for g1 in _search(B1, C):
            fixed = {f2[a]: g1[f1[a]] for a in range(len(f1))}
            if next(_search(B2, C, fixed), None) is not None:
                return True
    return False
