"""Deterministic greedy saturation for extension properties.

A *valued* model is one where a new point is described by one value toward
each existing point (a distance, a leg colour). Its one-point extension type
over a set ``A`` is then the tuple of values toward the members of ``A``.
The engine sweeps over demands ``(A, key)`` round-robin and appends a fresh
point whenever a demand has fewer than ``m`` realizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence


class SaturationInfeasible(RuntimeError):
    def __init__(self, message, demand=None):
        super().__init__(message)
        self.demand = demand


@dataclass(frozen=True)
class Demand:
    subset: tuple[int, ...]
    key: tuple

    def __str__(self):
        return f"type {self.key} over {list(self.subset)}"


class ValuedModel:
    """Interface for the saturation engine; subclasses hold the mutable build state."""

    options: tuple[int, ...] = ()

    def size(self) -> int:
        raise NotImplementedError

    def value(self, x: int, p: int) -> int:
        raise NotImplementedError

    def admissible(self, assignment: dict[int, int]) -> bool:
        """Can a new point take these values toward the given points?"""
        return True

    def append(self, assignment: dict[int, int]) -> int:
        raise NotImplementedError


def demand_keys(model: ValuedModel, A: Sequence[int]) -> list[tuple]:
    keys = []
    for key in product(model.options, repeat=len(A)):
        if model.admissible(dict(zip(A, key))):
            keys.append(key)
    return keys


def _counts(model: ValuedModel, subsets) -> dict[tuple, dict[tuple, int]]:
    n = model.size()
    out: dict[tuple, dict[tuple, int]] = {}
    for A in subsets:
        table: dict[tuple, int] = {}
        inside = set(A)
        for x in range(n):
            if x in inside:
                continue
            key = tuple(model.value(x, a) for a in A)
            table[key] = table.get(key, 0) + 1
        out[A] = table
    return out


def saturate(
    model: ValuedModel,
    k: int,
    m: int,
    *,
    core: int | None = None,
    max_size: int | None = None,
) -> list[Demand]:
    """Append points until every demand over ``<= k``-subsets has ``m`` realizations.

    Subsets range over the first ``core`` points, or over all points (including
    ones appended along the way) when ``core`` is ``None``. Returns the demands
    that triggered appends, in order. Raises :class:`SaturationInfeasible` when
    the model would grow beyond ``max_size``.
    """
    log: list[Demand] = []
    while True:
        n_core = model.size() if core is None else core
        subsets = [A for size in range(k + 1) for A in combinations(range(n_core), size)]
        counts = _counts(model, subsets)
        appended = False
        for A in subsets:
            for key in demand_keys(model, A):
                while counts[A].get(key, 0) < m:
                    if max_size is not None and model.size() >= max_size:
                        raise SaturationInfeasible(
                            f"size bound {max_size} reached before realizing {Demand(A, key)} {m} times",
                            Demand(A, key),
                        )
                    _append_for(model, A, key, counts, m, k, n_core)
                    log.append(Demand(A, key))
                    appended = True
                    counts = _counts(model, subsets)
        if not appended:
            return log


def _append_for(model: ValuedModel, A, key, counts, m: int, k: int, n_core: int) -> int:
    assignment = dict(zip(A, key))
    order = [p for p in range(model.size()) if p not in assignment]
    for p in order:
        best = None
        for v in model.options:
            trial = dict(assignment)
            trial[p] = v
            if not model.admissible(trial):
                continue
            score = _score(trial, p, counts, m, k, n_core)
            if best is None or score > best[0]:
                best = (score, v)
        if best is None:
            raise SaturationInfeasible(f"no admissible value toward point {p}")
        assignment[p] = best[1]
    return model.append(assignment)


def _score(assignment, p, counts, m, k, n_core):
    """Deficit relieved by choosing ``assignment[p]``; larger is better."""
    if p >= n_core:
        return (0, 0)
    others = [q for q in assignment if q != p and q < n_core]
    primary = secondary = 0
    for size in range(0, k):
        for rest in combinations(sorted(others), size):
            B = tuple(sorted(rest + (p,)))
            key = tuple(assignment[b] for b in B)
            have = counts.get(B, {}).get(key, 0)
            primary += max(0, m - have)
            secondary += max(0, 2 * m - have)
    return (primary, secondary)


def pair_deficit(V, options, m: int, key_ok=None) -> tuple[int, list[Demand]]:
    """Total shortfall of realizations over subsets of size <= 2 of a valued matrix.

    ``V[x, p]`` is the value of ``x`` toward ``p``; the diagonal holds a value
    outside ``options``. ``key_ok(v_pq, v1, v2)`` filters admissible keys over
    a pair ``(p, q)`` given the value between them.
    """
    import numpy as np

    n = V.shape[0]
    onehot = {v: (V == v).astype(np.int64) for v in options}
    total = max(0, m - n)
    missing: list[Demand] = []
    if total:
        missing.append(Demand((), ()))
    for v in options:
        col = onehot[v].sum(axis=0)
        short = np.maximum(0, m - col)
        total += int(short.sum())
        for p in np.flatnonzero(short).tolist():
            missing.append(Demand((p,), (v,)))
    iu = np.triu_indices(n, 1)
    for v1 in options:
        for v2 in options:
            C = onehot[v1].T @ onehot[v2]
            short = np.maximum(0, m - C)[iu]
            if key_ok is not None:
                ok = np.array([key_ok(int(V[p, q]), v1, v2) for p, q in zip(*iu)], dtype=bool)
                short = np.where(ok, short, 0)
            total += int(short.sum())
            for idx in np.flatnonzero(short).tolist():
                missing.append(Demand((int(iu[0][idx]), int(iu[1][idx])), (v1, v2)))
    missing.sort(key=lambda d: (len(d.subset), d.subset, d.key))
    return total, missing


def repair(V, options, m: int, moves, apply, key_ok=None, *, seed: int = 0, max_steps: int = 20000):
    """Deterministic hill climbing on a fixed-size valued matrix.

    ``moves(V, rng)`` proposes a move, ``apply(V, move)`` returns the changed
    copy (or ``None`` if the move breaks the model's axioms). Sideways moves
    are accepted. Returns the best matrix found and its remaining demands.
    """
    import random

    rng = random.Random(seed)
    best, missing = pair_deficit(V, options, m, key_ok)
    for _ in range(max_steps):
        if best == 0:
            break
        W = apply(V, moves(V, rng))
        if W is None:
            continue
        score, miss = pair_deficit(W, options, m, key_ok)
        if score <= best:
            V, best, missing = W, score, miss
    return V, missing


def saturate_bipartite(V: list[list[int]], k: int, m: int, core_rows: int, core_cols: int) -> list[list[int]]:
    """Saturate a 0/1 matrix for both sorts.

    Every ``<= k`` core rows and every bit pattern on them get ``m`` columns
    showing that pattern, and symmetrically for core columns. New columns are
    appended first, then new rows; free bits follow the deficit score.
    """
    cols = _append_lines([list(c) for c in zip(*V)], len(V), core_rows, k, m)
    rows = _append_lines([list(r) for r in zip(*cols)], len(cols), core_cols, k, m)
    return rows


def _append_lines(lines: list[list[int]], n: int, n_core: int, k: int, m: int) -> list[list[int]]:
    """Append length-``n`` 0/1 lines until the core positions see every pattern ``m`` times."""
    lines = [list(line) for line in lines]
    subsets = [A for size in range(1, k + 1) for A in combinations(range(n_core), size)]

    def counts():
        out = {}
        for A in subsets:
            table: dict = {}
            for line in lines:
                key = tuple(line[a] for a in A)
                table[key] = table.get(key, 0) + 1
            out[A] = table
        return out

    table = counts()
    for A in subsets:
        for key in product((0, 1), repeat=len(A)):
            while table[A].get(key, 0) < m:
                assignment = dict(zip(A, key))
                for p in range(n):
                    if p not in assignment:
                        # ties go to 0
                        s0 = _score({**assignment, p: 0}, p, table, m, k, n_core)
                        s1 = _score({**assignment, p: 1}, p, table, m, k, n_core)
                        assignment[p] = 1 if s1 > s0 else 0
                lines.append([assignment[p] for p in range(n)])
                table = counts()
    return lines
