"""Discovery of definable equivalence relations as unions of atomic 2-types."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .structure import FinStructure
from .types import EQ, AtomicType, pair_type_matrix


@dataclass(frozen=True)
class EquivRelDescriptor:
    """A binary relation defined as the diagonal plus a union of atomic 2-types.

    Whether the relation is an equivalence relation depends on the structure it
    is evaluated on; :meth:`is_equivalence` checks it per structure.
    """

    name: str
    accepted: frozenset[AtomicType]

    def relation(self, S: FinStructure) -> np.ndarray:
        T, types = pair_type_matrix(S)
        ids = [i for i, t in enumerate(types) if t in self.accepted]
        return np.isin(T, ids) | np.eye(S.size, dtype=bool)

    def is_equivalence(self, S: FinStructure) -> bool:
        rel = self.relation(S)
        labels = _labels(rel)
        return bool(np.array_equal(rel, labels[:, None] == labels[None, :]))

    def classes(self, S: FinStructure) -> list[list[int]]:
        """Classes of the relation; only meaningful if :meth:`is_equivalence` holds."""
        labels = _labels(self.relation(S))
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(labels.tolist()):
            groups.setdefault(lab, []).append(v)
        return sorted(groups.values())

    def holds(self, S: FinStructure, x: int, y: int) -> bool:
        return bool(self.relation(S)[x, y])


def equality_descriptor() -> EquivRelDescriptor:
    return EquivRelDescriptor("=", frozenset())


def total_descriptor(S: FinStructure) -> EquivRelDescriptor:
    _, types = pair_type_matrix(S)
    off = frozenset(t for t in types if not t.truth(EQ, 0, 1))
    return EquivRelDescriptor("total", off)


def _labels(rel: np.ndarray) -> np.ndarray:
    if rel.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    _, labels = connected_components(csr_matrix(rel), directed=False)
    return labels


def _partition_key(labels: np.ndarray) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(lab, len(seen)) for lab in labels.tolist())


def is_nontrivial(labels: np.ndarray) -> bool:
    """At least two classes and at least one class with two or more elements."""
    counts = np.bincount(labels) if labels.size else np.zeros(0, dtype=np.int64)
    return counts.size >= 2 and bool((counts >= 2).any())


def discover_equiv_relations(S: FinStructure) -> list[EquivRelDescriptor]:
    """Every union of reverse-closed atomic 2-types that is a nontrivial equivalence on ``S``.

    Results hold on this fragment only: transitivity is checked on ``S``.
    Output is sorted by number of classes (coarsest first), then by the
    partition itself, and deduplicated extensionally.
    """
    n = S.size
    if n < 2:
        return []
    T, types = pair_type_matrix(S)
    off = [i for i, t in enumerate(types) if not t.truth(EQ, 0, 1)]
    reverse = {}
    for i in off:
        xs, ys = np.nonzero(T == i)
        reverse[i] = int(T[ys[0], xs[0]])
    groups: list[tuple[int, ...]] = []
    done: set[int] = set()
    for i in off:
        if i in done:
            continue
        g = tuple(sorted({i, reverse[i]}))
        done.update(g)
        groups.append(g)
    planes = {g: np.isin(T, g) for g in groups}
    eye = np.eye(n, dtype=bool)
    found: dict[tuple[int, ...], EquivRelDescriptor] = {}
    order: list[tuple[int, tuple[int, ...]]] = []
    for size in range(1, len(groups) + 1):
        for chosen in combinations(groups, size):
            rel = eye.copy()
            for g in chosen:
                rel |= planes[g]
            labels = _labels(rel)
            if not is_nontrivial(labels):
                continue
            if not np.array_equal(rel, labels[:, None] == labels[None, :]):
                continue
            key = _partition_key(labels)
            if key in found:
                continue
            accepted = frozenset(types[i] for g in chosen for i in g)
            found[key] = EquivRelDescriptor("", accepted)
            order.append((int(labels.max()) + 1, key))
    out = []
    for idx, (_, key) in enumerate(sorted(order)):
        d = found[key]
        out.append(EquivRelDescriptor(f"R{idx}", d.accepted))
    return out
