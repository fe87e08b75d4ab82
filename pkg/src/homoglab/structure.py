"""Finite relational structures over unary/binary signatures."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np


class SignatureError(ValueError):
    pass


class ElementRangeError(IndexError):
    pass


@dataclass(frozen=True)
class Signature:
    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.relations]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate relation names in {names}")
        for name, arity in self.relations:
            if arity not in (1, 2):
                raise SignatureError(f"relation {name!r} has arity {arity}; only 1 or 2 allowed")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "Signature":
        return cls(tuple((str(n), int(a)) for n, a in pairs))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    @property
    def unary(self) -> tuple[str, ...]:
        return tuple(name for name, arity in self.relations if arity == 1)

    @property
    def binary(self) -> tuple[str, ...]:
        return tuple(name for name, arity in self.relations if arity == 2)

    def arity(self, name: str) -> int:
        for n, a in self.relations:
            if n == name:
                return a
        raise KeyError(name)

    def canonical(self) -> "Signature":
        return Signature(tuple(sorted(self.relations)))


@dataclass(frozen=True)
class FinStructure:
    """A finite structure with universe ``0..size-1``.

    ``tables`` maps each relation name to the frozenset of tuples that satisfy it.
    Instances are immutable; derived matrices are cached on first use.
    """

    signature: Signature
    size: int
    tables: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("size must be non-negative")
        tables = {}
        for name, arity in self.signature.relations:
            rows = frozenset(tuple(int(v) for v in t) for t in self.tables.get(name, ()))
            for t in rows:
                if len(t) != arity:
                    raise SignatureError(f"tuple {t} in {name!r} has width {len(t)}, expected {arity}")
                for v in t:
                    if not 0 <= v < self.size:
                        raise ElementRangeError(f"tuple {t} in {name!r} leaves the universe 0..{self.size - 1}")
            tables[name] = rows
        extra = set(self.tables) - set(tables)
        if extra:
            raise SignatureError(f"tables for undeclared relations: {sorted(extra)}")
        object.__setattr__(self, "tables", tables)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_matrices(cls, signature: Signature, size: int, unary=None, binary=None) -> "FinStructure":
        """Build from boolean arrays: ``unary[name]`` shape (n,), ``binary[name]`` shape (n, n)."""
        tables = {}
        for name, arr in (unary or {}).items():
            tables[name] = frozenset((int(i),) for i in np.flatnonzero(np.asarray(arr)))
        for name, arr in (binary or {}).items():
            xs, ys = np.nonzero(np.asarray(arr))
            tables[name] = frozenset(zip(xs.tolist(), ys.tolist()))
        return cls(signature, size, tables)

    # -- queries ----------------------------------------------------------------

    def check_element(self, *elements: int) -> None:
        for v in elements:
            if not isinstance(v, (int, np.integer)) or not 0 <= v < self.size:
                raise ElementRangeError(f"element {v!r} outside universe 0..{self.size - 1}")

    def holds(self, name: str, *args: int) -> bool:
        return tuple(args) in self.tables[name]

    @cached_property
    def _unary_arrays(self) -> dict[str, np.ndarray]:
        out = {}
        for name in self.signature.unary:
            arr = np.zeros(self.size, dtype=bool)
            for (v,) in self.tables[name]:
                arr[v] = True
            out[name] = arr
        return out

    @cached_property
    def _binary_arrays(self) -> dict[str, np.ndarray]:
        out = {}
        for name in self.signature.binary:
            arr = np.zeros((self.size, self.size), dtype=bool)
            for x, y in self.tables[name]:
                arr[x, y] = True
            arr.flags.writeable = False
            out[name] = arr
        return out

    def unary_array(self, name: str) -> np.ndarray:
        return self._unary_arrays[name]

    def matrix(self, name: str) -> np.ndarray:
        return self._binary_arrays[name]

    def induced(self, elements: Sequence[int]) -> "FinStructure":
        """Substructure on ``elements``; element ``elements[i]`` becomes ``i``."""
        self.check_element(*elements)
        index = {v: i for i, v in enumerate(elements)}
        if len(index) != len(elements):
            raise ValueError("induced() needs distinct elements")
        tables = {}
        for name, rows in self.tables.items():
            tables[name] = frozenset(
                tuple(index[v] for v in t) for t in rows if all(v in index for v in t)
            )
        return FinStructure(self.signature, len(elements), tables)

    # -- serialization -------------------------------------------------------------

    def to_dict(self) -> dict:
        sig = sorted(self.signature.relations)
        return {
            "signature": [{"name": n, "arity": a} for n, a in sig],
            "size": self.size,
            "relations": {n: [list(t) for t in sorted(self.tables[n])] for n, _ in sig},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "FinStructure":
        sig = Signature.of(*((r["name"], r["arity"]) for r in data["signature"]))
        rels = data.get("relations", {})
        return cls(sig, int(data["size"]), {n: frozenset(tuple(t) for t in rows) for n, rows in rels.items()})

    @classmethod
    def from_json(cls, text: str) -> "FinStructure":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, FinStructure):
            return NotImplemented
        return (
            self.signature.canonical() == other.signature.canonical()
            and self.size == other.size
            and self.tables == other.tables
        )

    def __hash__(self):
        return hash((self.signature.canonical(), self.size, tuple(sorted((k, tuple(sorted(v))) for k, v in self.tables.items()))))


def graph_signature() -> Signature:
    return Signature.of(("E", 2))


def graph(size: int, edges: Iterable[tuple[int, int]]) -> FinStructure:
    """Undirected simple graph as a symmetric ``E`` relation."""
    rows = set()
    for x, y in edges:
        if x == y:
            raise ValueError("loops are not allowed in a simple graph")
        rows.add((x, y))
        rows.add((y, x))
    return FinStructure(graph_signature(), size, {"E": frozenset(rows)})


def same_signature(a: FinStructure, b: FinStructure) -> bool:
    return a.signature.canonical() == b.signature.canonical()
