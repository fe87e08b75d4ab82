"""Shared plumbing for the built-in structure families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..structure import FinStructure, Signature
from ..types import EQ, AtomicType, atp


class Family:
    """A class of finite structures closed under substructures and amalgamation.

    Subclasses provide the age-membership test that the generic dividing
    oracle and extension solver run on, plus the closed-form dividing rule the
    oracle is compared against.
    """

    name = "family"
    signature: Signature
    # how dividing over a class imaginary is decided: "equivalence" or "feet"
    imaginary_rule = "equivalence"
    # conflicts over at most this many parameters are shrunk literal by literal
    literal_minimization = 2

    def in_age(self, S: FinStructure) -> bool:
        raise NotImplementedError

    def pair_types(self) -> list[AtomicType]:
        """Atomic 2-types over the empty set of two distinct elements that occur in the age."""
        raise NotImplementedError

    def divides(self, frag: "Fragment", a: Sequence[int], b: Sequence[int], base: Sequence[int]) -> bool:
        raise NotImplementedError

    def premise_rule(self):
        """Rule deciding dividing and types over class imaginaries; ``None`` if the family has none."""
        return ClassRule()

    def extension_deficits(self, frag: "Fragment", k: int, m: int) -> list:
        """One-point types over ``<= k`` core elements with fewer than ``m`` realizations."""
        from ..extend import type_deficits

        return type_deficits(frag, k, m, elements=frag.info.get("core"))

    def axiom_violations(self, frag: "Fragment") -> list[str]:
        return [] if self.in_age(frag.structure) else ["fragment is not in the age"]


@dataclass(frozen=True)
class Fragment:
    """A finite piece of a family's generic structure."""

    family: Family
    structure: FinStructure
    info: dict = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return self.structure.size

    def to_json(self) -> str:
        return self.structure.to_json()


def two_point_type(S: FinStructure) -> AtomicType:
    return atp(S, (0, 1))


def one_point_extension(S: FinStructure, elems: Sequence[int], types: Sequence[AtomicType]) -> FinStructure | None:
    """The structure on ``elems`` plus a new last point ``x`` with ``atp(x, elems[i]) = types[i]``.

    Returns ``None`` when the types disagree about ``x`` itself or about an
    element of ``elems``. Age membership is not checked here.
    """
    base = S.induced(list(elems))
    n = base.size
    sig = S.signature
    unary = {name: np.zeros(n + 1, dtype=bool) for name in sig.unary}
    binary = {name: np.zeros((n + 1, n + 1), dtype=bool) for name in sig.binary}
    for name in sig.unary:
        unary[name][:n] = base.unary_array(name)
    for name in sig.binary:
        binary[name][:n, :n] = base.matrix(name)
    own: dict[tuple, bool] = {}
    for i, t in enumerate(types):
        if t.width != 2 or t.truth(EQ, 0, 1):
            return None
        for name, args, truth in t.literals:
            if name == EQ:
                continue
            if all(p == 0 for p in args):
                if own.setdefault((name, args), truth) != truth:
                    return None
            elif all(p == 1 for p in args):
                actual = base.holds(name, *([i] * len(args)))
                if actual != truth:
                    return None
            else:
                ends = tuple(n if p == 0 else i for p in args)
                binary[name][ends] = truth
    if not types:
        return None
    for (name, args), truth in own.items():
        if len(args) == 1:
            unary[name][n] = truth
        else:
            binary[name][n, n] = truth
    return FinStructure.from_matrices(sig, n + 1, unary, binary)


def divides_by_classes(frag: Fragment, relations, algebraic, a: int, b: int, base: Sequence[int]) -> bool:
    """Dividing in a structure with trivial dependence coordinatized by equivalence relations.

    ``relations`` maps names to boolean matrices (equality is always added);
    ``algebraic(name, a, base)`` says whether the class of ``a`` is named by ``base``.
    Divides iff ``b`` shares some class with ``a`` that ``base`` does not pin down.
    """
    if b in base or a in base:
        return False
    if a == b:
        return True
    return any(rel[a, b] and not algebraic(name, a, base) for name, rel in relations.items())


# -- class imaginaries -----------------------------------------------------------------
# Dividing over c_R, for R an equivalence relation, in the trivial-dependence setting:
# x divides with Y over c_R iff x shares some class (of a definable equivalence
# relation, or equality) with a member of Y and that class is not algebraic over c_R.
# Types over c_R are read off as the set of pair types toward the R-class of c.


def _cache(frag: Fragment, key: str, make):
    if key not in frag.info:
        frag.info[key] = make()
    return frag.info[key]


def class_labels(frag: Fragment) -> dict[str, np.ndarray]:
    """Class labels of equality and every discovered equivalence relation on the fragment."""
    from ..equiv import _labels, discover_equiv_relations

    def make():
        S = frag.structure
        out = {"=": np.arange(S.size)}
        for d in discover_equiv_relations(S):
            out[d.name] = _labels(d.relation(S))
        return out

    return _cache(frag, "_class_labels", make)


def _pair_table(frag: Fragment):
    from ..types import pair_type_matrix

    return _cache(frag, "_pair_types", lambda: pair_type_matrix(frag.structure))


def type_over_class(frag: Fragment, x: int, members: Sequence[int]) -> tuple:
    """Finite stand-in for the type of ``x`` over the imaginary whose class is ``members``."""
    return _signatures(frag, members)[x]


def _signatures(frag: Fragment, members: Sequence[int]) -> list[tuple]:
    cache = frag.info.setdefault("_class_sigs", {})
    key = tuple(members)
    if key not in cache:
        T, _ = _pair_table(frag)
        sub = T[:, list(key)]
        cache[key] = [(int(T[z, z]), frozenset(sub[z].tolist())) for z in range(frag.size)]
    return cache[key]


def _algebraic_sigs(frag: Fragment, name: str, members: Sequence[int], m: int) -> set:
    """Signatures over the imaginary whose realizations meet fewer than ``m`` classes of ``name``."""
    cache = frag.info.setdefault("_algebraic", {})
    key = (name, tuple(members), m)
    if key not in cache:
        labels = class_labels(frag)[name]
        seen: dict[tuple, set] = {}
        for z, sig in enumerate(_signatures(frag, members)):
            seen.setdefault(sig, set()).add(int(labels[z]))
        cache[key] = {sig for sig, labs in seen.items() if len(labs) < m}
    return cache[key]


def class_algebraic(frag: Fragment, x: int, name: str, members: Sequence[int], m: int = 3) -> bool:
    """Is the class of ``x`` under relation ``name`` algebraic over the imaginary ``members``?

    Yes when the realizations of the type of ``x`` over it meet fewer than ``m`` classes.
    """
    return type_over_class(frag, x, members) in _algebraic_sigs(frag, name, members, m)


class ClassRule:
    """Premise rule for class imaginaries shared by the families coordinatized by equivalences."""

    def __init__(self, m: int = 3):
        self.m = m

    def divides(self, frag: Fragment, x: int, Y: Sequence[int], members: Sequence[int], c: int) -> bool:
        for name, labels in class_labels(frag).items():
            for y in Y:
                if labels[x] == labels[y] and not class_algebraic(frag, x, name, members, self.m):
                    return True
        return False

    def acl_classes(self, frag: Fragment, members: Sequence[int]) -> list[tuple[str, list[int]]]:
        """Classes (of discovered relations and equality) algebraic over the imaginary."""
        cache = frag.info.setdefault("_acl", {})
        key = (tuple(members), self.m)
        if key not in cache:
            out = []
            for name, labels in class_labels(frag).items():
                for lab in sorted(set(labels.tolist())):
                    K = np.flatnonzero(labels == lab).tolist()
                    if any(class_algebraic(frag, z, name, members, self.m) for z in K):
                        out.append((name, K))
            cache[key] = out
        return cache[key]

    def type_eq(self, frag: Fragment, a: int, b: int, members: Sequence[int], c: int, acl: bool = True) -> bool:
        if type_over_class(frag, a, members) != type_over_class(frag, b, members):
            return False
        if not acl:
            return True
        for _, K in self.acl_classes(frag, members):
            if type_over_class(frag, a, K) != type_over_class(frag, b, K):
                return False
        return True


class RefinementRule(ClassRule):
    """For families without finite splittings: the E-class of x is pinned down by c_R
    exactly when it is the E-class of c and the R-class of c lies inside it."""

    def _algebraic(self, frag: Fragment, x: int, name: str, members: Sequence[int]) -> bool:
        labels = class_labels(frag)[name]
        lab = labels[members[0]]
        return labels[x] == lab and all(labels[z] == lab for z in members)

    def divides(self, frag, x, Y, members, c) -> bool:
        for name, labels in class_labels(frag).items():
            for y in Y:
                if labels[x] == labels[y] and not self._algebraic(frag, x, name, members):
                    return True
        return False

    def acl_classes(self, frag, members):
        out = []
        for name, labels in class_labels(frag).items():
            lab = labels[members[0]]
            if all(labels[z] == lab for z in members):
                out.append((name, np.flatnonzero(labels == lab).tolist()))
        return out
