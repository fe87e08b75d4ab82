"""Reducing an extension problem to a chain of two-type problems, and replaying the chain.

A reference is either a fragment element (an ``int``) or the name of a point
produced earlier in the chain (``"s3"`` for the output of step 3, ``"e2"`` for
the second coordinate of the final solution). A parameter is a pair
``(x, y)``: the prescribed type is read off at ``x`` and demanded at ``y``. The
two differ exactly where a coordinate already solved stands in for the
element it copies, and those pairs are the recorded substitutions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from .families.base import Fragment, one_point_extension
from .indep import ExtensionProblem, from_pair_types
from .types import EQ, AtomicType, atp

Ref = Union[int, str]
Param = tuple[Ref, Ref]


@dataclass(frozen=True)
class ReductionStep:
    """Find ``e`` with ``tp(e, c[1]) = tp(a, c[0])`` and ``tp(e, d[1]) = tp(b, d[0])`` for ``d`` in ``dbar``."""

    a: Ref
    c: Param | None
    b: Ref
    dbar: tuple[Param, ...]
    produces: str

    @property
    def substitution(self) -> tuple[Param, ...]:
        params = ([self.c] if self.c else []) + list(self.dbar)
        return tuple(p for p in params if p[0] != p[1])

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "c": list(self.c) if self.c else None,
            "b": self.b,
            "dbar": [list(p) for p in self.dbar],
            "produces": self.produces,
            "substitution": [list(p) for p in self.substitution],
        }


@dataclass(frozen=True)
class Reduction:
    steps: tuple[ReductionStep, ...]
    coordinates: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps], "coordinates": list(self.coordinates)}


def reduce_extension_problem(problem: ExtensionProblem) -> Reduction:
    """Split the new tuple into coordinates, then merge single-parameter demands pairwise.

    Coordinate ``j`` must match every ``a_i[j]`` over ``b_i`` and copy the
    type of ``a_i[j]`` over ``a_i[l]`` onto the coordinates ``l < j`` found
    before it. Those single demands are merged left to right: each step adds
    one demand to the point that met all earlier ones.
    """
    steps: list[ReductionStep] = []
    coords: list[str] = []
    for j in range(problem.width):
        singles: list[tuple[Ref, Param]] = []
        for a, b in problem.targets:
            for p in b:
                singles.append((a[j], (p, p)))
        for a, _ in problem.targets:
            for ell in range(j):
                singles.append((a[j], (a[ell], coords[ell])))
        singles = list(dict.fromkeys(singles))
        name = f"e{j + 1}"
        if not singles:
            first = problem.targets[0][0][j]
            steps.append(ReductionStep(first, None, first, (), name))
        elif len(singles) == 1:
            a, c = singles[0]
            steps.append(ReductionStep(a, c, a, (), name))
        else:
            prev_a, prev_c = singles[0]
            seen = [prev_c]
            for idx, (a, c) in enumerate(singles[1:], start=1):
                out = name if idx == len(singles) - 1 else f"s{len(steps) + 1}"
                if idx == 1:
                    step = ReductionStep(a, c, prev_a, (prev_c,), out)
                else:
                    step = ReductionStep(a, c, prev, tuple((y, y) for _, y in seen), out)
                steps.append(step)
                seen.append(c)
                prev = out
        coords.append(name)
    return Reduction(tuple(steps), tuple(coords))


def _swap(t: AtomicType) -> AtomicType:
    flip = {0: 1, 1: 0}
    lits = []
    for name, args, truth in t.literals:
        args = tuple(flip[x] for x in args)
        if name == EQ:
            args = tuple(sorted(args))
        lits.append((name, args, truth))
    return AtomicType(2, (), tuple(sorted(lits)))


@dataclass
class ChainResult:
    verdict: str
    witness: tuple | None
    failedStep: int | None = None
    reason: str = ""
    points: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness is not None else None,
            "failedStep": self.failedStep,
            "reason": self.reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _Work:
    """Fragment elements plus new points known only through their types toward chosen references."""

    def __init__(self, frag: Fragment):
        self.frag = frag
        self.S = frag.structure
        self.types: dict[str, dict[Ref, AtomicType]] = {}
        self.alias: dict[str, Ref] = {}

    def resolve(self, x: Ref) -> Ref:
        while isinstance(x, str) and x in self.alias:
            x = self.alias[x]
        return x

    def tp(self, x: Ref, y: Ref) -> AtomicType:
        x, y = self.resolve(x), self.resolve(y)
        if isinstance(x, int) and isinstance(y, int):
            return atp(self.S, (x, y))
        if isinstance(x, str) and y in self.types[x]:
            return self.types[x][y]
        if isinstance(y, str) and x in self.types[y]:
            return _swap(self.types[y][x])
        raise KeyError(f"no type recorded between {x!r} and {y!r}")


def solve_chain(frag: Fragment, reduction: Reduction) -> ChainResult:
    """Solve the steps in order; a step with no solution in the fragment gets a new point if the age allows."""
    W = _Work(frag)
    for i, step in enumerate(reduction.steps, start=1):
        need: dict[Ref, AtomicType] = {}
        demands = ([(step.a, step.c)] if step.c else []) + [(step.b, d) for d in step.dbar]
        clash = None
        for src, (x, y) in demands:
            t = W.tp(src, x)
            y = W.resolve(y)
            if need.setdefault(y, t) != t:
                clash = f"two demands disagree over {y!r}"
                break
        if clash:
            return ChainResult("UNSAT", None, i, clash)
        found = _solve_step(W, step, need)
        if found is None:
            return ChainResult("UNSAT", None, i, "no point of the age realizes the merged demands")
        if found == "new":
            W.types[step.produces] = need
        else:
            W.alias[step.produces] = found
    witness = tuple(W.resolve(e) for e in reduction.coordinates)
    return ChainResult("SAT", witness, points={k: dict(v) for k, v in W.types.items()})


def _solve_step(W: _Work, step: ReductionStep, need: dict[Ref, AtomicType]):
    equal = [y for y, t in need.items() if t.truth(EQ, 0, 1)]
    if equal:
        y = equal[0]
        for z, t in need.items():
            if z != y and W.tp(y, z) != t:
                return None
        return y
    if not need:
        return W.resolve(step.a)
    params = list(need)
    for e in range(W.S.size):
        try:
            if all(W.tp(e, p) == need[p] for p in params):
                return e
        except KeyError:
            continue
    assignment = {(i, j): W.tp(params[i], params[j]) for i in range(len(params)) for j in range(i + 1, len(params))}
    base = from_pair_types(W.frag.family, len(params), assignment) if len(params) > 1 else None
    if base is None:
        if len(params) > 1:
            return None
        x = params[0]
        if isinstance(x, int):
            base = W.S.induced([x])
        else:
            base = from_pair_types(W.frag.family, 2, {(0, 1): need[x]}).induced([1])
    ext = one_point_extension(base, list(range(len(params))), [need[p] for p in params])
    if ext is None or not W.frag.family.in_age(ext):
        return None
    return "new"


def replay_solves(frag: Fragment, problem: ExtensionProblem, reduction: Reduction, result: ChainResult) -> bool:
    """Does the chain's witness meet every target of the original problem?"""
    if result.verdict != "SAT":
        return False
    W = _Work(frag)
    W.types = {k: dict(v) for k, v in result.points.items()}
    e = result.witness
    for a, b in problem.targets:
        for j in range(problem.width):
            for p in b:
                if W.tp(e[j], p) != atp(frag.structure, (a[j], p)):
                    return False
            for ell in range(j):
                if W.tp(e[j], e[ell]) != atp(frag.structure, (a[j], a[ell])):
                    return False
    return True
