"""Counterexample scenarios and non-homogeneity fixtures, with JSON reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .embed import extend_to_automorphism, is_homogeneous_upto
from .families import bipede as bp
from .families.crosscut import CrosscutFamily, CrosscutSpec
from .families.omegapede import OmegapedeFamily, OmegapedeFragment, build_omegapede
from .indep import ExtensionProblem, check_premises, extension_solve
from .structure import FinStructure, graph
from .types import atp


class InsufficientSaturation(LookupError):
    pass


@dataclass
class ScenarioReport:
    scenario: str
    verdict: str
    witnesses: dict = field(default_factory=dict)
    conflictTrace: str = ""
    conflict: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def reproduced(self) -> bool:
        return self.verdict in ("UNSAT", "NONHOMOGENEOUS") and all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "conflictTrace": self.conflictTrace,
            "conflict": self.conflict,
            "checks": self.checks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


def crosscut_counterexample(spec: CrosscutSpec) -> ScenarioReport:
    """Two P-classes and two Q-classes; tp(a, c) and tp(b, d) have no common solution."""
    if spec.nP < 2 or spec.nQ < 2:
        return ScenarioReport("crosscut", "inapplicable", conflictTrace="needs two P-classes and two Q-classes")
    fam = CrosscutFamily()
    frag = fam.fragment(spec)
    a, b = spec.element(0, 0, 0), spec.element(1, 0, 0)
    c, d = spec.element(0, 1, 0), spec.element(1, 1, 0)
    Q = frag.structure.matrix("Q")
    prem_cd = check_premises(frag, c, c, c, (d,), Q)
    prem_ac = check_premises(frag, a, c, a, (c,), Q)
    prem_bd = check_premises(frag, b, c, b, (d,), Q)
    res = extension_solve(frag, ExtensionProblem.two_type(a, c, b, (d,)))
    checks = {
        "c indep d over c_Q": prem_cd.bIndep,
        "a dep c over c_Q": not prem_ac.aIndep,
        "b dep d over c_Q": not prem_bd.bIndep,
    }
    return ScenarioReport("crosscut", res.verdict, {"a": a, "b": b, "c": c, "d": d}, res.trace, list(res.conflict), checks)


def bipede_counterexample(bf: bp.BipedeFragment) -> ScenarioReport:
    pattern = bp.find_pattern(bf)
    if pattern is None:
        raise InsufficientSaturation("no feet i, j, k, l, m with the required colours")
    i, j, k, l, m = pattern
    A, B, C, D = bp.body(i, j), bp.body(k, l), bp.body(j, l), bp.body(l, m)
    fam = bp.BipedeFamily()
    frag = fam.fragment(bf)
    a, b, c, d = (bf.body_index(x) for x in (A, B, C, D))
    EB, ER = bp.e_b(bf), bp.e_r(bf)
    rule = fam.premise_rule()
    members = np.flatnonzero(EB == EB[c]).tolist()
    res = extension_solve(frag, ExtensionProblem.two_type(a, c, b, (d,)))
    checks = {
        "c indep d over c_EB": not rule.divides(frag, c, (d,), members, c),
        "b indep d over c_EB": not rule.divides(frag, b, (d,), members, c),
        "a dep c over c_EB": rule.divides(frag, a, (c,), members, c),
        "EB and ER meet in equality": bool(((EB[:, None] == EB[None, :]) & (ER[:, None] == ER[None, :]) == np.eye(len(EB), dtype=bool)).all()),
    }
    trace = bp.forced_trace(bf, A, C, B, D) or res.trace
    witnesses = {"i": i, "j": j, "k": k, "l": l, "m": m, "a": list(A), "b": list(B), "c": list(C), "d": list(D)}
    return ScenarioReport("bipede", res.verdict, witnesses, trace, list(res.conflict), checks)


def omegapede_counterexample(om: OmegapedeFragment) -> ScenarioReport:
    fam = OmegapedeFamily()
    frag = fam.fragment(om)
    S = frag.structure
    if om.nClasses < 1 or om.cellSize < 1:
        raise InsufficientSaturation("no E0-class of F points")
    c, d = om.f_point(0, 0, 0), om.f_point(0, 1, 0)
    L = S.matrix("L")
    try:
        a = next(x for x in range(om.nPoints) if L[x, c])
        b = next(x for x in range(om.nPoints) if L[x, d])
    except StopIteration:
        raise InsufficientSaturation("no non-F points L-related to both cells") from None
    prem = check_premises(frag, a, c, b, (d,), S.matrix("E0"))
    res = extension_solve(frag, ExtensionProblem.two_type(a, c, b, (d,)))
    checks = {
        "type over c_E0 agrees": prem.typeEqBase,
        "type over acl(c_E0) differs": not prem.typeEq,
    }
    return ScenarioReport("omegapede", res.verdict, {"a": a, "b": b, "c": c, "d": d}, res.trace, list(res.conflict), checks)


# -- non-homogeneity fixtures --------------------------------------------------------------


@dataclass(frozen=True)
class RemarkFixture:
    structure: FinStructure
    vertices: tuple[tuple[int, int], ...]
    witnesses: tuple[tuple[int, ...], tuple[int, ...]]
    k: int


def _intersection_graph(vertices) -> FinStructure:
    edges = [(x, y) for x, y in combinations(range(len(vertices)), 2) if len(set(vertices[x]) & set(vertices[y])) == 1]
    return graph(len(vertices), edges)


def remark_fixture(which: str, groundSize: int) -> RemarkFixture:
    """Intersection graphs whose designated tuples agree on atomic type but not on orbit."""
    if which == "4.1":
        if groundSize < 4:
            raise ValueError("the 4.1 fixture needs a ground set of at least 4")
        verts = tuple(combinations(range(1, groundSize + 1), 2))
        wit = (((1, 2), (2, 3), (1, 3)), ((1, 2), (1, 3), (1, 4)))
        k = 3
    elif which == "4.6":
        if groundSize < 8:
            raise ValueError("the 4.6 fixture needs a ground set of at least 8")
        evens = range(2, groundSize + 1, 2)
        odds = range(1, groundSize + 1, 2)
        verts = tuple(sorted(tuple(sorted((e, o))) for e in evens for o in odds))
        wit = (((1, 2), (1, 4), (3, 6), (3, 8)), ((1, 2), (1, 4), (3, 6), (5, 6)))
        k = 4
    else:
        raise ValueError(f"unknown remark fixture {which!r}")
    index = {v: i for i, v in enumerate(verts)}
    tuples = tuple(tuple(index[v] for v in w) for w in wit)
    return RemarkFixture(_intersection_graph(verts), verts, tuples, k)


def verify_remark(fx: RemarkFixture) -> ScenarioReport:
    S = fx.structure
    u, v = fx.witnesses
    verdict = is_homogeneous_upto(S, fx.k)
    checks = {
        "witnesses share atomic type": atp(S, u) == atp(S, v),
        "no automorphism links witnesses": extend_to_automorphism(S, u, v) is None,
        "structure fails homogeneity": not verdict.homogeneous,
    }
    found = [list(t) for t in verdict.witness] if verdict.witness else []
    return ScenarioReport(
        "remark", "NONHOMOGENEOUS" if not verdict.homogeneous else "HOMOGENEOUS",
        {"designated": [[list(fx.vertices[x]) for x in t] for t in fx.witnesses], "found": found,
         "checkedUpTo": verdict.checked_upto},
        checks=checks,
    )
