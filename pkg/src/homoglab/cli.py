"""Command-line front end.

Exit codes: 0 verified (or SAT as expected), 1 property violated, 2 usage
error, 3 inconclusive. Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

OK, VIOLATED, USAGE, INCONCLUSIVE = 0, 1, 2, 3

EXAMPLES = ("crosscut", "bipede", "omegapede", "remark41", "remark46")


class UsageError(Exception):
    pass


def _load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from None


def _emit(args, report: dict, text: str) -> None:
    if args.json:
        print(json.dumps(report, sort_keys=True, ensure_ascii=False))
    else:
        print(text)


def _monoid(path: str):
    from .distmonoid import DistanceMonoid, MonoidError, truncated_monoid

    data = _load(path)
    if "values" in data:
        return truncated_monoid(data["values"])
    try:
        return DistanceMonoid.from_dict(data)
    except MonoidError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: not a monoid file ({exc})") from None


def _structure(path: str):
    from .structure import FinStructure

    data = _load(path)
    if "dist" in data:
        from .distmonoid import RMetricSpace

        return RMetricSpace.from_dict(data).structure()
    try:
        return FinStructure.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path}: not a structure file ({exc})") from None


def _ints(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


# -- verbs -------------------------------------------------------------------------------


def cmd_monoid(args) -> int:
    from .distmonoid import DistanceMonoid, check_monoid, coordinatization_chain, idempotents, is_simple, su_rank

    if args.action == "check":
        data = _load(args.file)
        if "values" in data:
            R = _monoid(args.file)
            problems = []
        else:
            try:
                problems = check_monoid(data["elements"], data["plus"])
            except (KeyError, TypeError) as exc:
                raise UsageError(f"{args.file}: not a monoid file ({exc})") from None
            R = None if problems else DistanceMonoid.from_dict(data)
        report = {"valid": not problems, "violations": [str(v) for v in problems]}
        if R is not None:
            report["elements"] = list(R.elements)
        text = "valid distance monoid" if not problems else "\n".join(["not a distance monoid:"] + report["violations"])
        _emit(args, report, text)
        return OK if not problems else VIOLATED
    R = _monoid(args.file)
    report = {
        "elements": list(R.elements),
        "simple": is_simple(R),
        "idempotents": [R.label(r) for r in idempotents(R)],
        "su_rank": su_rank(R),
        "chain": [R.label(r) for r in coordinatization_chain(R)],
    }
    text = "\n".join(f"{k}: {v}" for k, v in report.items())
    _emit(args, report, text)
    return OK


def cmd_urysohn(args) -> int:
    from .families.urysohn import UrysohnFamily
    from .saturate import SaturationInfeasible

    R = _monoid(args.monoid)
    try:
        frag = UrysohnFamily(R).build(args.n, args.k, args.m)
    except SaturationInfeasible as exc:
        report = {"built": False, "reason": str(exc), "demand": str(exc.demand) if exc.demand else None}
        _emit(args, report, f"infeasible: {exc}")
        return VIOLATED
    space = frag.info["space"]
    if args.output:
        Path(args.output).write_text(space.to_json() + "\n", encoding="utf-8")
    report = {"built": True, "size": space.size, "k": args.k, "m": args.m, "output": args.output}
    if not args.output:
        report["space"] = space.to_dict()
    _emit(args, report, f"built a {space.size}-point space" + (f" -> {args.output}" if args.output else "\n" + space.to_json()))
    return OK


def cmd_indep(args) -> int:
    from .distmonoid import RMetricSpace, divides_urysohn
    from .families.urysohn import UrysohnFamily
    from .indep import divides_bruteforce

    space = RMetricSpace.from_dict(_load(args.space))
    base = _ints(args.base)
    try:
        space.structure().check_element(args.a, args.b, *base)
    except IndexError as exc:
        raise UsageError(str(exc)) from None
    divides = divides_urysohn(space, args.a, args.b, base)
    report = {"a": args.a, "b": args.b, "base": list(base), "divides": divides, "independent": not divides}
    code = OK
    if args.oracle:
        frag = UrysohnFamily(space.monoid).fragment(space)
        oracle = divides_bruteforce(frag, args.a, args.b, base)
        report["oracle"] = oracle
        report["agree"] = oracle == divides
        code = OK if oracle == divides else VIOLATED
    rel = "divides" if divides else "does not divide"
    _emit(args, report, f"tp({args.a}/{args.b},{list(base)}) {rel} over {list(base)}")
    return code


def _family(args):
    from .distmonoid import RMetricSpace
    from .families.bipede import BipedeFamily
    from .families.crosscut import CrosscutFamily, CrosscutSpec
    from .families.omegapede import OmegapedeFamily
    from .families.urysohn import UrysohnFamily

    if args.family == "urysohn":
        if args.space:
            space = RMetricSpace.from_dict(_load(args.space))
            return UrysohnFamily(space.monoid).fragment(space)
        if not args.monoid:
            raise UsageError("--family urysohn needs --space or --monoid")
        return UrysohnFamily(_monoid(args.monoid)).build(args.n, args.k, args.m)
    if args.family == "crosscut" and args.cells:
        nP, nQ, cell = _ints(args.cells)
        return CrosscutFamily().fragment(CrosscutSpec(nP, nQ, cell))
    fam = {"crosscut": CrosscutFamily, "bipede": BipedeFamily, "omegapede": OmegapedeFamily}[args.family]()
    return fam.build(args.n, args.k, args.m)


def cmd_extend(args) -> int:
    from .indep import ExtensionProblem, extension_solve
    from .reduction import reduce_extension_problem, replay_solves, solve_chain

    try:
        problem = ExtensionProblem.from_dict(_load(args.problem))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.problem}: not a problem file ({exc})") from None
    frag = _family(args)
    try:
        problem.check(frag.structure)
    except (IndexError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    two_type = problem.width == 1 and len(problem.targets) == 2 and len(problem.targets[0][1]) == 1
    if two_type:
        res = extension_solve(frag, problem)
        report = res.to_dict(problem)
        verdict = res.verdict
        text = f"{verdict}" + (f" e={res.witness[0]}" if res.witness else "") + (f"\n{res.trace}" if res.trace else "")
    else:
        red = reduce_extension_problem(problem)
        res = solve_chain(frag, red)
        verdict = res.verdict
        report = dict(problem.to_dict(), **res.to_dict(), reduction=red.to_dict())
        if verdict == "SAT":
            report["replayed"] = replay_solves(frag, problem, red, res)
        text = f"{verdict} after {len(red.steps)} step(s)" + (f" e={list(res.witness)}" if res.witness else f": {res.reason}")
    _emit(args, report, text)
    if verdict == "INCONCLUSIVE":
        return INCONCLUSIVE
    return OK if verdict == args.expect.upper() else VIOLATED


def _fixture_dir(args) -> Path | None:
    if args.fixtures:
        return Path(args.fixtures)
    here = Path(__file__).resolve().parents[2] / "fixtures"
    return here if here.is_dir() else None


def _diff_fixture(args, name: str, text: str) -> bool | None:
    root = _fixture_dir(args)
    if root is None or not (root / name).is_file():
        print(f"no fixture {name}; skipping comparison", file=sys.stderr)
        return None
    return (root / name).read_text(encoding="utf-8").strip() == text.strip()


def cmd_example(args) -> int:
    from . import scenarios as sc
    from .families.bipede import build_bipede
    from .families.crosscut import CrosscutSpec, build_crosscut
    from .families.omegapede import build_omegapede

    name = args.name
    fixture = None
    if name == "crosscut":
        cells = _ints(args.cells) if args.cells else (3, 3, 3)
        if len(cells) != 3:
            raise UsageError("--cells takes nP,nQ,cell")
        spec = CrosscutSpec(*cells)
        rep = sc.crosscut_counterexample(spec)
        if cells == (3, 3, 3):
            fixture = _diff_fixture(args, "crosscut333.json", build_crosscut(spec).to_json())
    elif name == "bipede":
        rep = sc.bipede_counterexample(build_bipede(args.feet, args.k or 2, args.m))
    elif name == "omegapede":
        k = args.k or 1
        rep = sc.omegapede_counterexample(build_omegapede(k + 1, k + args.m, k + 1, k, args.m))
    else:
        which = "4.1" if name == "remark41" else "4.6"
        fx = sc.remark_fixture(which, args.ground or (6 if which == "4.1" else 8))
        rep = sc.verify_remark(fx)
        if args.ground is None:
            fixture = _diff_fixture(args, f"{name}.json", fx.structure.to_json())
    report = rep.to_dict()
    report["reproduced"] = rep.reproduced
    if fixture is not None:
        report["fixtureMatch"] = fixture
    lines = [f"{rep.scenario}: {rep.verdict}" + (" (reproduced)" if rep.reproduced else " (NOT reproduced)")]
    if rep.conflictTrace:
        lines.append(rep.conflictTrace)
    lines += [f"  {k}: {v}" for k, v in rep.checks.items()]
    if fixture is False:
        lines.append("  regenerated structure differs from the shipped fixture")
    _emit(args, report, "\n".join(lines))
    return OK if rep.reproduced and fixture is not False else VIOLATED


def cmd_equiv(args) -> int:
    from .equiv import discover_equiv_relations

    S = _structure(args.structure)
    found = discover_equiv_relations(S)
    rels = []
    for d in found:
        classes = d.classes(S)
        rels.append({"name": d.name, "classes": len(classes), "largest": max(map(len, classes)), "partition": classes})
    report = {"size": S.size, "relations": rels}
    text = "\n".join([f"{len(rels)} nontrivial equivalence relation(s) on this structure"] +
                     [f"  {r['name']}: {r['classes']} classes, largest {r['largest']}" for r in rels])
    _emit(args, report, text)
    return OK


def cmd_homog(args) -> int:
    from .embed import is_homogeneous_upto

    S = _structure(args.structure)
    if args.k > S.size:
        raise UsageError(f"-k {args.k} exceeds structure size {S.size}")
    v = is_homogeneous_upto(S, args.k)
    report = {"homogeneous": v.homogeneous, "checkedUpTo": v.checked_upto,
              "witness": [list(t) for t in v.witness] if v.witness else None}
    text = "homogeneous up to k={}".format(args.k) if v.homogeneous else (
        f"not homogeneous: {list(v.witness[0])} and {list(v.witness[1])} share an atomic type but no automorphism maps one to the other")
    _emit(args, report, text)
    if args.expect is None:
        return OK
    return OK if v.homogeneous == (args.expect == "homogeneous") else VIOLATED


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="homoglab", description="Workbench for finite pieces of binary homogeneous structures.")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable report")
    sub = p.add_subparsers(dest="verb", required=True)

    m = sub.add_parser("monoid", parents=[common], help="distance monoid checks")
    m.add_argument("action", choices=("check", "analyze"))
    m.add_argument("file")
    m.set_defaults(func=cmd_monoid)

    u = sub.add_parser("urysohn", parents=[common], help="build a saturated R-metric space")
    u.add_argument("action", choices=("build",))
    u.add_argument("--monoid", required=True)
    u.add_argument("-n", type=int, default=None, help="size bound")
    u.add_argument("-k", type=int, default=2)
    u.add_argument("-m", type=int, default=3)
    u.add_argument("-o", "--output")
    u.set_defaults(func=cmd_urysohn)

    i = sub.add_parser("indep", parents=[common], help="dividing query in an R-metric space")
    i.add_argument("--space", required=True)
    i.add_argument("--a", type=int, required=True)
    i.add_argument("--b", type=int, required=True)
    i.add_argument("--base", default="")
    i.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    i.set_defaults(func=cmd_indep)

    e = sub.add_parser("extend", parents=[common], help="extension problems")
    e.add_argument("action", choices=("solve",))
    e.add_argument("--family", required=True, choices=("urysohn", "crosscut", "bipede", "omegapede"))
    e.add_argument("--problem", required=True)
    e.add_argument("--monoid")
    e.add_argument("--space")
    e.add_argument("--cells", help="crosscut grid nP,nQ,cell")
    e.add_argument("-n", type=int, default=None)
    e.add_argument("-k", type=int, default=2)
    e.add_argument("-m", type=int, default=3)
    e.add_argument("--expect", choices=("sat", "unsat"), default="sat")
    e.set_defaults(func=cmd_extend)

    x = sub.add_parser("example", parents=[common], help="rebuild and check a worked example")
    x.add_argument("action", choices=("verify",))
    x.add_argument("name", choices=EXAMPLES)
    x.add_argument("--cells", help="crosscut grid nP,nQ,cell (default 3,3,3)")
    x.add_argument("--feet", type=int, default=6, help="bipede core feet")
    x.add_argument("--ground", type=int, default=None, help="ground set size for the remark fixtures")
    x.add_argument("-k", type=int, default=None)
    x.add_argument("-m", type=int, default=3)
    x.add_argument("--fixtures", help="directory of shipped fixtures to diff against")
    x.set_defaults(func=cmd_example)

    q = sub.add_parser("equiv", parents=[common], help="definable equivalence relations")
    q.add_argument("action", choices=("discover",))
    q.add_argument("--structure", required=True)
    q.set_defaults(func=cmd_equiv)

    h = sub.add_parser("homog", parents=[common], help="homogeneity up to k")
    h.add_argument("action", choices=("check",))
    h.add_argument("--structure", required=True)
    h.add_argument("-k", type=int, required=True)
    h.add_argument("--expect", choices=("homogeneous", "nonhomogeneous"))
    h.set_defaults(func=cmd_homog)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    seed = os.environ.get("HOMOGLAB_SEED")
    if seed is not None and not seed.strip().lstrip("-").isdigit():
        print(f"HOMOGLAB_SEED must be an integer, got {seed!r}", file=sys.stderr)
        return USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"homoglab: {exc}", file=sys.stderr)
        return USAGE
    except Exception as exc:  # noqa: BLE001
        from .distmonoid import MonoidError
        from .indep import Inconclusive
        from .saturate import SaturationInfeasible

        if isinstance(exc, Inconclusive):
            print(f"homoglab: inconclusive: {exc}", file=sys.stderr)
            return INCONCLUSIVE
        if isinstance(exc, (MonoidError, SaturationInfeasible)):
            print(f"homoglab: {exc}", file=sys.stderr)
            return VIOLATED
        if isinstance(exc, (ValueError, IndexError, KeyError)):
            print(f"homoglab: {exc}", file=sys.stderr)
            return USAGE
        raise


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
