from hypothesis import given, settings
from hypothesis import strategies as st

from homoglab.indep import ExtensionProblem, extension_solve
from homoglab.reduction import reduce_extension_problem, replay_solves, solve_chain


def test_single_target_is_identity():
    red = reduce_extension_problem(ExtensionProblem((((0,), (1,)),)))
    (step,) = red.steps
    assert step.a == step.b == 0 and step.c == (1, 1) and step.dbar == ()
    assert red.coordinates == ("e1",)


def test_two_parameters_then_one():
    red = reduce_extension_problem(ExtensionProblem((((0,), (1, 2)), ((3,), (4,)))))
    assert len(red.steps) == 2
    last = red.steps[-1]
    assert last.b == red.steps[0].produces and last.c == (4, 4)


def test_three_singletons_merge_pairwise():
    red = reduce_extension_problem(ExtensionProblem((((0,), (1,)), ((2,), (3,)), ((4,), (5,)))))
    assert len(red.steps) == 2
    assert [s.produces for s in red.steps] == ["s1", "e1"]


def test_coordinates_record_substitution():
    red = reduce_extension_problem(ExtensionProblem((((0, 1), (2,)),)))
    subs = [p for s in red.steps for p in s.substitution]
    assert (0, "e1") in subs
    assert red.coordinates == ("e1", "e2")


def test_chain_matches_direct_solver(crosscut333):
    p = ExtensionProblem.two_type(0, 4, 9, (13,))
    res = solve_chain(crosscut333, reduce_extension_problem(p))
    assert res.verdict == extension_solve(crosscut333, p).verdict


def problems(n):
    idx = st.integers(0, n - 1)
    target = st.tuples(st.lists(idx, min_size=0, max_size=3, unique=True))
    return st.builds(
        lambda w, a, bs: ExtensionProblem(tuple((tuple(a[:w]), tuple(b[0])) for b in bs)),
        st.integers(1, 2),
        st.lists(idx, min_size=2, max_size=2, unique=True),
        st.lists(target, min_size=1, max_size=3),
    )


@given(st.data())
@settings(max_examples=120, deadline=None)
def test_replay_solves_original(crosscut333, omegapede_frag, urysohn0134, data):
    frag = data.draw(st.sampled_from([crosscut333, omegapede_frag, urysohn0134]))
    p = data.draw(problems(frag.size))
    red = reduce_extension_problem(p)
    res = solve_chain(frag, red)
    if res.verdict == "SAT":
        assert replay_solves(frag, p, red, res)


def test_unsat_chain_reports_step(crosscut333):
    spec = crosscut333.info["spec"]
    c, d = spec.element(0, 0, 0), spec.element(1, 1, 0)
    a, b = spec.element(0, 2, 0), spec.element(1, 2, 0)
    p = ExtensionProblem((((a,), (c,)), ((b,), (d,)), ((a,), (d,))))
    res = solve_chain(crosscut333, reduce_extension_problem(p))
    assert res.verdict == "UNSAT" and res.failedStep is not None
