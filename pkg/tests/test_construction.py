import pytest

from ctower import PrimeId, Tower
from ctower.construction import (
    ConstructionState,
    PredicateError,
    PredicateSpec,
    build,
    build_pid,
    pair,
    parse_enumeration,
    run_stage,
    self_check,
    unpair,
)
from ctower.model import FacElement

BUILTINS = [
    PredicateSpec.builtin("all"),
    PredicateSpec.builtin("none"),
    PredicateSpec.builtin("even"),
    PredicateSpec.threshold([2, 0, 1]),
]


def test_pair_examples():
    assert pair(0, 0) == 0
    assert (pair(0, 1), pair(0, 2)) == (2, 5)
    assert unpair(4) == (1, 1)


def test_pair_is_a_bijection_and_monotone():
    seen = {}
    for i in range(60):
        for s in range(60):
            n = pair(i, s)
            assert n not in seen and unpair(n) == (i, s)
            seen[n] = (i, s)
            if s:
                assert pair(i, s - 1) < n
    assert all(n in seen for n in range(1000))
    with pytest.raises(ValueError):
        pair(-1, 0)


def test_run_stage_even():
    pred = PredicateSpec.builtin("even")
    state = ConstructionState()
    for _ in range(2):
        run_stage(state, pred)
    before = len(state.tower.levels)
    run_stage(state, pred)  # stage 2 = <0,1>
    kinds = [lvl.kind.value for lvl in state.tower.levels[before:]]
    assert kinds == ["loc", "fac"]
    assert state.tower.levels[before].q == PrimeId.gen_y(0, 0)
    assert state.tower.levels[before + 1].gen == (0, 1)
    run_stage(state, pred)  # stage 3 = <2,0>
    before = len(state.tower.levels)
    run_stage(state, pred)  # stage 4 = <1,1>
    assert len(state.tower.levels) == before
    assert state.trace[-1].action == "idle"


def test_none_always_initializes():
    state, report = build(PredicateSpec.builtin("none"), 15)
    inits = [ev for ev in state.trace if ev.s == 0]
    assert inits and all(ev.action == "init" for ev in inits)
    assert all(row["acts"] == 0 and row["predicted_limit"] == "not_prime" for row in report.per_i)


def test_build_even_six():
    state, report = build(PredicateSpec.builtin("even"), 6)
    assert [row["acts"] for row in report.per_i] == [2, 0, 0]
    assert [(row["state"], row["k"]) for row in report.per_i] == [("factored", 2), ("factored", 0), ("factored", 0)]
    assert report.per_i[0]["retired_units"] == ["y:0:0", "y:0:1"]
    assert report.violations == []


def test_all_predicts_prime():
    _, report = build(PredicateSpec.builtin("all"), 30)
    assert report.per_i and all(row["predicted_limit"] == "prime" for row in report.per_i)


def test_post_act_assertions():
    state, _ = build(PredicateSpec.builtin("even"), 6)
    t = state.tower
    for act in state.acts_log:
        L = act.loc_level
        assert t.is_unit(t.prime_element(PrimeId.gen_y(act.i, act.k), L))
        quotient = t.exact_div(PrimeId.gen_x(act.i, act.k), t.prime_element(PrimeId.base(act.i), L))
        assert t.is_unit(quotient)


def test_self_check_flags_corrupted_generator():
    state, _ = build(PredicateSpec.builtin("even"), 6)
    t = state.tower
    x, y = t.generators[(0, 0)]
    parent = t.levels[x.level].parent
    one, zero = t.int_const(parent, 1), t.int_const(parent, 0)
    t.generators[(0, 0)] = (FacElement(t, x.level, ((1, one), (2, zero)), zero, ()), y)
    problems = self_check(state)
    canon = [v for v in problems if "zero coefficient" in v]
    assert len(canon) == 1, problems


def test_predicate_json():
    cases = [
        {"kind": "builtin", "name": "even"},
        {"kind": "threshold", "acts": [2, 0, 1]},
        {"kind": "table", "entries": [[0, 1, 3, True]], "default": False},
    ]
    for obj in cases:
        assert PredicateSpec.from_json(obj).to_json() == obj
    assert PredicateSpec.from_json({"kind": "builtin", "name": "threshold", "params": [1]}).acts == (1,)
    with pytest.raises(PredicateError):
        PredicateSpec.from_json({"kind": "builtin", "name": "odd"})


def test_table_predicate():
    pred = PredicateSpec.table([[0, 1, 0, True]], default=False)
    state, report = build(pred, 10)
    assert report.per_i[0]["acts"] == 1 and report.per_i[0]["predicted_limit"] == "unknown"
    strict = PredicateSpec.table([[0, 0, 0, True]])
    assert strict(0, 0, 0)
    with pytest.raises(PredicateError):
        build(strict, 10)


def test_threshold_predicate_counts():
    _, report = build(PredicateSpec.threshold([2, 0, 1]), 40)
    acts = {row["i"]: row["acts"] for row in report.per_i}
    assert acts[0] == 2 and acts[1] == 0 and acts[2] == 1
    assert all(v == 0 for i, v in acts.items() if i > 2)


@pytest.mark.parametrize("pred", BUILTINS, ids=lambda p: p.name)
@pytest.mark.parametrize("horizon", [10, 20, 40, 60])
def test_builds_are_clean(pred, horizon):
    state, report = build(pred, horizon)
    assert report.violations == []
    t = state.tower
    # generators exist exactly for l <= marks(i)
    for i, rec in state.records.items():
        assert sorted(k for j, k in t.generators if j == i) == list(range(rec.marks + 1))
    # every act adds a Loc then a Fac level
    for ev in state.trace:
        if ev.action == "act":
            assert [t.levels[j].kind.value for j in ev.levels] == ["loc", "fac"]
        elif ev.action == "init":
            assert [t.levels[j].kind.value for j in ev.levels] == ["fac"]
        else:
            assert ev.levels == ()
    # work for (i, s) precedes work for (i, s+1)
    last = {}
    for ev in state.trace:
        assert last.get(ev.i, -1) == ev.s - 1
        last[ev.i] = ev.s


@pytest.mark.parametrize("pred", BUILTINS, ids=lambda p: p.name)
def test_determinism(pred):
    a_state, a_rep = build(pred, 25)
    b_state, b_rep = build(pred, 25)
    assert a_state.tower.dumps() == b_state.tower.dumps()
    assert a_rep.to_json() == b_rep.to_json()


def test_check_after_reload():
    state, _ = build(PredicateSpec.builtin("even"), 20)
    again = ConstructionState.from_tower(Tower.loads(state.tower.dumps()))
    assert self_check(again) == []
    assert {i: (r.marks, r.acts) for i, r in again.records.items()} == {
        i: (r.marks, r.acts) for i, r in state.records.items()
    }


def test_build_pid_examples():
    t, report = build_pid([(2, 3), (5, 7)], 10)
    unit = {row["i"]: row["unit"] for row in report.per_i}
    assert unit[2] and unit[5] and not unit[3]
    assert [lvl.q for lvl in t.levels[1:]] == [PrimeId.base(2), PrimeId.base(5)]
    t, report = build_pid([], 10)
    assert len(t.levels) == 1
    t, _ = build_pid([(0, 0)], 5)
    assert t.divides(PrimeId.base(1), t.int_const(t.top, 6))


def test_build_pid_horizon_cutoff():
    t, report = build_pid([(1, 2), (4, 9)], 5)
    unit = {row["i"]: row["unit"] for row in report.per_i}
    assert unit[1] and not unit[4]


def test_build_pid_errors():
    with pytest.raises(PredicateError):
        build_pid([(1, 2), (1, 3)], 5)
    with pytest.raises(PredicateError):
        build_pid([(1, 2), (3, 2)], 5)
    assert parse_enumeration("2@3, 5@7") == [(2, 3), (5, 7)]
    with pytest.raises(PredicateError):
        parse_enumeration("2:3")
