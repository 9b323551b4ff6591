import sys

import pytest

from ctower import PrimeId, Tower
from ctower.construction import PredicateSpec, build

sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))

P2, P3, P5 = PrimeId.base(0), PrimeId.base(1), PrimeId.base(2)


def make_loc2() -> Tower:
    t = Tower()
    t.extend_localize(P2)
    return t


def make_fac5(gen=(2, 0)) -> Tower:
    t = Tower()
    t.extend_factor(P5, gen)
    return t


def make_even6() -> Tower:
    state, _ = build(PredicateSpec.builtin("even"), 6)
    return state.tower


@pytest.fixture
def loc2():
    return make_loc2()


@pytest.fixture
def fac5():
    return make_fac5()
