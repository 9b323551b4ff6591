import json
import random

import pytest

from ctower import Tower
from ctower.model import BaseElement, FacElement, FrozenTower, LevelMismatch, LocElement, TowerError
from ctower.sampling import random_element, rng

from conftest import P3, P5, make_even6, make_fac5, make_loc2
from oracles import frac_value, laurent, laurent_add, laurent_mul


def test_int_const_base():
    t = Tower()
    assert t.int_const(0, 7) == BaseElement(t, 7)


def test_int_const_loc(loc2):
    e = loc2.int_const(1, 7)
    assert isinstance(e, LocElement) and e.k == 0 and e.num.n == 7


def test_int_const_fac(fac5):
    e = fac5.int_const(1, 7)
    assert isinstance(e, FacElement) and e.xs == () and e.ys == () and e.c.n == 7


def test_inject_examples(loc2, fac5):
    assert loc2.inject(1, loc2.int_const(0, 3)) == loc2.frac(1, loc2.int_const(0, 3), 0)
    e = fac5.inject(1, fac5.int_const(0, 3))
    assert e.is_constant and e.c.n == 3
    twelve = loc2.inject(1, loc2.int_const(0, 12))
    assert twelve.k == 0 and twelve.num.n == 12


def test_inject_level_mismatch(loc2):
    loc2.extend_localize(P3)
    with pytest.raises(LevelMismatch):
        loc2.inject(2, loc2.int_const(0, 3))
    with pytest.raises(LevelMismatch):
        loc2.inject(0, loc2.int_const(0, 3))


def test_mul_xy_is_q(fac5):
    x, y = fac5.generator("x", 2, 0), fac5.generator("y", 2, 0)
    assert fac5.equals(fac5.mul(x, y), fac5.int_const(1, 5))


def test_mul_laurent_example(fac5):
    x, y = fac5.generator("x", 2, 0), fac5.generator("y", 2, 0)
    lhs = fac5.mul(fac5.add(fac5.power(x, 2), y), x)
    assert lhs == fac5.add(fac5.power(x, 3), fac5.int_const(1, 5))
    f = laurent_add(laurent(fac5.power(x, 2), 5), laurent(y, 5))
    assert laurent(lhs, 5) == laurent_mul(f, laurent(x, 5)) == {3: 1, 0: 5}


def test_add_fracs(loc2):
    one = loc2.int_const(0, 1)
    a = loc2.frac(1, loc2.int_const(0, 3), 1)
    b = loc2.frac(1, one, 1)
    assert loc2.add(a, b) == loc2.int_const(1, 2)


def test_equals_examples(loc2, fac5):
    x, y = fac5.generator("x", 2, 0), fac5.generator("y", 2, 0)
    assert fac5.equals(fac5.mul(x, y), fac5.int_const(1, 5))
    assert not loc2.equals(loc2.frac(1, loc2.int_const(0, 3), 1), loc2.int_const(1, 3))
    with pytest.raises(LevelMismatch):
        loc2.equals(loc2.int_const(0, 1), loc2.int_const(1, 1))


def test_equals_group_law_sampled():
    t = make_even6()
    r = rng(11)
    for _ in range(100):
        lvl = r.randrange(len(t.levels))
        s, u = random_element(t, lvl, r), random_element(t, lvl, r)
        assert t.equals(t.sub(t.add(s, u), u), s)


def test_enumerate_base():
    t = Tower()
    assert [e.n for e in t.enumerate(0, 5)] == [0, 1, -1, 2, -2]


def test_enumerate_loc_contains_half(loc2):
    half = loc2.frac(1, loc2.int_const(0, 1), 1)
    first = loc2.enumerate(1, 8)
    assert half in first
    assert [e.k for e in first[:5]] == [0] * 5


@pytest.mark.parametrize("make", [Tower, make_loc2, make_fac5, make_even6])
def test_enumerate_prefix_and_distinct(make):
    t = make()
    lvl = t.top
    small, big = t.enumerate(lvl, 40), t.enumerate(lvl, 120)
    assert big[:40] == small
    assert len(set(big)) == len(big)
    assert all(not t.canonical_violations(e) for e in big)
    heights = [t.height(e) for e in big]
    assert heights == sorted(heights)


def test_enumerate_covers_small_elements(loc2, fac5):
    loc_items = set(loc2.enumerate(1, 400))
    for num in range(-3, 4):
        for k in range(3):
            e = loc2.frac(1, loc2.int_const(0, num), k)
            assert e in loc_items
    fac_items = set(fac5.enumerate(1, 400))
    x, y = fac5.generator("x", 2, 0), fac5.generator("y", 2, 0)
    for e in (x, y, x + y, x * x - 1, y * y, -x + 2):
        assert e in fac_items


def test_tower_roundtrip_bit_exact():
    t = make_even6()
    text = t.dumps()
    again = Tower.loads(text)
    assert again.dumps() == text
    assert json.loads(text)[1] == {"index": 1, "kind": "fac", "parent": 0, "q": "p:0", "gen": [0, 0]}


def test_element_json_roundtrip():
    t = make_even6()
    r = rng(12)
    for _ in range(200):
        lvl = r.randrange(len(t.levels))
        e = random_element(t, lvl, r)
        blob = json.dumps(t.element_to_json(e))
        assert t.element_from_json(lvl, json.loads(blob)) == e


def test_element_json_rejects_noncanonical(loc2):
    with pytest.raises(TowerError):
        loc2.element_from_json(1, {"num": {"int": 4}, "k": 1})


def test_frozen_tower_rejects_extension(loc2):
    loc2.freeze()
    with pytest.raises(FrozenTower):
        loc2.extend_localize(P3)
    with pytest.raises(FrozenTower):
        loc2.extend_factor(P5, (2, 0))


def test_level_zero_is_only_base():
    t = make_even6()
    kinds = [lvl.kind.value for lvl in t.levels]
    assert kinds[0] == "base" and "base" not in kinds[1:]
    assert all(lvl.parent == lvl.index - 1 for lvl in t.levels[1:])


def test_format_readable(fac5, loc2):
    x, y = fac5.generator("x", 2, 0), fac5.generator("y", 2, 0)
    assert str(x - 1) == "-1 + x(2,0)"
    assert str(y * y - x * 3 + 2) == "y(2,0)^2 + 2 - 3*x(2,0)"
    assert str(loc2.frac(1, loc2.int_const(0, -3), 2)) == "-3/2^2"


def test_loc_matches_rational_oracle(loc2):
    r = random.Random(5)
    for _ in range(300):
        a = random_element(loc2, 1, r)
        b = random_element(loc2, 1, r)
        assert frac_value(loc2.add(a, b), 2) == frac_value(a, 2) + frac_value(b, 2)
        assert frac_value(loc2.mul(a, b), 2) == frac_value(a, 2) * frac_value(b, 2)


def test_fac_matches_laurent_oracle(fac5):
    r = random.Random(6)
    for _ in range(300):
        a = random_element(fac5, 1, r)
        b = random_element(fac5, 1, r)
        la, lb = laurent(a, 5), laurent(b, 5)
        assert laurent(fac5.add(a, b), 5) == laurent_add(la, lb)
        assert laurent(fac5.mul(a, b), 5) == laurent_mul(la, lb)
