"""Random elements for property checks.

Seeded from ``CTOWER_SEED`` (default 20240601).  Nothing in the construction
itself is randomized.
"""

from __future__ import annotations

import os
import random

from .factorization import from_terms
from .model import LevelKind, RingElement
from .tower import Tower

DEFAULT_SEED = 20240601


def seed() -> int:
    return int(os.environ.get("CTOWER_SEED", DEFAULT_SEED))


def rng(offset: int = 0) -> random.Random:
    return random.Random(seed() + offset)


def random_element(tower: Tower, level: int, r: random.Random, bound: int = 6, budget: int = 3) -> RingElement:
    """A small random element; ``budget`` caps nesting so deep towers stay cheap."""
    lvl = tower.levels[level]
    if lvl.kind is LevelKind.BASE:
        return tower.int_const(0, r.randint(-bound, bound))
    if budget <= 0:
        return tower.int_const(level, r.randint(-bound, bound))
    if lvl.kind is LevelKind.LOC:
        num = random_element(tower, lvl.parent, r, bound, budget - 1)
        return tower.frac(level, num, r.choice((0, 0, 1, 2)))
    terms = {}
    for _ in range(r.randint(0, 3)):
        e = r.randint(-3, 3)
        terms[e] = random_element(tower, lvl.parent, r, bound, budget - 1)
    return from_terms(tower, level, terms)


def random_nonzero(tower: Tower, level: int, r: random.Random, **kw) -> RingElement:
    while True:
        e = random_element(tower, level, r, **kw)
        if not e.is_zero():
            return e
