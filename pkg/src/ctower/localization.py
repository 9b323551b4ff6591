"""Localization ``S^-1 A`` at a tracked prime ``q`` (``S = {1, q, q^2, ...}``).

Elements are ``LocElement(num, k)`` meaning ``num / q^k``.  The canonical form
has either ``k == 0`` (an element of the parent ring) or ``k >= 1`` with
``q`` not dividing ``num``; two canonical forms are equal exactly when their
numerators and exponents agree.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .model import (
    LevelKind,
    LocElement,
    NotLive,
    PrimeId,
    Route,
    Status,
    TowerError,
    TowerLevel,
)

if TYPE_CHECKING:
    from .tower import Tower


def canonicalize_frac(tower: Tower, level: int, a, k: int) -> LocElement:
    """Return the canonical form of ``a / q^k`` at Loc level ``level``.

    Cancels ``q`` from the numerator while the denominator allows it.
    """
    lvl = tower.levels[level]
    if k < 0:
        raise ValueError("denominator exponent must be >= 0")
    if a.level != lvl.parent:
        raise TowerError(f"numerator lives at level {a.level}, expected {lvl.parent}")
    if a.is_zero():
        return LocElement(tower, level, a, 0)
    while k > 0 and tower.divides(lvl.q, a):
        a = tower.exact_div(lvl.q, a)
        k -= 1
    return LocElement(tower, level, a, k)


def loc_neg(tower: Tower, a: LocElement) -> LocElement:
    return LocElement(tower, a.level, tower.neg(a.num), a.k)


def loc_add(tower: Tower, a: LocElement, b: LocElement) -> LocElement:
    # align on the larger denominator, then cancel
    lvl = tower.levels[a.level]
    k = max(a.k, b.k)
    q = tower.prime_element(lvl.q, lvl.parent)
    num = tower.add(
        tower.mul(a.num, tower.power(q, k - a.k)),
        tower.mul(b.num, tower.power(q, k - b.k)),
    )
    if k == 0:
        return LocElement(tower, a.level, num, 0)
    return canonicalize_frac(tower, a.level, num, k)


def loc_mul(tower: Tower, a: LocElement, b: LocElement) -> LocElement:
    num = tower.mul(a.num, b.num)
    k = a.k + b.k
    if k == 0:
        return LocElement(tower, a.level, num, 0)
    return canonicalize_frac(tower, a.level, num, k)


def loc_is_unit(tower: Tower, sigma: LocElement) -> bool:
    """Units are ``u q^k`` and ``u / q^k`` for parent units ``u``."""
    if sigma.is_zero():
        return False
    q = tower.levels[sigma.level].q
    a = sigma.num
    # a Frac numerator is already q-free; only plain elements can shed factors
    while tower.divides(q, a):
        a = tower.exact_div(q, a)
    return tower.is_unit(a)


def loc_lift_multiple_oracle(tower: Tower, p: PrimeId, sigma: LocElement) -> bool:
    """``p | num/q^k`` in the localization iff ``p | num`` in the parent."""
    return tower.divides(p, sigma.num)


def loc_lift_exact_div(tower: Tower, p: PrimeId, sigma: LocElement) -> LocElement:
    num = tower.exact_div(p, sigma.num)
    if sigma.k == 0:
        return LocElement(tower, sigma.level, num, 0)
    return canonicalize_frac(tower, sigma.level, num, sigma.k)


def extend_localize(tower: Tower, q: PrimeId) -> TowerLevel:
    """Append a Loc level inverting the live tracked prime ``q``."""
    tower._check_mutable()
    top = tower.top
    tp = tower.registry.get(q)
    if tp is not None and tp.status is Status.UNIT:
        raise TowerError(f"{q} is already a unit")
    if not tower.is_live(q, top):
        raise NotLive(f"{q} is not a live prime at level {top}")

    index = len(tower.levels)
    level = TowerLevel(index, LevelKind.LOC, parent=top, q=q)
    routes = {}
    retired = [q]
    for r in tower.explicit_live(top):
        if r == q:
            continue
        if tower.is_associate(r, q, top):
            # an associate of q becomes a unit alongside it
            retired.append(r)
            continue
        routes[r] = Route("lift")
    tower._push_level(level, routes)

    for r in retired:
        tower.registry.touch(r, index).set_status(index, Status.UNIT, str(q))

    # q was one half of a live factorization P = x*y: P is now an associate
    # of the other half, hence prime again
    if not q.is_base:
        birth = tower.levels[tower.registry[q].birth]
        factored = tower.registry.get(birth.q)
        if (
            factored is not None
            and factored.status is Status.FACTORED
            and factored.factored_as == q.gen
        ):
            other = PrimeId("x" if q.kind == "y" else "y", q.i, q.k)
            one = tower.int_const(top, 1)
            inv_q = LocElement(tower, index, one, 1)
            routes[birth.q] = Route("alias", target=other, unit_inv=inv_q)
            factored.factored_as = None
            factored.set_status(index, Status.PRIME, str(other))
    return level
