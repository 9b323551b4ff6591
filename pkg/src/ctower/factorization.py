"""Factorization extension ``B = A[x, y] / <xy - q>``.

Every element has a unique form ``a_m x^m + ... + a_1 x + c + b_1 y + ... + b_n y^n``
with coefficients in the parent ring.  Internally a term is written with a
signed exponent: ``e > 0`` is ``x^e``, ``e < 0`` is ``y^-e`` and ``e == 0``
is the constant.  Since ``xy = q``, the product of ``x^i`` and ``y^j`` is
``q^min(i, j)`` times the surviving monomial, so signed exponents simply add.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .model import (
    FacElement,
    LevelKind,
    NotDivisible,
    NotLive,
    PrimeId,
    Route,
    Status,
    TowerError,
    TowerLevel,
)

if TYPE_CHECKING:
    from .tower import Tower


def from_terms(tower: Tower, level: int, terms: dict) -> FacElement:
    """Build the canonical element from ``{signed exponent: parent coeff}``."""
    parent = tower.levels[level].parent
    xs, ys = [], []
    c = None
    for e in sorted(terms):
        coeff = terms[e]
        if coeff.is_zero():
            continue
        if e > 0:
            xs.append((e, coeff))
        elif e < 0:
            ys.append((-e, coeff))
        else:
            c = coeff
    if c is None:
        c = tower.int_const(parent, 0)
    ys.reverse()
    return FacElement(tower, level, tuple(xs), c, tuple(ys))


def _accumulate(tower: Tower, acc: dict, e: int, coeff) -> None:
    if e in acc:
        acc[e] = tower.add(acc[e], coeff)
    else:
        acc[e] = coeff


def fac_neg(tower: Tower, a: FacElement) -> FacElement:
    return FacElement(
        tower,
        a.level,
        tuple((m, tower.neg(v)) for m, v in a.xs),
        tower.neg(a.c),
        tuple((n, tower.neg(v)) for n, v in a.ys),
    )


def fac_add(tower: Tower, a: FacElement, b: FacElement) -> FacElement:
    acc: dict = {}
    for e, v in a.terms():
        _accumulate(tower, acc, e, v)
    for e, v in b.terms():
        _accumulate(tower, acc, e, v)
    return from_terms(tower, a.level, acc)


def fac_mul(tower: Tower, a: FacElement, b: FacElement) -> FacElement:
    lvl = tower.levels[a.level]
    q = tower.prime_element(lvl.q, lvl.parent)
    q_powers = [tower.int_const(lvl.parent, 1)]
    acc: dict = {}
    for e1, v1 in a.terms():
        for e2, v2 in b.terms():
            coeff = tower.mul(v1, v2)
            if e1 * e2 < 0:
                m = min(abs(e1), abs(e2))
                while len(q_powers) <= m:
                    q_powers.append(tower.mul(q_powers[-1], q))
                coeff = tower.mul(coeff, q_powers[m])
            _accumulate(tower, acc, e1 + e2, coeff)
    return from_terms(tower, a.level, acc)


def deg_x(sigma: FacElement) -> int:
    if sigma.is_zero():
        raise ValueError("deg_x is undefined at zero")
    if sigma.xs:
        return sigma.xs[-1][0]
    if not sigma.c.is_zero():
        return 0
    return -sigma.ys[0][0]


def deg_y(sigma: FacElement) -> int:
    if sigma.is_zero():
        raise ValueError("deg_y is undefined at zero")
    if sigma.ys:
        return sigma.ys[-1][0]
    if not sigma.c.is_zero():
        return 0
    return -sigma.xs[0][0]


def fac_is_unit(tower: Tower, sigma: FacElement) -> bool:
    # no new units: U(B) = U(A)
    return sigma.is_constant and tower.is_unit(sigma.c)


def fac_lift_multiple_oracle(tower: Tower, p: PrimeId, sigma: FacElement) -> bool:
    return all(tower.divides(p, v) for _, v in sigma.terms())


def fac_lift_exact_div(tower: Tower, p: PrimeId, sigma: FacElement) -> FacElement:
    acc = {e: tower.exact_div(p, v) for e, v in sigma.terms()}
    return from_terms(tower, sigma.level, acc)


def _check_fac(tower: Tower, sigma: FacElement) -> TowerLevel:
    lvl = tower.levels[sigma.level]
    if lvl.kind is not LevelKind.FAC:
        raise TowerError(f"level {sigma.level} is not a factorization level")
    return lvl


def x_multiple_oracle(tower: Tower, sigma: FacElement) -> bool:
    """``x | sigma`` iff ``q`` divides the constant and every y-coefficient."""
    q = _check_fac(tower, sigma).q
    return tower.divides(q, sigma.c) and all(tower.divides(q, b) for _, b in sigma.ys)


def y_multiple_oracle(tower: Tower, sigma: FacElement) -> bool:
    q = _check_fac(tower, sigma).q
    return tower.divides(q, sigma.c) and all(tower.divides(q, a) for _, a in sigma.xs)


def exact_div_x(tower: Tower, sigma: FacElement) -> FacElement:
    """Quotient by ``x``: x-powers drop by one, ``c/q`` and ``b_n/q`` move up a y-power."""
    q = _check_fac(tower, sigma).q
    if not x_multiple_oracle(tower, sigma):
        raise NotDivisible(f"x does not divide {sigma}")
    acc = {m - 1: a for m, a in sigma.xs}
    acc[-1] = tower.exact_div(q, sigma.c)
    for n, b in sigma.ys:
        acc[-(n + 1)] = tower.exact_div(q, b)
    return from_terms(tower, sigma.level, acc)


def exact_div_y(tower: Tower, sigma: FacElement) -> FacElement:
    q = _check_fac(tower, sigma).q
    if not y_multiple_oracle(tower, sigma):
        raise NotDivisible(f"y does not divide {sigma}")
    acc = {-(n - 1): b for n, b in sigma.ys}
    acc[1] = tower.exact_div(q, sigma.c)
    for m, a in sigma.xs:
        acc[m + 1] = tower.exact_div(q, a)
    return from_terms(tower, sigma.level, acc)


def generator_pair(tower: Tower, level: int) -> tuple[FacElement, FacElement]:
    parent = tower.levels[level].parent
    one = tower.int_const(parent, 1)
    zero = tower.int_const(parent, 0)
    x = FacElement(tower, level, ((1, one),), zero, ())
    y = FacElement(tower, level, (), zero, ((1, one),))
    return x, y


def extend_factor(tower: Tower, q: PrimeId, gen: tuple[int, int]) -> TowerLevel:
    """Append a Fac level introducing ``q = x*y`` with generators named by ``gen``."""
    tower._check_mutable()
    top = tower.top
    if not tower.is_live(q, top):
        raise NotLive(f"{q} is not a live prime at level {top}")
    gen = (int(gen[0]), int(gen[1]))
    if gen in tower.generators:
        raise TowerError(f"generator {gen} already exists")

    index = len(tower.levels)
    level = TowerLevel(index, LevelKind.FAC, parent=top, q=q, gen=gen)
    routes = {}
    demoted = []
    for r in tower.explicit_live(top):
        if r == q:
            continue
        if tower.is_associate(r, q, top):
            demoted.append(r)
            continue
        routes[r] = Route("lift")
    gx, gy = PrimeId.gen_x(*gen), PrimeId.gen_y(*gen)
    routes[gx] = Route("gen_x")
    routes[gy] = Route("gen_y")
    tower._push_level(level, routes)
    tower.generators[gen] = generator_pair(tower, index)

    factored = tower.registry.touch(q, index)
    factored.factored_as = gen
    factored.set_status(index, Status.FACTORED, f"{gx}*{gy}")
    for r in demoted:
        tp = tower.registry.touch(r, index)
        tp.associate_of = q
        tp.set_status(index, Status.ASSOCIATE, str(q))
    tower.registry.register(gx, index)
    tower.registry.register(gy, index)
    return level
