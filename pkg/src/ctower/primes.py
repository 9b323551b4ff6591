"""Tracked primes: registry, composed multiple-oracles, exact division, units.

Every level keeps a route per explicitly tracked prime saying how ``p | sigma``
is decided there.  Routes chain downwards, one step per level, so a query
costs O(levels x element size).  Base primes that no extension has touched
are tracked implicitly: their route is integer remainder at level 0 and a
plain lift everywhere above.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterator, Optional

from . import factorization as fac
from . import localization as loc
from .model import (
    BaseElement,
    LevelKind,
    NotDivisible,
    NotLive,
    PrimeId,
    Route,
    TowerError,
    TrackedPrime,
)

if TYPE_CHECKING:
    from .tower import Tower

_PRIMES = [2, 3]


def nth_prime(i: int) -> int:
    """``p_i`` with ``p_0 = 2``."""
    if i < 0:
        raise ValueError("prime index must be >= 0")
    candidate = _PRIMES[-1]
    while len(_PRIMES) <= i:
        candidate += 2
        if all(candidate % p for p in _PRIMES if p * p <= candidate):
            _PRIMES.append(candidate)
    return _PRIMES[i]


def prime_index(p: int) -> Optional[int]:
    """Inverse of :func:`nth_prime`; ``None`` when ``p`` is not prime."""
    if p < 2:
        return None
    i = 0
    while nth_prime(i) < p:
        i += 1
    return i if nth_prime(i) == p else None


class Registry:
    """Tracked primes that some extension has created or touched."""

    def __init__(self):
        self._primes: dict[PrimeId, TrackedPrime] = {}
        # first level at which a base prime stopped being implicitly tracked
        self.touched_at: dict[PrimeId, int] = {}

    def __contains__(self, pid: PrimeId) -> bool:
        return pid in self._primes

    def __getitem__(self, pid: PrimeId) -> TrackedPrime:
        return self._primes[pid]

    def __iter__(self) -> Iterator[TrackedPrime]:
        return iter(self._primes.values())

    def get(self, pid: PrimeId) -> Optional[TrackedPrime]:
        return self._primes.get(pid)

    def register(self, pid: PrimeId, birth: int) -> TrackedPrime:
        if pid in self._primes:
            raise TowerError(f"{pid} is already registered")
        tp = TrackedPrime(pid, birth)
        self._primes[pid] = tp
        return tp

    def touch(self, pid: PrimeId, level: int) -> TrackedPrime:
        if pid not in self._primes:
            if not pid.is_base:
                raise TowerError(f"unknown tracked prime {pid}")
            self._primes[pid] = TrackedPrime(pid, 0)
            self.touched_at[pid] = level
        return self._primes[pid]


def route(tower: Tower, pid: PrimeId, level: int) -> Optional[Route]:
    if pid.is_base:
        touched = tower.registry.touched_at.get(pid)
        if touched is None or level < touched:
            return Route("int") if level == 0 else Route("lift")
    return tower._routes[level].get(pid)


def _route_or_raise(tower: Tower, pid: PrimeId, level: int) -> Route:
    r = route(tower, pid, level)
    if r is None:
        tp = tower.registry.get(pid)
        if tp is not None and level < tp.birth:
            raise NotLive(f"{pid} does not exist below level {tp.birth}")
        status = tp.status_at(level).value if tp is not None else "unknown"
        raise NotLive(f"{pid} is not a live prime at level {level} ({status})")
    return r


def divides(tower: Tower, p: PrimeId, sigma) -> bool:
    r = _route_or_raise(tower, p, sigma.level)
    if r.kind == "int":
        return sigma.n % nth_prime(p.i) == 0
    if r.kind == "alias":
        return divides(tower, r.target, sigma)
    if r.kind == "gen_x":
        return fac.x_multiple_oracle(tower, sigma)
    if r.kind == "gen_y":
        return fac.y_multiple_oracle(tower, sigma)
    if tower.levels[sigma.level].kind is LevelKind.LOC:
        return loc.loc_lift_multiple_oracle(tower, p, sigma)
    return fac.fac_lift_multiple_oracle(tower, p, sigma)


def exact_div(tower: Tower, p: PrimeId, sigma):
    r = _route_or_raise(tower, p, sigma.level)
    if r.kind == "int":
        q, rem = divmod(sigma.n, nth_prime(p.i))
        if rem:
            raise NotDivisible(f"{p} does not divide {sigma.n}")
        return BaseElement(tower, q)
    if not divides(tower, p, sigma):
        raise NotDivisible(f"{p} does not divide {sigma}")
    if r.kind == "alias":
        return tower.mul(exact_div(tower, r.target, sigma), r.unit_inv)
    if r.kind == "gen_x":
        return fac.exact_div_x(tower, sigma)
    if r.kind == "gen_y":
        return fac.exact_div_y(tower, sigma)
    if tower.levels[sigma.level].kind is LevelKind.LOC:
        return loc.loc_lift_exact_div(tower, p, sigma)
    return fac.fac_lift_exact_div(tower, p, sigma)


def prime_power_divides(tower: Tower, p: PrimeId, k: int, sigma) -> bool:
    if k < 1:
        raise ValueError("k must be positive")
    for _ in range(k):
        if not divides(tower, p, sigma):
            return False
        sigma = exact_div(tower, p, sigma)
    return True


def is_unit(tower: Tower, sigma) -> bool:
    kind = tower.levels[sigma.level].kind
    if kind is LevelKind.BASE:
        return sigma.n in (1, -1)
    if kind is LevelKind.LOC:
        return loc.loc_is_unit(tower, sigma)
    return fac.fac_is_unit(tower, sigma)


def is_associate(tower: Tower, p: PrimeId, r: PrimeId, level: Optional[int] = None) -> bool:
    """Associateness of two live tracked primes via mutual divisibility."""
    if level is None:
        level = tower.top
    _route_or_raise(tower, p, level)
    _route_or_raise(tower, r, level)
    if p == r:
        return True
    return divides(tower, p, tower.prime_element(r, level)) and divides(
        tower, r, tower.prime_element(p, level)
    )
