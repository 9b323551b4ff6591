"""Shared data types: level descriptors, tracked-prime ids, canonical elements."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Optional

if TYPE_CHECKING:
    from .tower import Tower


class TowerError(Exception):
    """Base class for errors raised by tower operations."""


class LevelMismatch(TowerError):
    pass


class NotLive(TowerError):
    """A tracked prime was queried at a level where it has no multiple-oracle."""


class NotDivisible(TowerError):
    pass


class FrozenTower(TowerError):
    pass


class LevelKind(str, enum.Enum):
    BASE = "base"
    LOC = "loc"
    FAC = "fac"


@dataclass(frozen=True, order=True)
class PrimeId:
    """Name of a distinguished prime: ``p:i``, ``x:i:k`` or ``y:i:k``."""

    kind: str
    i: int
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("p", "x", "y"):
            raise ValueError(f"bad prime kind {self.kind!r}")
        if (self.kind == "p") != (self.k is None):
            raise ValueError("base primes take one index, generators take two")

    @classmethod
    def base(cls, i: int) -> PrimeId:
        return cls("p", i)

    @classmethod
    def gen_x(cls, i: int, k: int) -> PrimeId:
        return cls("x", i, k)

    @classmethod
    def gen_y(cls, i: int, k: int) -> PrimeId:
        return cls("y", i, k)

    @classmethod
    def parse(cls, text: str) -> PrimeId:
        parts = text.strip().split(":")
        try:
            if parts[0] == "p" and len(parts) == 2:
                return cls("p", int(parts[1]))
            if parts[0] in ("x", "y") and len(parts) == 3:
                return cls(parts[0], int(parts[1]), int(parts[2]))
        except ValueError:
            pass
        raise ValueError(f"malformed tracked-prime id {text!r}")

    @property
    def is_base(self) -> bool:
        return self.kind == "p"

    @property
    def gen(self) -> tuple[int, int]:
        if self.k is None:
            raise ValueError(f"{self} is not a generator")
        return (self.i, self.k)

    def __str__(self) -> str:
        if self.k is None:
            return f"p:{self.i}"
        return f"{self.kind}:{self.i}:{self.k}"


@dataclass(frozen=True)
class TowerLevel:
    index: int
    kind: LevelKind
    parent: Optional[int] = None
    q: Optional[PrimeId] = None
    gen: Optional[tuple[int, int]] = None

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "kind": self.kind.value,
            "parent": self.parent,
            "q": None if self.q is None else str(self.q),
            "gen": None if self.gen is None else list(self.gen),
        }


class Status(str, enum.Enum):
    PRIME = "prime"
    FACTORED = "factored"
    UNIT = "unit"
    ASSOCIATE = "associate"


@dataclass
class TrackedPrime:
    id: PrimeId
    birth: int
    status: Status = Status.PRIME
    # (level, status, detail) transitions; retired primes keep theirs as a tombstone
    history: list = field(default_factory=list)
    associate_of: Optional[PrimeId] = None
    factored_as: Optional[tuple[int, int]] = None

    def status_at(self, level: int) -> Status:
        current = Status.PRIME
        for lvl, status, _ in self.history:
            if lvl > level:
                break
            current = status
        return current

    def set_status(self, level: int, status: Status, detail: Any = None) -> None:
        self.status = status
        self.history.append((level, status, detail))


@dataclass(frozen=True)
class Route:
    """How divisibility by one tracked prime is decided at one level.

    ``int``: integer remainder (level 0 only); ``lift``: delegate to the parent
    (numerator or every coefficient); ``gen_x``/``gen_y``: the generator tests
    of a factorization level; ``alias``: the prime is ``target`` times a unit
    whose inverse is ``unit_inv``.
    """

    kind: str
    target: Optional[PrimeId] = None
    unit_inv: Any = None


# --- elements -------------------------------------------------------------


class RingElement:
    """Operator sugar over :class:`~ctower.tower.Tower` arithmetic."""

    __slots__ = ()
    level: int
    tower: Tower

    def _coerce(self, other) -> RingElement:
        if isinstance(other, RingElement):
            return other
        if isinstance(other, int):
            return self.tower.int_const(self.level, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.tower.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.tower.sub(self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.tower.sub(other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.tower.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.tower.neg(self)

    def __pow__(self, n: int):
        return self.tower.power(self, n)

    def __str__(self) -> str:
        return self.tower.format(self)

    def to_json(self) -> Any:
        return self.tower.element_to_json(self)

    def is_zero(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class BaseElement(RingElement):
    tower: Tower = field(compare=False, repr=False, hash=False)
    n: int = 0

    @property
    def level(self) -> int:
        return 0

    def is_zero(self) -> bool:
        return self.n == 0


@dataclass(frozen=True)
class LocElement(RingElement):
    """``num / q**k``; ``k == 0`` is the plain (non-fraction) shape."""

    tower: Tower = field(compare=False, repr=False, hash=False)
    level: int = 0
    num: Any = None
    k: int = 0

    @property
    def is_plain(self) -> bool:
        return self.k == 0

    def is_zero(self) -> bool:
        return self.num.is_zero()


@dataclass(frozen=True)
class FacElement(RingElement):
    """``sum a_m x^m + c + sum b_n y^n`` with ``xs``/``ys`` sorted by exponent."""

    tower: Tower = field(compare=False, repr=False, hash=False)
    level: int = 0
    xs: tuple = ()
    c: Any = None
    ys: tuple = ()

    def is_zero(self) -> bool:
        return not self.xs and not self.ys and self.c.is_zero()

    def terms(self):
        """Yield ``(e, coeff)`` with x-powers positive, y-powers negative."""
        for n, b in reversed(self.ys):
            yield -n, b
        if not self.c.is_zero():
            yield 0, self.c
        for m, a in self.xs:
            yield m, a

    @property
    def is_constant(self) -> bool:
        return not self.xs and not self.ys
