"""Append-only chains of rings ``Z = A_0 <= A_1 <= ...`` with exact arithmetic."""

from __future__ import annotations

import json
from typing import Any, Iterable, Iterator, Optional

from . import factorization as fac
from . import localization as loc
from . import primes
from .model import (
    BaseElement,
    FacElement,
    FrozenTower,
    LevelKind,
    LevelMismatch,
    LocElement,
    PrimeId,
    RingElement,
    Route,
    Status,
    TowerError,
    TowerLevel,
)


class Tower:
    """A chain of computable rings built from ``Z`` by localizations and
    factorization extensions.

    Level 0 is ``Z``.  Each later level has exactly one parent, the level
    directly below it.  Elements are canonical terms and compare structurally.
    """

    def __init__(self):
        self.levels: list[TowerLevel] = [TowerLevel(0, LevelKind.BASE)]
        self.registry = primes.Registry()
        self._routes: list[dict[PrimeId, Route]] = [{}]
        self.generators: dict[tuple[int, int], tuple[FacElement, FacElement]] = {}
        self.frozen = False
        self._height_cache: dict[tuple[int, int], list] = {}

    # -- structure -------------------------------------------------------

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def __len__(self) -> int:
        return len(self.levels)

    def freeze(self) -> Tower:
        self.frozen = True
        return self

    def _check_mutable(self) -> None:
        if self.frozen:
            raise FrozenTower("tower is frozen")

    def _push_level(self, level: TowerLevel, routes: dict) -> None:
        assert level.index == len(self.levels) and level.parent == self.top
        self.levels.append(level)
        self._routes.append(routes)

    def extend_localize(self, q: PrimeId) -> TowerLevel:
        return loc.extend_localize(self, q)

    def extend_factor(self, q: PrimeId, gen: tuple[int, int]) -> TowerLevel:
        return fac.extend_factor(self, q, gen)

    def _level(self, level: int) -> TowerLevel:
        if not 0 <= level < len(self.levels):
            raise TowerError(f"no level {level} (tower has {len(self.levels)})")
        return self.levels[level]

    # -- elements --------------------------------------------------------

    def int_const(self, level: int, n: int) -> RingElement:
        lvl = self._level(level)
        if lvl.kind is LevelKind.BASE:
            return BaseElement(self, int(n))
        inner = self.int_const(lvl.parent, n)
        return self.inject(level, inner)

    def zero(self, level: int) -> RingElement:
        return self.int_const(level, 0)

    def one(self, level: int) -> RingElement:
        return self.int_const(level, 1)

    def inject(self, child: int, e: RingElement) -> RingElement:
        lvl = self._level(child)
        if lvl.kind is LevelKind.BASE or e.level != lvl.parent:
            raise LevelMismatch(f"cannot inject level {e.level} into level {child}")
        if lvl.kind is LevelKind.LOC:
            return LocElement(self, child, e, 0)
        return FacElement(self, child, (), e, ())

    def lift(self, e: RingElement, level: int) -> RingElement:
        """Image of ``e`` at ``level`` through the chain of embeddings."""
        if level < e.level:
            raise LevelMismatch(f"cannot lower level {e.level} to {level}")
        for child in range(e.level + 1, level + 1):
            e = self.inject(child, e)
        return e

    def generator(self, kind: str, i: int, k: int, level: Optional[int] = None) -> RingElement:
        """``x(i,k)`` or ``y(i,k)`` at ``level`` (default: top)."""
        try:
            x, y = self.generators[(i, k)]
        except KeyError:
            raise TowerError(f"unknown generator {kind}({i},{k})") from None
        e = x if kind == "x" else y
        return self.lift(e, self.top if level is None else level)

    def prime_element(self, pid: PrimeId, level: int) -> RingElement:
        if pid.is_base:
            return self.int_const(level, primes.nth_prime(pid.i))
        return self.generator(pid.kind, pid.i, pid.k, level)

    # -- arithmetic ------------------------------------------------------

    def _same_level(self, a: RingElement, b: RingElement) -> int:
        if a.level != b.level:
            raise LevelMismatch(f"operands at levels {a.level} and {b.level}")
        return a.level

    def add(self, a: RingElement, b: RingElement) -> RingElement:
        kind = self.levels[self._same_level(a, b)].kind
        if kind is LevelKind.BASE:
            return BaseElement(self, a.n + b.n)
        if kind is LevelKind.LOC:
            return loc.loc_add(self, a, b)
        return fac.fac_add(self, a, b)

    def neg(self, a: RingElement) -> RingElement:
        kind = self.levels[a.level].kind
        if kind is LevelKind.BASE:
            return BaseElement(self, -a.n)
        if kind is LevelKind.LOC:
            return loc.loc_neg(self, a)
        return fac.fac_neg(self, a)

    def sub(self, a: RingElement, b: RingElement) -> RingElement:
        return self.add(a, self.neg(b))

    def mul(self, a: RingElement, b: RingElement) -> RingElement:
        kind = self.levels[self._same_level(a, b)].kind
        if kind is LevelKind.BASE:
            return BaseElement(self, a.n * b.n)
        if kind is LevelKind.LOC:
            return loc.loc_mul(self, a, b)
        return fac.fac_mul(self, a, b)

    def power(self, a: RingElement, n: int) -> RingElement:
        if n < 0:
            raise ValueError("only nonnegative powers exist in general")
        result = self.one(a.level)
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def equals(self, a: RingElement, b: RingElement) -> bool:
        self._same_level(a, b)
        return a == b

    # -- tracked primes --------------------------------------------------

    def divides(self, p: PrimeId, sigma: RingElement) -> bool:
        return primes.divides(self, p, sigma)

    def exact_div(self, p: PrimeId, sigma: RingElement) -> RingElement:
        return primes.exact_div(self, p, sigma)

    def prime_power_divides(self, p: PrimeId, k: int, sigma: RingElement) -> bool:
        return primes.prime_power_divides(self, p, k, sigma)

    def is_unit(self, sigma: RingElement) -> bool:
        return primes.is_unit(self, sigma)

    def is_associate(self, p: PrimeId, r: PrimeId, level: Optional[int] = None) -> bool:
        return primes.is_associate(self, p, r, level)

    def is_live(self, pid: PrimeId, level: Optional[int] = None) -> bool:
        if pid.k is not None and pid.gen not in self.generators:
            return False
        return primes.route(self, pid, self.top if level is None else level) is not None

    def explicit_live(self, level: Optional[int] = None) -> list[PrimeId]:
        """Registered primes with an oracle at ``level``, in id order."""
        level = self.top if level is None else level
        return sorted(tp.id for tp in self.registry if primes.route(self, tp.id, level))

    def live_primes(self, level: Optional[int] = None, base_upto: int = 0) -> list[PrimeId]:
        """Explicit live primes plus implicitly tracked ``p_j`` with ``j < base_upto``."""
        level = self.top if level is None else level
        out = set(self.explicit_live(level))
        for j in range(base_upto):
            pid = PrimeId.base(j)
            if primes.route(self, pid, level) is not None:
                out.add(pid)
        return sorted(out)

    def status(self, pid: PrimeId, level: Optional[int] = None) -> Status:
        level = self.top if level is None else level
        tp = self.registry.get(pid)
        if tp is None:
            if pid.is_base:
                return Status.PRIME
            raise TowerError(f"unknown tracked prime {pid}")
        if level < tp.birth:
            raise TowerError(f"{pid} does not exist at level {level}")
        return tp.status_at(level)

    # -- degrees and factorization-level helpers -------------------------

    def deg_x(self, sigma: FacElement) -> int:
        self._expect(sigma, LevelKind.FAC)
        return fac.deg_x(sigma)

    def deg_y(self, sigma: FacElement) -> int:
        self._expect(sigma, LevelKind.FAC)
        return fac.deg_y(sigma)

    def _expect(self, sigma: RingElement, kind: LevelKind) -> None:
        if self.levels[sigma.level].kind is not kind:
            raise TowerError(f"level {sigma.level} is not a {kind.value} level")

    def frac(self, level: int, num: RingElement, k: int) -> LocElement:
        """Canonical ``num / q^k`` at a Loc level."""
        self._expect_level(level, LevelKind.LOC)
        return loc.canonicalize_frac(self, level, num, k)

    def fac_element(self, level: int, xs: dict | None = None, c=0, ys: dict | None = None) -> FacElement:
        """Canonical Fac element from exponent->coefficient maps (ints are lifted)."""
        self._expect_level(level, LevelKind.FAC)
        parent = self.levels[level].parent

        def coerce(v):
            return self.int_const(parent, v) if isinstance(v, int) else v

        terms = {0: coerce(c)}
        for m, a in (xs or {}).items():
            if m < 1:
                raise ValueError("x exponents must be positive")
            terms[m] = coerce(a)
        for n, b in (ys or {}).items():
            if n < 1:
                raise ValueError("y exponents must be positive")
            terms[-n] = coerce(b)
        return fac.from_terms(self, level, terms)

    def _expect_level(self, level: int, kind: LevelKind) -> None:
        if self._level(level).kind is not kind:
            raise TowerError(f"level {level} is not a {kind.value} level")

    # -- canonicity ------------------------------------------------------

    def canonical_violations(self, e: RingElement, where: str = "element") -> list[str]:
        """Describe every way ``e`` departs from canonical form (empty if canonical)."""
        out: list[str] = []
        self._canon(e, where, out)
        return out

    def _canon(self, e: RingElement, where: str, out: list) -> None:
        lvl = self.levels[e.level]
        if lvl.kind is LevelKind.BASE:
            if not isinstance(e, BaseElement) or not isinstance(e.n, int):
                out.append(f"{where}: malformed integer")
            return
        if lvl.kind is LevelKind.LOC:
            self._canon(e.num, where, out)
            if e.k < 0:
                out.append(f"{where}: negative denominator exponent")
            elif e.k > 0 and (e.num.is_zero() or self.divides(lvl.q, e.num)):
                out.append(f"{where}: fraction numerator divisible by {lvl.q}")
            return
        for name, slots in (("xs", e.xs), ("ys", e.ys)):
            exps = [m for m, _ in slots]
            if exps != sorted(set(exps)) or any(m < 1 for m in exps):
                out.append(f"{where}: {name} exponents not strictly increasing positive")
            for m, v in slots:
                if v.is_zero():
                    out.append(f"{where}: zero coefficient stored at {name}[{m}]")
                self._canon(v, where, out)
        self._canon(e.c, where, out)

    # -- enumeration -----------------------------------------------------

    def height(self, e: RingElement) -> int:
        """Size used by :meth:`enumerate`; finitely many elements share each height."""
        kind = self.levels[e.level].kind
        if kind is LevelKind.BASE:
            return abs(e.n)
        if kind is LevelKind.LOC:
            return self.height(e.num) + e.k
        return sum(abs(m) + self.height(v) for m, v in e.terms())

    def sort_key(self, e: RingElement) -> tuple:
        kind = self.levels[e.level].kind
        if kind is LevelKind.BASE:
            return (abs(e.n), e.n < 0)
        if kind is LevelKind.LOC:
            return (e.k, self.sort_key(e.num))
        return tuple((m, self.sort_key(v)) for m, v in e.terms())

    def _of_height(self, level: int, h: int) -> list:
        key = (level, h)
        if key in self._height_cache:
            return self._height_cache[key]
        lvl = self.levels[level]
        if lvl.kind is LevelKind.BASE:
            found = [BaseElement(self, 0)] if h == 0 else [BaseElement(self, h), BaseElement(self, -h)]
        elif lvl.kind is LevelKind.LOC:
            found = [LocElement(self, level, a, 0) for a in self._of_height(lvl.parent, h)]
            for k in range(1, h + 1):
                for a in self._of_height(lvl.parent, h - k):
                    if not a.is_zero() and not self.divides(lvl.q, a):
                        found.append(LocElement(self, level, a, k))
        else:
            found = [fac.from_terms(self, level, t) for t in self._fac_term_sets(lvl.parent, h)]
        found.sort(key=self.sort_key)
        self._height_cache[key] = found
        return found

    def _fac_term_sets(self, parent: int, h: int) -> Iterator[dict]:
        # each nonzero term (e, v) costs |e| + height(v) >= 1
        exps = sorted(range(-h, h + 1), key=lambda e: (abs(e), e))

        def rec(idx: int, budget: int, acc: dict):
            if budget == 0:
                yield dict(acc)
                return
            if idx == len(exps):
                return
            e = exps[idx]
            yield from rec(idx + 1, budget, acc)
            for hv in range(1, budget - abs(e) + 1):
                for v in self._of_height(parent, hv):
                    acc[e] = v
                    yield from rec(idx + 1, budget - abs(e) - hv, acc)
                    del acc[e]

        if h == 0:
            yield {}
            return
        yield from rec(0, h, {})

    def iter_elements(self, level: int) -> Iterator[RingElement]:
        self._level(level)
        h = 0
        while True:
            yield from self._of_height(level, h)
            h += 1

    def enumerate(self, level: int, count: int) -> list:
        """First ``count`` elements in (height, payload) order; repetition-free."""
        if count < 0:
            raise ValueError("count must be >= 0")
        out = []
        if count == 0:
            return out
        for e in self.iter_elements(level):
            out.append(e)
            if len(out) == count:
                break
        return out

    # -- serialization ---------------------------------------------------

    def to_json(self) -> list:
        return [lvl.to_json() for lvl in self.levels]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, records: Iterable[dict]) -> Tower:
        """Rebuild a tower by replaying its extension records."""
        tower = cls()
        for pos, rec in enumerate(records):
            try:
                kind = LevelKind(rec["kind"])
                if rec["index"] != pos:
                    raise TowerError(f"level record {pos} has index {rec['index']}")
                if kind is LevelKind.BASE:
                    if pos != 0:
                        raise TowerError("only level 0 may be the base")
                    continue
                if pos == 0:
                    raise TowerError("level 0 must be the base")
                if rec["parent"] != pos - 1:
                    raise TowerError(f"level {pos} must have parent {pos - 1}")
                q = PrimeId.parse(rec["q"])
                if kind is LevelKind.LOC:
                    tower.extend_localize(q)
                else:
                    tower.extend_factor(q, tuple(rec["gen"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise TowerError(f"bad level record {pos}: {exc}") from exc
        return tower

    @classmethod
    def loads(cls, text: str) -> Tower:
        return cls.from_json(json.loads(text))

    def element_to_json(self, e: RingElement) -> Any:
        kind = self.levels[e.level].kind
        if kind is LevelKind.BASE:
            return {"int": e.n}
        if kind is LevelKind.LOC:
            if e.k == 0:
                return {"plain": self.element_to_json(e.num)}
            return {"num": self.element_to_json(e.num), "k": e.k}
        return {
            "xs": [[m, self.element_to_json(v)] for m, v in e.xs],
            "c": self.element_to_json(e.c),
            "ys": [[n, self.element_to_json(v)] for n, v in e.ys],
        }

    def element_from_json(self, level: int, obj: Any) -> RingElement:
        """Inverse of :meth:`element_to_json`; rejects non-canonical payloads."""
        e = self._decode(level, obj)
        bad = self.canonical_violations(e)
        if bad:
            raise TowerError("; ".join(bad))
        return e

    def _decode(self, level: int, obj: Any) -> RingElement:
        lvl = self._level(level)
        try:
            if lvl.kind is LevelKind.BASE:
                n = obj["int"]
                if not isinstance(n, int) or isinstance(n, bool):
                    raise TypeError("integer payload expected")
                return BaseElement(self, n)
            if lvl.kind is LevelKind.LOC:
                if "plain" in obj:
                    return LocElement(self, level, self._decode(lvl.parent, obj["plain"]), 0)
                return LocElement(self, level, self._decode(lvl.parent, obj["num"]), int(obj["k"]))
            return FacElement(
                self,
                level,
                tuple((int(m), self._decode(lvl.parent, v)) for m, v in obj["xs"]),
                self._decode(lvl.parent, obj["c"]),
                tuple((int(n), self._decode(lvl.parent, v)) for n, v in obj["ys"]),
            )
        except (KeyError, TypeError) as exc:
            raise TowerError(f"malformed element payload at level {level}: {exc}") from exc

    # -- display ---------------------------------------------------------

    def format(self, e: RingElement) -> str:
        lvl = self.levels[e.level]
        if lvl.kind is LevelKind.BASE:
            return str(e.n)
        if lvl.kind is LevelKind.LOC:
            if e.k == 0:
                return self.format(e.num)
            q = self._format_prime(lvl.q)
            den = q if e.k == 1 else f"{q}^{e.k}"
            num = self.format(e.num)
            return f"{num}/{den}" if num.lstrip("-").isdigit() else f"({num})/{den}"
        if e.is_zero():
            return "0"
        i, k = lvl.gen
        parts = []
        for m, v in e.terms():
            coeff = self.format(v)
            if m == 0:
                parts.append(coeff)
                continue
            sym = f"x({i},{k})" if m > 0 else f"y({i},{k})"
            mono = sym if abs(m) == 1 else f"{sym}^{abs(m)}"
            if coeff == "1":
                parts.append(mono)
            elif coeff == "-1":
                parts.append(f"-{mono}")
            elif coeff.lstrip("-").isdigit():
                parts.append(f"{coeff}*{mono}")
            else:
                parts.append(f"({coeff})*{mono}")
        text = parts[0]
        for part in parts[1:]:
            text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return text

    def _format_prime(self, pid: PrimeId) -> str:
        if pid.is_base:
            return str(primes.nth_prime(pid.i))
        return f"{pid.kind}({pid.i},{pid.k})"
