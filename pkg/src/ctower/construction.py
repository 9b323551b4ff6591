"""Stage-by-stage construction controlling which integer primes stay prime.

Stage ``<i, s>`` either initializes ``p_i`` (``s == 0``: factor ``p_i = x*y``)
or, when the predicate supplies a witness ``z <= s`` for the first unmarked
``w``, *acts* for ``i``: the current ``y`` becomes a unit and ``p_i`` is
refactored with fresh generators.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from .model import LevelKind, PrimeId, Status, TowerError
from .tower import Tower

log = logging.getLogger(__name__)


def pair(i: int, s: int) -> int:
    """Cantor pairing; strictly increasing in ``s`` for fixed ``i``."""
    if i < 0 or s < 0:
        raise ValueError("pair() takes natural numbers")
    return (i + s) * (i + s + 1) // 2 + s


def unpair(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("unpair() takes a natural number")
    d = (math.isqrt(8 * n + 1) - 1) // 2
    s = n - d * (d + 1) // 2
    return d - s, s


class PredicateError(TowerError):
    pass


BUILTINS = ("all", "none", "even", "threshold")


@dataclass(frozen=True)
class PredicateSpec:
    """A decidable relation ``R(w, z, i)``; ``i`` is in Q iff for all w some z works."""

    kind: str
    name: Optional[str] = None
    acts: tuple = ()
    entries: tuple = ()
    default: Optional[bool] = None

    def __post_init__(self):
        if self.kind == "builtin" and self.name not in BUILTINS:
            raise PredicateError(f"unknown builtin predicate {self.name!r}")
        if self.kind not in ("builtin", "table"):
            raise PredicateError(f"unknown predicate kind {self.kind!r}")

    @classmethod
    def builtin(cls, name: str) -> PredicateSpec:
        return cls("builtin", name)

    @classmethod
    def threshold(cls, acts: Iterable[int]) -> PredicateSpec:
        acts = tuple(int(a) for a in acts)
        if any(a < 0 for a in acts):
            raise PredicateError("threshold counts must be >= 0")
        return cls("builtin", "threshold", acts=acts)

    @classmethod
    def table(cls, entries: Iterable, default: Optional[bool] = None) -> PredicateSpec:
        rows = []
        for row in entries:
            w, z, i, val = row
            rows.append(((int(w), int(z), int(i)), bool(val)))
        keys = [k for k, _ in rows]
        if len(set(keys)) != len(keys):
            raise PredicateError("duplicate table entries")
        return cls("table", entries=tuple(sorted(rows)), default=default)

    @classmethod
    def from_json(cls, obj: Any) -> PredicateSpec:
        if isinstance(obj, str):
            return cls.builtin(obj)
        try:
            kind = obj["kind"]
            if kind == "threshold":
                return cls.threshold(obj["acts"])
            if kind == "table":
                return cls.table(obj["entries"], obj.get("default"))
            if kind == "builtin":
                if obj["name"] == "threshold":
                    return cls.threshold(obj.get("params", obj.get("acts", ())))
                return cls.builtin(obj["name"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PredicateError(f"malformed predicate: {exc}") from exc
        raise PredicateError(f"unknown predicate kind {kind!r}")

    def to_json(self) -> dict:
        if self.kind == "table":
            out = {"kind": "table", "entries": [[*k, v] for k, v in self.entries]}
            if self.default is not None:
                out["default"] = self.default
            return out
        if self.name == "threshold":
            return {"kind": "threshold", "acts": list(self.acts)}
        return {"kind": "builtin", "name": self.name}

    def __call__(self, w: int, z: int, i: int) -> bool:
        if self.kind == "table":
            for key, val in self.entries:
                if key == (w, z, i):
                    return val
            if self.default is None:
                raise PredicateError(f"table has no entry for R({w},{z},{i}) and no default")
            return self.default
        if self.name == "all":
            return True
        if self.name == "none":
            return False
        if self.name == "even":
            return i % 2 == 0
        limit = self.acts[i] if i < len(self.acts) else 0
        return w < limit

    def predicted_limit(self, i: int) -> str:
        """Whether ``p_i`` ends up prime in the limit ring, when that is known."""
        if self.kind == "table":
            return "unknown"
        if self.name == "all" or (self.name == "even" and i % 2 == 0):
            return "prime"
        return "not_prime"


@dataclass
class IRecord:
    initialized: bool = False
    k: int = 0
    marks: int = 0
    acts: int = 0


@dataclass(frozen=True)
class ActRecord:
    stage: int
    i: int
    k: int
    loc_level: int
    fac_level: int


@dataclass(frozen=True)
class StageEvent:
    stage: int
    i: int
    s: int
    action: str  # "init", "act" or "idle"
    levels: tuple = ()


@dataclass
class ConstructionState:
    tower: Tower = field(default_factory=Tower)
    records: dict = field(default_factory=dict)
    stage: int = 0
    acts_log: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)

    def record(self, i: int) -> IRecord:
        return self.records.setdefault(i, IRecord())

    def initialized(self) -> list[int]:
        return sorted(i for i, r in self.records.items() if r.initialized)

    @classmethod
    def from_tower(cls, tower: Tower) -> ConstructionState:
        """Recover per-``i`` bookkeeping from a tower's level records."""
        state = cls(tower=tower)
        levels = tower.levels
        for lvl in levels[1:]:
            if lvl.kind is LevelKind.FAC and lvl.q.is_base and lvl.gen == (lvl.q.i, 0):
                rec = state.record(lvl.q.i)
                rec.initialized = True
            elif lvl.kind is LevelKind.LOC and lvl.q.kind == "y":
                i, k = lvl.q.gen
                nxt = levels[lvl.index + 1] if lvl.index + 1 < len(levels) else None
                if nxt is not None and nxt.kind is LevelKind.FAC and nxt.gen == (i, k + 1):
                    rec = state.record(i)
                    rec.marks += 1
                    rec.acts += 1
                    rec.k = k + 1
                    state.acts_log.append(ActRecord(-1, i, k, lvl.index, nxt.index))
        return state


def run_stage(state: ConstructionState, pred: PredicateSpec) -> ConstructionState:
    n = state.stage
    i, s = unpair(n)
    tower = state.tower
    rec = state.record(i)
    before = len(tower.levels)
    if s == 0:
        if rec.initialized:
            state.anomalies.append(f"stage {n}: p_{i} initialized twice")
        else:
            tower.extend_factor(PrimeId.base(i), (i, 0))
            rec.initialized = True
            rec.k = 0
        action = "init"
    elif not rec.initialized:
        # unreachable with a pairing monotone in s; kept as a guard
        state.anomalies.append(f"stage {n}: work for uninitialized i={i}")
        action = "idle"
    else:
        k = rec.marks
        if any(pred(k, z, i) for z in range(s + 1)):
            loc_level = tower.extend_localize(PrimeId.gen_y(i, k)).index
            fac_level = tower.extend_factor(PrimeId.base(i), (i, k + 1)).index
            rec.marks += 1
            rec.acts += 1
            rec.k = k + 1
            state.acts_log.append(ActRecord(n, i, k, loc_level, fac_level))
            action = "act"
        else:
            action = "idle"
    state.trace.append(StageEvent(n, i, s, action, tuple(range(before, len(tower.levels)))))
    log.debug("stage %d = <%d,%d>: %s", n, i, s, action)
    state.stage += 1
    return state


def _base_window(state: ConstructionState) -> int:
    return max(state.initialized(), default=-1) + 2


def self_check(state: ConstructionState, acts_from: int = 0) -> list[str]:
    """Verify the stage invariants at the current top level; return violations.

    Act checks concern the (immutable) level right after each localization;
    ``acts_from`` skips acts already verified by an earlier call.
    """
    tower = state.tower
    top = tower.top
    out = list(state.anomalies)

    for i in state.initialized():
        rec = state.records[i]
        if rec.marks != rec.acts:
            out.append(f"i={i}: marks {rec.marks} != acts {rec.acts}")
        have = sorted(k for (j, k) in tower.generators if j == i)
        if have != list(range(rec.marks + 1)):
            out.append(f"i={i}: generators {have} but marks = {rec.marks}")
            continue
        k = rec.marks
        p = tower.prime_element(PrimeId.base(i), top)
        x = tower.generator("x", i, k, top)
        y = tower.generator("y", i, k, top)
        if not tower.equals(p, tower.mul(x, y)):
            out.append(f"i={i}: p_{i} != x({i},{k})*y({i},{k})")
        for pid in (PrimeId.gen_x(i, k), PrimeId.gen_y(i, k)):
            if not tower.is_live(pid, top):
                out.append(f"{pid} is not a live prime at the top level")
            elif tower.is_unit(tower.prime_element(pid, top)):
                out.append(f"{pid} is a unit at the top level")

    live = tower.live_primes(top, base_upto=_base_window(state))
    for a_idx, a in enumerate(live):
        for b in live[a_idx + 1:]:
            if tower.is_associate(a, b, top):
                out.append(f"{a} and {b} are associates at level {top}")

    for act in state.acts_log[acts_from:]:
        out.extend(_check_act(tower, act))

    for (i, k), pair_ in sorted(tower.generators.items()):
        for name, e in zip("xy", pair_):
            out.extend(tower.canonical_violations(e, f"{name}({i},{k})"))
    return out


def _check_act(tower: Tower, act: ActRecord) -> list[str]:
    """After localizing ``y``: ``y`` is a unit and ``p_i`` is ``x`` times a unit."""
    out = []
    L = act.loc_level
    gx, gy, p = PrimeId.gen_x(act.i, act.k), PrimeId.gen_y(act.i, act.k), PrimeId.base(act.i)
    where = f"act i={act.i} k={act.k} (level {L})"
    if not tower.is_unit(tower.prime_element(gy, L)):
        out.append(f"{where}: {gy} is not a unit")
    p_elem = tower.prime_element(p, L)
    if not tower.is_live(gx, L) or not tower.divides(gx, p_elem):
        out.append(f"{where}: {gx} does not divide p_{act.i}")
    elif not tower.is_unit(tower.exact_div(gx, p_elem)):
        out.append(f"{where}: p_{act.i}/{gx} is not a unit")
    if tower.status(p, L) is not Status.PRIME:
        out.append(f"{where}: p_{act.i} is not prime after the localization")
    return out


@dataclass
class StatusReport:
    stages: int
    per_i: list
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"stages": self.stages, "per_i": self.per_i, "violations": self.violations}


def status_report(state: ConstructionState, pred: Optional[PredicateSpec] = None) -> StatusReport:
    per_i = []
    for i in state.initialized():
        rec = state.records[i]
        per_i.append(
            {
                "i": i,
                "state": "factored",
                "k": rec.marks,
                "acts": rec.acts,
                "retired_units": [str(PrimeId.gen_y(i, k)) for k in range(rec.marks)],
                "predicted_limit": pred.predicted_limit(i) if pred is not None else "unknown",
            }
        )
    return StatusReport(state.stage, per_i)


def build(pred: PredicateSpec, horizon: int, check: bool = True) -> tuple[ConstructionState, StatusReport]:
    """Run stages ``0 .. horizon-1``, self-checking after each one."""
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    state = ConstructionState()
    violations = []
    checked = 0
    for _ in range(horizon):
        run_stage(state, pred)
        if check:
            found = self_check(state, acts_from=checked)
            checked = len(state.acts_log)
            violations.extend(f"stage {state.stage - 1}: {v}" for v in found)
    report = status_report(state, pred)
    report.violations = violations
    return state, report


def parse_enumeration(text: str) -> list[tuple[int, int]]:
    """Parse ``"i@stage,i@stage"``."""
    out = []
    for chunk in filter(None, (c.strip() for c in text.split(","))):
        try:
            i, stage = chunk.split("@")
            out.append((int(i), int(stage)))
        except ValueError:
            raise PredicateError(f"bad enumeration item {chunk!r} (want i@stage)") from None
    return out


def build_pid(
    enumeration: Iterable[tuple[int, int]], horizon: int, report_upto: Optional[int] = None
) -> tuple[Tower, StatusReport]:
    """Invert ``p_i`` at the stage where ``i`` is enumerated (finite stand-in for a
    c.e. set); ``p_i`` is a unit at the end iff it was enumerated before ``horizon``."""
    enumeration = [(int(i), int(t)) for i, t in enumeration]
    ids = [i for i, _ in enumeration]
    if len(set(ids)) != len(ids):
        raise PredicateError("an index is enumerated twice")
    at_stage = {}
    for i, t in enumeration:
        if t < 0 or i < 0:
            raise PredicateError("indices and stages must be >= 0")
        if t in at_stage:
            raise PredicateError(f"two indices enumerated at stage {t}")
        at_stage[t] = i
    tower = Tower()
    for t in range(horizon):
        if t in at_stage and tower.is_live(PrimeId.base(at_stage[t])):
            tower.extend_localize(PrimeId.base(at_stage[t]))
    upto = report_upto if report_upto is not None else max(ids, default=-1) + 2
    per_i = []
    for i in range(upto):
        when = next((t for j, t in enumeration if j == i), None)
        unit = tower.is_unit(tower.prime_element(PrimeId.base(i), tower.top))
        per_i.append({"i": i, "enumerated_at": when, "unit": unit})
    return tower, StatusReport(horizon, per_i)


def dump_report(report: StatusReport) -> str:
    return json.dumps(report.to_json(), indent=1)
