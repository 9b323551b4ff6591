"""Rings of integers presented by an integral basis ``b_1 = 1, b_2, ..., b_n``.

Multiplication comes from the table of basis products.  Norms are
determinants of multiplication matrices, divisibility is an exact rational
linear solve, and primality is a zero-divisor scan of the finite quotient
``O / <alpha>``, whose size is ``|N(alpha)|``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class AlgInt:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __add__(self, other: AlgInt) -> AlgInt:
        return AlgInt(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: AlgInt) -> AlgInt:
        return AlgInt(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> AlgInt:
        return AlgInt(-a for a in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> list:
        return list(self.coords)


Elem = Union[AlgInt, Sequence[int], int]


@dataclass(frozen=True)
class NumberRingPresentation:
    n: int
    table: tuple  # table[i][j] = coords of b_{i+1} * b_{j+1}
    name: str = ""

    def elem(self, value: Elem) -> AlgInt:
        """Coerce an int (a multiple of 1) or a coordinate sequence."""
        if isinstance(value, AlgInt):
            coords = value.coords
        elif isinstance(value, int):
            coords = (value,) + (0,) * (self.n - 1)
        else:
            coords = tuple(value)
        if len(coords) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(coords)}")
        return AlgInt(coords)

    def to_json(self) -> dict:
        return {"n": self.n, "table": [[list(v) for v in row] for row in self.table]}


def _mul_coords(table, n: int, a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * n
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            if not bj:
                continue
            coef = ai * bj
            for r, v in enumerate(table[i][j]):
                out[r] += coef * v
    return out


def load_presentation(raw, name: str = "") -> NumberRingPresentation:
    """Validate ``{"n": n, "table": [...]}`` (or its JSON text)."""
    if isinstance(raw, (str, bytes)):
        raw = json.loads(raw)
    try:
        n = int(raw["n"])
        table = tuple(tuple(tuple(int(v) for v in cell) for cell in row) for row in raw["table"])
    except (KeyError, TypeError, ValueError) as exc:
        raise PresentationError(f"malformed presentation: {exc}") from exc
    if n < 1:
        raise PresentationError("rank must be >= 1")
    if len(table) != n or any(len(row) != n for row in table) or any(
        len(cell) != n for row in table for cell in row
    ):
        raise PresentationError(f"table must be {n} x {n} x {n}")
    unit = [tuple(int(r == j) for r in range(n)) for j in range(n)]
    for j in range(n):
        if table[0][j] != unit[j] or table[j][0] != unit[j]:
            raise PresentationError(f"identity: b_1 * b_{j + 1} != b_{j + 1}")
    for i, j in itertools.combinations(range(n), 2):
        if table[i][j] != table[j][i]:
            raise PresentationError(f"commutativity: b_{i + 1} b_{j + 1} != b_{j + 1} b_{i + 1}")
    for i, j, k in itertools.product(range(n), repeat=3):
        left = _mul_coords(table, n, table[i][j], unit[k])
        right = _mul_coords(table, n, unit[i], table[j][k])
        if left != right:
            raise PresentationError(
                f"associativity: (b_{i + 1} b_{j + 1}) b_{k + 1} != b_{i + 1} (b_{j + 1} b_{k + 1})"
            )
    return NumberRingPresentation(n, table, name)


BUNDLED = ("zz", "gaussian", "zsqrt2", "zsqrt7", "zsqrtm5", "zsqrtm14")


def bundled(name: str) -> NumberRingPresentation:
    name = name.removesuffix(".json")
    if name not in BUNDLED:
        raise PresentationError(f"no bundled presentation {name!r} (have {', '.join(BUNDLED)})")
    text = resources.files("ctower.data").joinpath(f"{name}.json").read_text()
    return load_presentation(text, name)


def open_presentation(ref: str) -> NumberRingPresentation:
    """Load from a file path, falling back to a bundled name."""
    path = Path(ref)
    if path.is_file():
        return load_presentation(path.read_text(), path.stem)
    return bundled(path.name)


def quadratic(d: int) -> NumberRingPresentation:
    """``Z[sqrt d]`` with basis ``1, sqrt d``."""
    return load_presentation({"n": 2, "table": [[[1, 0], [0, 1]], [[0, 1], [d, 0]]]}, f"Z[sqrt({d})]")


# --- arithmetic ----------------------------------------------------------


def nr_mul(ring: NumberRingPresentation, a: Elem, b: Elem) -> AlgInt:
    return AlgInt(_mul_coords(ring.table, ring.n, ring.elem(a).coords, ring.elem(b).coords))


def mult_matrix(ring: NumberRingPresentation, a: Elem) -> list[list[int]]:
    """Matrix of ``v -> a*v``; column ``j`` holds the coordinates of ``a * b_{j+1}``."""
    a = ring.elem(a)
    cols = [_mul_coords(ring.table, ring.n, a.coords, [int(r == j) for r in range(ring.n)]) for j in range(ring.n)]
    return [[cols[j][r] for j in range(ring.n)] for r in range(ring.n)]


def det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (Bareiss fraction-free elimination)."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def norm(ring: NumberRingPresentation, a: Elem) -> int:
    return det(mult_matrix(ring, a))


def nr_is_unit(ring: NumberRingPresentation, a: Elem) -> bool:
    return abs(norm(ring, a)) == 1


def _inverse(matrix: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(int(r == c)) for c in range(n)] for r, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular multiplication matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        lead = aug[col][col]
        aug[col] = [v / lead for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _solve(matrix, rhs: Sequence[int]) -> list[Fraction]:
    inv = _inverse(matrix)
    return [sum((inv[r][c] * rhs[c] for c in range(len(rhs))), Fraction(0)) for r in range(len(rhs))]


def nr_divides(ring: NumberRingPresentation, a: Elem, b: Elem) -> tuple[bool, Optional[AlgInt]]:
    """Decide ``a | b``; on success also return the quotient ``b / a``."""
    a, b = ring.elem(a), ring.elem(b)
    if a.is_zero():
        raise ZeroDivisionError("divisibility by zero is undefined")
    gamma = _solve(mult_matrix(ring, a), b.coords)
    if all(g.denominator == 1 for g in gamma):
        return True, AlgInt(int(g) for g in gamma)
    return False, None


class _Residues:
    """Congruence classes mod ``alpha``.

    ``u = v (mod alpha)`` iff ``M_alpha^-1 (u - v)`` is integral, i.e. iff
    ``M_alpha^-1 u`` and ``M_alpha^-1 v`` have the same fractional parts, so
    the fractional parts are a complete class invariant.
    """

    def __init__(self, ring: NumberRingPresentation, alpha: AlgInt):
        self.ring = ring
        self.inv = _inverse(mult_matrix(ring, alpha))
        self.zero = (Fraction(0),) * ring.n

    def key(self, v: AlgInt) -> tuple:
        n = self.ring.n
        return tuple(sum((self.inv[r][c] * v.coords[c] for c in range(n)), Fraction(0)) % 1 for r in range(n))


def _box(n: int, radius: int):
    """Coordinate vectors of max-norm exactly ``radius``, lexicographically."""
    for v in itertools.product(range(-radius, radius + 1), repeat=n):
        if max((abs(c) for c in v), default=0) == radius:
            yield AlgInt(v)


def quotient_reps(ring: NumberRingPresentation, a: Elem) -> list[AlgInt]:
    """``|N(a)|`` pairwise incongruent representatives of ``O / <a>``."""
    a = ring.elem(a)
    if a.is_zero():
        raise ValueError("quotient by zero is infinite")
    size = abs(norm(ring, a))
    if size == 1:
        raise ValueError("quotient by a unit is trivial")
    res = _Residues(ring, a)
    seen: dict = {}
    radius = 0
    while len(seen) < size:
        for v in _box(ring.n, radius):
            k = res.key(v)
            if k not in seen:
                seen[k] = v
                if len(seen) == size:
                    break
        radius += 1
    return list(seen.values())


def nr_is_prime(ring: NumberRingPresentation, a: Elem) -> bool:
    """``a`` is prime iff it is a nonzero nonunit and ``O/<a>`` has no zero divisors."""
    a = ring.elem(a)
    if a.is_zero() or nr_is_unit(ring, a):
        return False
    res = _Residues(ring, a)
    nonzero = [v for v in quotient_reps(ring, a) if res.key(v) != res.zero]
    for idx, u in enumerate(nonzero):
        for v in nonzero[idx:]:
            if res.key(nr_mul(ring, u, v)) == res.zero:
                return False
    return True
