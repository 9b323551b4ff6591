"""Exact arithmetic for towers of computable UFDs built from the integers."""

from .model import (
    BaseElement,
    FacElement,
    LevelKind,
    LevelMismatch,
    LocElement,
    NotDivisible,
    NotLive,
    PrimeId,
    RingElement,
    Status,
    TowerError,
    TowerLevel,
)
from .primes import nth_prime
from .tower import Tower

__version__ = "0.1.0"

__all__ = [
    "BaseElement",
    "FacElement",
    "LevelKind",
    "LevelMismatch",
    "LocElement",
    "NotDivisible",
    "NotLive",
    "PrimeId",
    "RingElement",
    "Status",
    "Tower",
    "TowerError",
    "TowerLevel",
    "nth_prime",
]
