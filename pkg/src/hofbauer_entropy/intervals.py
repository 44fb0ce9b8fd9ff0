"""Open subintervals of [0, 1] with exact or floating endpoints.

Endpoints are `Fraction` in exact mode and `float` otherwise; mixing is allowed
and degrades to float. Empty intervals are represented by `lo >= hi` and
compare equal to `EMPTY`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from hofbauer_entropy.core.tolerances import eps_geom

Real = Union[Fraction, float, int]


def is_exact(value: Real) -> bool:
    return isinstance(value, (Fraction, int)) and not isinstance(value, bool)


def to_exact(value: Real | str) -> Real:
    """Parse "p/q", ints and decimal strings exactly; floats pass through."""

    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    return value


@dataclass(frozen=True)
class Interval:
    lo: Real
    hi: Real

    @property
    def exact(self) -> bool:
        return is_exact(self.lo) and is_exact(self.hi)

    @property
    def is_empty(self) -> bool:
        if self.exact:
            return self.lo >= self.hi
        return float(self.hi) - float(self.lo) <= eps_geom()

    @property
    def length(self) -> Real:
        if self.lo >= self.hi:
            return Fraction(0) if self.exact else 0.0
        return self.hi - self.lo

    @property
    def midpoint(self) -> Real:
        return (self.lo + self.hi) / 2

    def intersect(self, other: Interval) -> Interval:
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def overlaps(self, other: Interval) -> bool:
        """Open intersection is non-empty."""

        return not self.intersect(other).is_empty

    def contains(self, x: Real) -> bool:
        return self.lo < x < self.hi

    def contains_closed(self, x: Real) -> bool:
        return self.lo <= x <= self.hi

    def covers(self, other: Interval) -> bool:
        """Closed containment: closure(other) is a subset of closure(self)."""

        return self.lo <= other.lo and other.hi <= self.hi

    def hull(self, other: Interval) -> Interval:
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def same_as(self, other: Interval) -> bool:
        if self.exact and other.exact:
            return self.lo == other.lo and self.hi == other.hi
        tol = eps_geom()
        return abs(float(self.lo) - float(other.lo)) <= tol and abs(float(self.hi) - float(other.hi)) <= tol

    def key(self) -> tuple:
        """Hashable identity: exact endpoints, or float endpoints snapped to the eps_geom grid."""

        if self.exact:
            return (Fraction(self.lo), Fraction(self.hi))
        return (_snap(float(self.lo)), _snap(float(self.hi)))

    def __str__(self) -> str:
        return f"({_fmt(self.lo)}, {_fmt(self.hi)})"


EMPTY = Interval(Fraction(0), Fraction(0))
UNIT = Interval(Fraction(0), Fraction(1))


def hull_of(values: list[Real]) -> Interval:
    return Interval(min(values), max(values))


def _snap(v: float) -> float:
    tol = eps_geom()
    return round(v / tol) * tol if math.isfinite(v) else v


def _fmt(v: Real) -> str:
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    return format(float(v), ".12g")
