"""Piecewise-monotone interval self-maps of [0, 1].

A map is an ordered tuple of pieces covering [0, 1]; each piece carries a
smooth branch (a polynomial in the global coordinate, or one of the windowed
perturbation branches of `hofbauer_entropy.perturb`). Pieces need not be
monotone: `natural_partition` cuts them at critical points.

Conventions:
- `deriv` at a breakpoint is the right derivative (left derivative at x = 1).
- Critical points belong to no branch; itineraries are undefined there.
- Maps whose breakpoints and coefficients are all rational and whose pieces
  are affine run in exact `Fraction` arithmetic.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Protocol, Sequence, runtime_checkable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from hofbauer_entropy.core.errors import (
    BudgetError,
    DomainError,
    RepresentationError,
    ResolutionError,
    UnsupportedOrderError,
)
from hofbauer_entropy.core.tolerances import eps_root, lap_budget, max_branches
from hofbauer_entropy.intervals import Interval, Real, hull_of, is_exact, to_exact

logger = logging.getLogger(__name__)

CONTINUITY_TOL = 1e-9


def _outside_unit(v: Real) -> bool:
    if is_exact(v):
        return v < 0 or v > 1
    return float(v) < -CONTINUITY_TOL or float(v) > 1 + CONTINUITY_TOL


@runtime_checkable
class Branch(Protocol):
    """What a piece needs from its branch function."""

    @property
    def exact(self) -> bool: ...

    @property
    def is_constant(self) -> bool: ...

    def __call__(self, x: Real) -> Real: ...

    def derivative(self, x: Real, order: int) -> Real: ...

    def critical_points(self, lo: Real, hi: Real) -> list[Real]: ...

    def deriv_sup(self, lo: Real, hi: Real) -> float: ...


    # Optional: value_range(lo, hi) -> (min, max) of the branch on [lo, hi].


@dataclass(frozen=True)
class PolynomialBranch:
    """Power-basis polynomial c0 + c1 x + c2 x^2 + ... in the global coordinate."""

    coeffs: tuple[Real, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise RepresentationError("polynomial branch needs at least one coefficient")

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    @property
    def degree(self) -> int:
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i] != 0:
                return i
        return 0

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def __call__(self, x: Real) -> Real:
        acc: Real = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative_coeffs(self, order: int) -> tuple[Real, ...]:
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [k * cs[k] for k in range(1, len(cs))]
            if not cs:
                return (0,)
        return tuple(cs)

    def derivative(self, x: Real, order: int) -> Real:
        return PolynomialBranch(self.derivative_coeffs(order))(x)

    def critical_points(self, lo: Real, hi: Real) -> list[Real]:
        d = PolynomialBranch(self.derivative_coeffs(1))
        if d.is_constant:
            return []
        if d.degree == 1:
            root = -d.coeffs[0] / d.coeffs[1]
            return [root] if lo < root < hi else []
        return _real_roots_in(d, lo, hi)

    def deriv_sup(self, lo: Real, hi: Real) -> float:
        d = PolynomialBranch(self.derivative_coeffs(1))
        if d.is_constant:
            return abs(float(d.coeffs[0]))
        candidates: list[Real] = [lo, hi]
        dd = PolynomialBranch(self.derivative_coeffs(2))
        if not dd.is_constant:
            candidates.extend(_real_roots_in(dd, lo, hi))
        return max(abs(float(d(t))) for t in candidates)

    def value_range(self, lo: Real, hi: Real) -> tuple[Real, Real]:
        vals = [self(t) for t in (lo, hi, *self.critical_points(lo, hi))]
        return min(vals), max(vals)


def _real_roots_in(poly: PolynomialBranch, lo: Real, hi: Real) -> list[Real]:
    p = Polynomial([float(c) for c in poly.coeffs[: poly.degree + 1]])
    out: list[float] = []
    for z in p.roots():
        if abs(z.imag) > 1e-7 * max(1.0, abs(z.real)):
            continue
        x = float(z.real)
        if float(lo) < x < float(hi):
            out.append(x)
    out.sort()
    deduped: list[Real] = []
    for x in out:
        if not deduped or x - float(deduped[-1]) > 1e-9:
            deduped.append(x)
    return deduped


def bracket_roots(fn: Callable[[float], float], lo: float, hi: float, n_grid: int) -> list[float]:
    """Zeros of `fn` in (lo, hi) found by sign changes on a grid, refined with brentq."""

    xs = np.linspace(float(lo), float(hi), max(3, n_grid))
    vals = [fn(float(x)) for x in xs]
    tol = eps_root()
    roots: list[float] = []
    for i in range(len(xs) - 1):
        a, b = float(xs[i]), float(xs[i + 1])
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0 and i > 0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(float(brentq(fn, a, b, xtol=tol)))
    return [r for r in roots if float(lo) < r < float(hi)]


@dataclass(frozen=True)
class Piece:
    lo: Real
    hi: Real
    branch: Branch
    strictly_monotone: bool = False

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)


@dataclass(frozen=True)
class PiecewiseMonotoneMap:
    pieces: tuple[Piece, ...]
    smoothness_order: float = 2.0
    name: str = "map"
    _starts: tuple[Real, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.pieces:
            raise RepresentationError("map needs at least one piece")
        if self.smoothness_order < 1:
            raise RepresentationError("smoothness order r must be >= 1")
        if self.pieces[0].lo != 0 or self.pieces[-1].hi != 1:
            raise RepresentationError("pieces must cover [0, 1]")
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.hi != b.lo:
                raise RepresentationError(f"pieces not contiguous at {a.hi} / {b.lo}")
        for pc in self.pieces:
            if not pc.lo < pc.hi:
                raise RepresentationError(f"degenerate piece [{pc.lo}, {pc.hi}]")
        for a, b in zip(self.pieces, self.pieces[1:]):
            left, right = a.branch(a.hi), b.branch(b.lo)
            if left != right and abs(float(left) - float(right)) > CONTINUITY_TOL:
                raise RepresentationError(f"map is discontinuous at {a.hi}: {left} != {right}")
        for pc in self.pieces:
            value_range = getattr(pc.branch, "value_range", None)
            if value_range is not None:
                low, high = value_range(pc.lo, pc.hi)
            else:
                ends = (pc.branch(pc.lo), pc.branch(pc.hi))
                low, high = min(ends), max(ends)
            if _outside_unit(low) or _outside_unit(high):
                raise RepresentationError(f"map leaves [0, 1] on [{pc.lo}, {pc.hi}]: values reach [{low}, {high}]")
        object.__setattr__(self, "_starts", tuple(pc.lo for pc in self.pieces))

    @property
    def exact(self) -> bool:
        return all(
            is_exact(pc.lo) and is_exact(pc.hi) and isinstance(pc.branch, PolynomialBranch) and pc.branch.exact
            for pc in self.pieces
        )

    @property
    def piecewise_linear(self) -> bool:
        return all(isinstance(pc.branch, PolynomialBranch) and pc.branch.degree <= 1 for pc in self.pieces)

    @property
    def max_order(self) -> int:
        return int(math.floor(self.smoothness_order))

    def piece_index(self, x: Real) -> int:
        if x < 0 or x > 1:
            raise DomainError(f"x={x} outside [0, 1]")
        i = bisect.bisect_right(self._starts, x) - 1
        return min(max(i, 0), len(self.pieces) - 1)

    def __call__(self, x: Real) -> Real:
        return self.pieces[self.piece_index(x)].branch(x)

    def breakpoints(self) -> tuple[Real, ...]:
        return tuple(pc.hi for pc in self.pieces[:-1])


@dataclass(frozen=True)
class CriticalSet:
    points: tuple[Real, ...]
    intervals: tuple[Interval, ...]

    @property
    def is_empty(self) -> bool:
        return not self.points and not self.intervals


@dataclass(frozen=True)
class NaturalPartition:
    branches: tuple[Interval, ...]
    signs: tuple[int, ...]  # +1 increasing, -1 decreasing

    def __len__(self) -> int:
        return len(self.branches)

    def labels(self) -> tuple[str, ...]:
        return tuple(f"B{i}" for i in range(len(self.branches)))

    def index_of(self, x: Real) -> int | None:
        for i, b in enumerate(self.branches):
            if b.contains(x):
                return i
        return None


@dataclass(frozen=True)
class Orbit:
    points: tuple[Real, ...]
    derivative_products: tuple[float, ...]


def evaluate(fmap: PiecewiseMonotoneMap, x: Real) -> Real:
    return fmap(x)


def deriv(fmap: PiecewiseMonotoneMap, x: Real, order: int = 1) -> Real:
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > fmap.max_order:
        raise UnsupportedOrderError(f"order {order} exceeds floor(r)={fmap.max_order} for {fmap.name}")
    return fmap.pieces[fmap.piece_index(x)].branch.derivative(x, order)


def _one_sided(fmap: PiecewiseMonotoneMap, i: int, x: Real, order: int = 1) -> tuple[Real, Real]:
    return fmap.pieces[i].branch.derivative(x, order), fmap.pieces[i + 1].branch.derivative(x, order)


def _is_zero(v: Real) -> bool:
    if is_exact(v):
        return v == 0
    return abs(float(v)) <= eps_root()


def _sign(v: Real) -> int:
    if _is_zero(v):
        return 0
    return 1 if v > 0 else -1


def critical_set(fmap: PiecewiseMonotoneMap) -> CriticalSet:
    points: list[Real] = []
    intervals: list[Interval] = []
    for i, pc in enumerate(fmap.pieces):
        if pc.branch.is_constant:
            if pc.strictly_monotone:
                raise RepresentationError(f"piece [{pc.lo}, {pc.hi}] declared strictly monotone but is constant")
            intervals.append(Interval(pc.lo, pc.hi))
            continue
        inner = pc.branch.critical_points(pc.lo, pc.hi)
        if inner and pc.strictly_monotone:
            raise RepresentationError(f"piece [{pc.lo}, {pc.hi}] declared strictly monotone has critical points {inner}")
        points.extend(inner)
        if i + 1 < len(fmap.pieces):
            left, right = _one_sided(fmap, i, pc.hi)
            if _sign(left) == 0 or _sign(right) == 0 or _sign(left) != _sign(right):
                points.append(pc.hi)

    merged: list[Interval] = []
    for iv in intervals:
        if merged and merged[-1].hi == iv.lo:
            merged[-1] = Interval(merged[-1].lo, iv.hi)
        else:
            merged.append(iv)
    kept = sorted({p for p in points if not any(iv.contains_closed(p) for iv in merged)})
    if len(kept) + len(merged) > max_branches():
        raise ResolutionError(f"{len(kept) + len(merged)} critical components exceed the resolution limit")
    return CriticalSet(points=tuple(kept), intervals=tuple(merged))


def natural_partition(fmap: PiecewiseMonotoneMap) -> NaturalPartition:
    crit = critical_set(fmap)
    cuts: list[tuple[Real, Real]] = [(p, p) for p in crit.points] + [(iv.lo, iv.hi) for iv in crit.intervals]
    cuts.sort(key=lambda c: (c[0], c[1]))

    branches: list[Interval] = []
    signs: list[int] = []
    start: Real = fmap.pieces[0].lo
    for lo, hi in cuts + [(fmap.pieces[-1].hi, fmap.pieces[-1].hi)]:
        if start < lo:
            b = Interval(start, lo)
            if not b.is_empty:
                branches.append(b)
                signs.append(1 if fmap(lo) > fmap(start) else -1)
        start = max(start, hi)
    if len(branches) > max_branches():
        raise ResolutionError(f"{len(branches)} branches exceed the resolution limit")
    return NaturalPartition(branches=tuple(branches), signs=tuple(signs))


def turning_points(fmap: PiecewiseMonotoneMap, partition: NaturalPartition | None = None) -> tuple[tuple[Real, Real], ...]:
    """Lap boundaries as closed intervals (b, c); b == c for isolated turning points.

    A plateau between branches of opposite orientation is a single turning interval.
    """

    part = partition or natural_partition(fmap)
    out: list[tuple[Real, Real]] = []
    for (a, sa), (b, sb) in zip(zip(part.branches, part.signs), zip(part.branches[1:], part.signs[1:])):
        if sa != sb:
            out.append((a.hi, b.lo))
    return tuple(out)


def flat_critical_points(fmap: PiecewiseMonotoneMap, r: float) -> tuple[Real, ...]:
    """Critical points at which derivatives of orders 1..floor(r) all vanish.

    Plateaus are reported by their midpoint. One-sided derivatives are checked
    at breakpoints.
    """

    k = int(math.floor(r))
    crit = critical_set(fmap)
    out: list[Real] = [iv.midpoint for iv in crit.intervals]
    for x in crit.points:
        i = fmap.piece_index(x)
        sides = [fmap.pieces[i].branch]
        if i > 0 and x == fmap.pieces[i].lo:
            sides.append(fmap.pieces[i - 1].branch)
        if all(_is_zero(br.derivative(x, m)) for br in sides for m in range(1, k + 1)):
            out.append(x)
    return tuple(sorted(out))


def orbit(fmap: PiecewiseMonotoneMap, x: Real, n: int) -> Orbit:
    points: list[Real] = [x]
    products: list[float] = [1.0]
    for _ in range(n):
        cur = points[-1]
        d = fmap.pieces[fmap.piece_index(cur)].branch.derivative(cur, 1)
        products.append(products[-1] * abs(float(d)))
        points.append(fmap(cur))
    return Orbit(points=tuple(points), derivative_products=tuple(products))


def _image(fmap: PiecewiseMonotoneMap, lo: Real, hi: Real) -> Interval:
    # Valid only inside one monotone segment.
    return hull_of([fmap(lo), fmap(hi)])


def _laps(fmap: PiecewiseMonotoneMap, turning: Sequence[tuple[Real, Real]]) -> list[tuple[Real, Real]]:
    laps: list[tuple[Real, Real]] = []
    start: Real = 0 if fmap.exact else 0.0
    for b, c in turning:
        laps.append((start, b))
        start = c
    laps.append((start, 1 if fmap.exact else 1.0))
    return laps


def lap_counts(fmap: PiecewiseMonotoneMap, n_max: int, *, partial: bool = False) -> list[int]:
    """Lap numbers of f, f^2, ..., f^n_max.

    Each lap of f^n is tracked only through its image interval: a lap whose
    image strictly contains k turning points of f splits into k+1 laps of
    f^(n+1), whose images are the f-images of the pieces between them.
    With `partial=True` an exhausted budget ends the sequence early instead
    of raising.
    """

    if n_max < 1:
        raise ValueError("n must be >= 1")
    turning = list(turning_points(fmap))
    budget = lap_budget()

    states: dict[tuple, tuple[Interval, int]] = {}

    def _add(target: dict[tuple, tuple[Interval, int]], image: Interval, count: int) -> None:
        if image.lo >= image.hi:
            return
        key = image.key()
        prev = target.get(key)
        target[key] = (prev[0] if prev else image, (prev[1] if prev else 0) + count)

    for lo, hi in _laps(fmap, turning):
        _add(states, _image(fmap, lo, hi), 1)

    counts = [sum(c for _, c in states.values())]
    for step in range(2, n_max + 1):
        nxt: dict[tuple, tuple[Interval, int]] = {}
        for image, count in states.values():
            cut: list[Real] = [image.lo]
            for b, c in turning:
                if image.lo < b and c < image.hi:
                    cut.extend([b, c])
            cut.append(image.hi)
            for j in range(0, len(cut), 2):
                _add(nxt, _image(fmap, cut[j], cut[j + 1]), count)
        states = nxt
        if len(states) > budget:
            if partial:
                logger.warning("lap images exceed budget %d at n=%d; returning %d terms", budget, step, len(counts))
                return counts
            raise BudgetError(f"lap images exceed budget {budget} at n={step}")
        counts.append(sum(c for _, c in states.values()))
        logger.debug("lap step n=%d: %d distinct images", step, len(states))
    return counts


def lap_count(fmap: PiecewiseMonotoneMap, n: int) -> int:
    return lap_counts(fmap, n)[-1]


def _segments(fmap: PiecewiseMonotoneMap) -> list[tuple[Real, Real, Branch]]:
    """Closed subintervals on which f is monotone and given by one branch; plateaus excluded."""

    crit = critical_set(fmap)
    segs: list[tuple[Real, Real, Branch]] = []
    for pc in fmap.pieces:
        if pc.branch.is_constant:
            continue
        cuts = [pc.lo] + [p for p in crit.points if pc.lo < p < pc.hi] + [pc.hi]
        for a, b in zip(cuts, cuts[1:]):
            if a < b:
                segs.append((a, b, pc.branch))
    return segs


def _coarsen(image: Interval, resolution: Fraction) -> Interval:
    lo = Fraction(image.lo) if is_exact(image.lo) else Fraction(float(image.lo))
    hi = Fraction(image.hi) if is_exact(image.hi) else Fraction(float(image.hi))
    lo_c = Fraction(math.floor(lo / resolution)) * resolution
    hi_c = Fraction(math.ceil(hi / resolution)) * resolution
    return Interval(max(lo_c, Fraction(0)), min(hi_c, Fraction(1)))


def sup_deriv_norms(fmap: PiecewiseMonotoneMap, n_max: int, *, coarsen_above: int = 2048) -> list[float]:
    """Upper estimates of ||(f^n)'||_inf for n = 1..n_max.

    Cylinder images are pushed through the monotone segments of f carrying the
    largest product of per-segment derivative suprema. When the number of
    distinct images exceeds `coarsen_above`, images are rounded outward to a
    dyadic grid, which keeps the estimate an upper bound and submultiplicative.
    Exact for piecewise-linear maps.
    """

    if n_max < 1:
        raise ValueError("n must be >= 1")
    segs = _segments(fmap)
    if not segs:
        return [0.0] * n_max
    starts = [s[0] for s in segs]
    resolution = Fraction(1, 2**20)

    states: dict[tuple, tuple[Interval, float]] = {}

    def _add(target: dict[tuple, tuple[Interval, float]], image: Interval, weight: float) -> None:
        if image.lo >= image.hi:
            return
        key = image.key()
        prev = target.get(key)
        if prev is None or weight > prev[1]:
            target[key] = (image, weight)

    for a, b, br in segs:
        _add(states, _image(fmap, a, b), br.deriv_sup(a, b))
    norms = [max(w for _, w in states.values())]

    for _ in range(2, n_max + 1):
        nxt: dict[tuple, tuple[Interval, float]] = {}
        for image, weight in states.values():
            i0 = max(bisect.bisect_right(starts, image.lo) - 1, 0)
            for a, b, br in segs[i0:]:
                if a >= image.hi:
                    break
                lo, hi = max(a, image.lo), min(b, image.hi)
                if lo < hi:
                    _add(nxt, _image(fmap, lo, hi), weight * br.deriv_sup(lo, hi))
        if len(nxt) > coarsen_above:
            coarse: dict[tuple, tuple[Interval, float]] = {}
            for image, weight in nxt.values():
                _add(coarse, _coarsen(image, resolution), weight)
            nxt = coarse
        states = nxt
        norms.append(max((w for _, w in states.values()), default=0.0))
    return norms


def sup_deriv_norm(fmap: PiecewiseMonotoneMap, n: int = 1) -> float:
    return sup_deriv_norms(fmap, n)[-1]


# Built-in families.


def _param(value: Real | str) -> Real:
    if isinstance(value, float):
        return Fraction(str(value))
    return to_exact(value)


def tent(slope: Real | str = 2, *, r: float = 2.0) -> PiecewiseMonotoneMap:
    s = _param(slope)
    if not 0 < s <= 2:
        raise DomainError(f"tent slope must lie in (0, 2], got {s}")
    half = Fraction(1, 2)
    return PiecewiseMonotoneMap(
        pieces=(
            Piece(Fraction(0), half, PolynomialBranch((Fraction(0), s)), strictly_monotone=True),
            Piece(half, Fraction(1), PolynomialBranch((s, -s)), strictly_monotone=True),
        ),
        smoothness_order=r,
        name=f"tent:{slope}",
    )


def logistic(a: Real | str = 4, *, r: float = 3.0) -> PiecewiseMonotoneMap:
    k = _param(a)
    if not 0 < k <= 4:
        raise DomainError(f"logistic parameter must lie in (0, 4], got {k}")
    return PiecewiseMonotoneMap(
        pieces=(Piece(Fraction(0), Fraction(1), PolynomialBranch((Fraction(0), k, -k))),),
        smoothness_order=r,
        name=f"logistic:{a}",
    )


def identity(*, r: float = 2.0) -> PiecewiseMonotoneMap:
    return PiecewiseMonotoneMap(
        pieces=(Piece(Fraction(0), Fraction(1), PolynomialBranch((Fraction(0), Fraction(1))), strictly_monotone=True),),
        smoothness_order=r,
        name="identity",
    )


def piecewise_linear(nodes: Sequence[tuple[Real | str, Real | str]], *, r: float = 2.0, name: str = "piecewise_linear") -> PiecewiseMonotoneMap:
    """Continuous piecewise-affine map through the given (x, f(x)) nodes."""

    pts = [(to_exact(x), to_exact(y)) for x, y in nodes]
    pieces = []
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        slope = (y1 - y0) / (x1 - x0)
        pieces.append(Piece(x0, x1, PolynomialBranch((y0 - slope * x0, slope))))
    return PiecewiseMonotoneMap(pieces=tuple(pieces), smoothness_order=r, name=name)


def as_float_map(fmap: PiecewiseMonotoneMap) -> PiecewiseMonotoneMap:
    """Same map with floating breakpoints and coefficients (polynomial pieces only)."""

    pieces = []
    for pc in fmap.pieces:
        br = pc.branch
        if isinstance(br, PolynomialBranch):
            br = PolynomialBranch(tuple(float(c) for c in br.coeffs))
        pieces.append(Piece(float(pc.lo), float(pc.hi), br, pc.strictly_monotone))
    return PiecewiseMonotoneMap(pieces=tuple(pieces), smoothness_order=fmap.smoothness_order, name=fmap.name)
