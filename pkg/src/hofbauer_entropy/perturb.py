"""Sinusoidal perturbations at a homoclinic tangency and horseshoe certificates.

The perturbation replaces f on a window (c - δ, c + δ) around a flat
critical point c by

    g(x) = f(x) + φ(x) · (f(c) + a·sin(N (x - c) / δ) - f(x))

where φ is a C^⌊r⌋ window equal to 1 away from blend zones of width δ/10
at both window edges. With a = C δ λ^(-l) each full sine lap is blown up by
g^l over the whole window, giving about 2N/π horseshoe branches.

Tuning via env vars:
- HOFBAUER_ENTROPY_EPS_ROOT (root refinement of blend-zone critical points)
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from hofbauer_entropy.analysis import entropy_lap
from hofbauer_entropy.core.errors import GeometryError, HorizonError, PrecisionError, RepresentationError
from hofbauer_entropy.core.records import JumpRecord, NoJumpRecord
from hofbauer_entropy.core.run import error_text, run_sweep
from hofbauer_entropy.intervals import Interval, Real, is_exact, to_exact
from hofbauer_entropy.maps import (
    Branch,
    Piece,
    PiecewiseMonotoneMap,
    PolynomialBranch,
    bracket_roots,
    flat_critical_points,
    piecewise_linear,
)

logger = logging.getLogger(__name__)

HORIZON_LIMIT = 1e14
FLOAT_RESOLUTION = 1e-15

# Built-in tangency family: repelling fixed point P of multiplier 4 on
# [P - W, P + W], a slope-64 connection up to TOP, and a plateau of value P
# around the critical point C.
P = Fraction(2, 5)
W = Fraction(1, 6400)
TOP = Fraction(23, 50)
C = Fraction(21, 50)
ETA = Fraction(1, 80)
STEEP_SLOPE = 64


def tangency_family(*, r: float = 3.0) -> PiecewiseMonotoneMap:
    x_top = P + W + (TOP - P - 4 * W) / STEEP_SLOPE
    nodes = [
        (Fraction(0), Fraction(0)),
        (P - W, P - 4 * W),
        (P + W, P + 4 * W),
        (x_top, TOP),
        (C - ETA, P),
        (C + ETA, P),
        (Fraction(1), Fraction(1)),
    ]
    return piecewise_linear(nodes, r=r, name="tangency")


@lru_cache(maxsize=None)
def _smoothstep(k: int) -> Polynomial:
    """S on [0, 1] with S(0)=0, S(1)=1 and derivatives 1..k vanishing at both ends."""

    dp = Polynomial([0.0, 1.0]) ** k * Polynomial([1.0, -1.0]) ** k
    s = dp.integ()
    return s / s(1.0)


@lru_cache(maxsize=None)
def _smoothstep_deriv(k: int, order: int) -> Polynomial:
    s = _smoothstep(k)
    return s.deriv(order) if order else s


@dataclass(frozen=True)
class SinusoidalWindowBranch:
    center: Real
    delta: Real
    amplitude: Real
    frequency: int
    level: Real
    base: PolynomialBranch
    order: int

    @property
    def exact(self) -> bool:
        return False

    @property
    def exact_values(self) -> bool:
        return (
            self.base.is_constant
            and self.base.coeffs[0] == self.level
            and is_exact(self.level)
            and is_exact(self.amplitude)
        )

    @property
    def is_constant(self) -> bool:
        return False

    @property
    def omega(self) -> float:
        return self.frequency / float(self.delta)

    @property
    def blend(self) -> float:
        return float(self.delta) / 10.0

    def window(self, x: float, order: int = 0) -> float:
        c, d, b = float(self.center), float(self.delta), self.blend
        lo, hi = c - d, c + d
        if x <= lo or x >= hi:
            return 0.0
        s = _smoothstep_deriv(self.order, order)
        if x < lo + b:
            return float(s((x - lo) / b)) / b**order
        if x > hi - b:
            return float((-1) ** order * s((hi - x) / b)) / b**order
        return 1.0 if order == 0 else 0.0

    def _wave(self, x: float, j: int) -> float:
        w = self.omega
        return float(self.amplitude) * w**j * math.sin(w * (x - float(self.center)) + j * math.pi / 2)

    def __call__(self, x: Real) -> Real:
        t = float(x)
        if self.exact_values:
            val = self.window(t) * math.sin(self.omega * (t - float(self.center)))
            return Fraction(self.level) + Fraction(self.amplitude) * Fraction(val)
        base = float(self.base(t))
        return base + self.window(t) * (float(self.level) - base + self._wave(t, 0))

    def derivative(self, x: Real, order: int) -> float:
        t = float(x)
        total = float(self.base.derivative(t, order))
        for j in range(order + 1):
            q = self._wave(t, j) + (float(self.level) - float(self.base(t)) if j == 0 else -float(self.base.derivative(t, j)))
            total += math.comb(order, j) * self.window(t, order - j) * q
        return total

    def value_error(self) -> float:
        """Bound on |computed - true| for values returned by `__call__`."""

        a = float(self.amplitude)
        if self.exact_values:
            return a * (self.omega * 4.4e-16 + 4e-15)
        return 1e-14 * (1.0 + abs(float(self.level)) + a)

    def critical_points(self, lo: Real, hi: Real) -> list[Real]:
        c, d, b = float(self.center), float(self.delta), self.blend
        lo_f, hi_f = float(lo), float(hi)
        out: list[float] = []

        inner_lo, inner_hi = max(lo_f, c - d + b), min(hi_f, c + d - b)
        if inner_lo < inner_hi:
            w = self.omega
            k0 = math.ceil((w * (inner_lo - c) - math.pi / 2) / math.pi)
            k1 = math.floor((w * (inner_hi - c) - math.pi / 2) / math.pi)
            out.extend(c + (math.pi / 2 + k * math.pi) / w for k in range(k0, k1 + 1))

        laps_per_zone = int(self.omega * b / math.pi) + 1
        for z_lo, z_hi in ((c - d, c - d + b), (c + d - b, c + d)):
            a, e = max(lo_f, z_lo), min(hi_f, z_hi)
            if a < e:
                n_grid = 64 + int(16 * laps_per_zone * (e - a) / b)
                out.extend(bracket_roots(lambda t: self.derivative(t, 1), a, e, n_grid))

        for z_lo, z_hi in ((lo_f, min(hi_f, c - d)), (max(lo_f, c + d), hi_f)):
            if z_lo < z_hi:
                out.extend(float(x) for x in self.base.critical_points(z_lo, z_hi))
        return sorted(x for x in set(out) if lo_f < x < hi_f)

    def deriv_sup(self, lo: Real, hi: Real) -> float:
        c, d, b = float(self.center), float(self.delta), self.blend
        a_omega = float(self.amplitude) * self.omega
        if c - d + b <= float(lo) and float(hi) <= c + d - b:
            return a_omega
        s1 = float(np.max(np.abs(_smoothstep(self.order).deriv()(np.linspace(0.0, 1.0, 257))))) / b
        gap = max(abs(float(self.level) - float(self.base(x))) for x in (lo, hi))
        base_sup = self.base.deriv_sup(lo, hi)
        gap += base_sup * (float(hi) - float(lo))
        return base_sup + a_omega + s1 * (gap + float(self.amplitude))


@dataclass(frozen=True)
class TangencyData:
    c: Real
    p: Real
    period: int
    multiplier: Real
    k: int
    r: float

    @property
    def rate(self) -> Real:
        """Per-step expansion |multiplier|^(1/period)."""

        m = abs(self.multiplier)
        if self.period == 1:
            return m
        return float(m) ** (1.0 / self.period)

    @property
    def lyapunov(self) -> float:
        return math.log(float(abs(self.multiplier))) / self.period


def find_tangency(
    fmap: PiecewiseMonotoneMap,
    *,
    r: float | None = None,
    max_k: int = 20,
    max_period: int = 4,
    tol: float = 1e-9,
) -> TangencyData | None:
    """A flat critical point c whose orbit lands on a repelling periodic point.

    Returns None when no such configuration is found within the horizons.
    """

    order = fmap.smoothness_order if r is None else r
    for c in flat_critical_points(fmap, order):
        y = fmap(c)
        for k in range(1, max_k + 1):
            for T in range(1, max_period + 1):
                z = y
                mult: Real = 1
                for _ in range(T):
                    mult = mult * fmap.pieces[fmap.piece_index(z)].branch.derivative(z, 1)
                    z = fmap(z)
                if (z == y or abs(float(z) - float(y)) <= tol) and abs(float(mult)) > 1:
                    logger.info("tangency: c=%s lands on %s-periodic p=%s after k=%d", c, T, y, k)
                    return TangencyData(c=c, p=y, period=T, multiplier=mult, k=k, r=float(order))
            y = fmap(y)
    return None


@dataclass(frozen=True)
class PerturbationParams:
    delta: Real
    l: int
    C: Real
    lam: Real
    r: float
    a: Real
    N: int

    @property
    def horseshoe_possible(self) -> bool:
        return self.N >= 2


def _exactish(v: Real | str) -> Real:
    if isinstance(v, float):
        return Fraction(str(v))
    return to_exact(v)


def perturbation_params(delta: Real, l: int, lam: Real, r: float, C: Real = 1) -> PerturbationParams:
    """a = C δ λ^(-l) and N = ⌊(δ^r / (a l))^(1/r)⌋."""

    if l < 1:
        raise ValueError("l must be >= 1")
    if r < 1:
        raise ValueError("r must be >= 1")
    d, c_amp, lm = _exactish(delta), _exactish(C), _exactish(lam)
    if not 0 < d < 1 or c_amp <= 0 or lm <= 1:
        raise ValueError("need 0 < delta < 1, C > 0 and lambda > 1")
    a = c_amp * d * lm ** (-l) if is_exact(lm) else float(c_amp) * float(d) * float(lm) ** (-l)
    log_a = math.log(float(c_amp)) + math.log(float(d)) - l * math.log(float(lm))
    log_n = (r * math.log(float(d)) - log_a - math.log(l)) / r
    N = int(math.floor(math.exp(log_n))) if log_n < 700 else 0
    if l < 5 * abs(math.log(float(d))):
        logger.warning("l=%d is not large against |log delta|=%.3g", l, abs(math.log(float(d))))
    return PerturbationParams(delta=d, l=l, C=c_amp, lam=lm, r=r, a=a, N=N)


def theoretical_chain(delta: float, l: int, lam: float, r: float, C: float = 1.0) -> float:
    """(1/(r l)) log(δ^(r-1) λ^l / (C l)), the entropy lower bound of the construction."""

    return ((r - 1) * math.log(delta) + l * math.log(lam) - math.log(C) - math.log(l)) / (r * l)


def construct_perturbation(fmap: PiecewiseMonotoneMap, tangency: TangencyData, params: PerturbationParams) -> PiecewiseMonotoneMap:
    if params.l < 1:
        raise ValueError("l must be >= 1")
    if params.N < 2:
        raise ValueError(f"N={params.N} < 2: no horseshoe can be built")
    c, d = tangency.c, params.delta
    lo, hi = c - d, c + d
    if lo <= 0 or hi >= 1:
        raise GeometryError(f"window ({lo}, {hi}) leaves (0, 1)")
    idx = fmap.piece_index(c)
    piece = fmap.pieces[idx]
    if not (piece.lo <= lo and hi <= piece.hi):
        raise GeometryError(f"window ({lo}, {hi}) crosses a breakpoint of the piece [{piece.lo}, {piece.hi}]")
    if not isinstance(piece.branch, PolynomialBranch):
        raise GeometryError("window must lie on a polynomial piece")

    level = fmap(c)
    if not fmap.exact and float(params.a) < FLOAT_RESOLUTION * max(1.0, abs(float(level))):
        threshold = FLOAT_RESOLUTION * max(1.0, abs(float(level)))
        suggested = int(math.floor(math.log(float(params.C) * float(d) / threshold) / math.log(float(params.lam))))
        raise PrecisionError(f"a={float(params.a):.3g} is below float resolution", suggested_l=suggested)

    branch = SinusoidalWindowBranch(
        center=c,
        delta=d,
        amplitude=params.a,
        frequency=params.N,
        level=level,
        base=piece.branch,
        order=int(math.floor(params.r)),
    )
    new_pieces: list[Piece] = list(fmap.pieces[:idx])
    if piece.lo < lo:
        new_pieces.append(Piece(piece.lo, lo, piece.branch))
    new_pieces.append(Piece(lo, hi, branch))
    if hi < piece.hi:
        new_pieces.append(Piece(hi, piece.hi, piece.branch))
    new_pieces.extend(fmap.pieces[idx + 1 :])
    return PiecewiseMonotoneMap(
        pieces=tuple(new_pieces),
        smoothness_order=fmap.smoothness_order,
        name=f"{fmap.name}+sin(l={params.l},N={params.N})",
    )


@dataclass(frozen=True)
class BumpBranch:
    """A polynomial branch plus A·(1 - s^2)^m with s = (x - center)/half_width.

    Held as one polynomial in the local coordinate s (numpy `domain` mapping),
    so values vanish to rounding at the support edges.
    """

    base: PolynomialBranch
    center: float
    half_width: float
    amplitude: float
    power: int
    poly: Polynomial = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        to_x = Polynomial([self.center, self.half_width])
        local = Polynomial([0.0])
        for c in reversed(self.base.coeffs):
            local = local * to_x + float(c)
        local = local + self.amplitude * Polynomial([1.0, 0.0, -1.0]) ** self.power
        support = [self.center - self.half_width, self.center + self.half_width]
        object.__setattr__(self, "poly", Polynomial(local.coef, domain=support))

    @property
    def exact(self) -> bool:
        return False

    @property
    def is_constant(self) -> bool:
        return False

    def __call__(self, x: Real) -> float:
        return float(self.poly(float(x)))

    def derivative(self, x: Real, order: int) -> float:
        return float(self.poly.deriv(order)(float(x))) if order else self(x)

    def _roots(self, order: int, lo: Real, hi: Real) -> list[float]:
        p = self.poly.deriv(order)
        if p.degree() < 1:
            return []
        out = {
            float(z.real)
            for z in np.atleast_1d(p.roots())
            if abs(z.imag) <= 1e-7 * max(1.0, abs(z.real)) and float(lo) < z.real < float(hi)
        }
        return sorted(out)

    def critical_points(self, lo: Real, hi: Real) -> list[Real]:
        return list(self._roots(1, lo, hi))

    def deriv_sup(self, lo: Real, hi: Real) -> float:
        d = self.poly.deriv()
        return max(abs(float(d(t))) for t in (float(lo), float(hi), *self._roots(2, lo, hi)))

    def value_range(self, lo: Real, hi: Real) -> tuple[float, float]:
        vals = [self(t) for t in (lo, hi, *self._roots(1, lo, hi))]
        return min(vals), max(vals)

    def value_error(self) -> float:
        return 1e-14 * (1.0 + float(np.sum(np.abs(self.poly.coef))))


def bump_perturbation(
    fmap: PiecewiseMonotoneMap, center: float, half_width: float, amplitude: float, r: float
) -> PiecewiseMonotoneMap:
    """f + A·(1 - ((x - x0)/h)^2)^(⌊r⌋+1) on [x0 - h, x0 + h], a C^⌊r⌋ polynomial bump.

    Raises `RepresentationError` when the bumped map leaves [0, 1].
    """

    lo, hi = center - half_width, center + half_width
    if lo < 0 or hi > 1 or half_width <= 0:
        raise GeometryError(f"bump support [{lo}, {hi}] must lie in [0, 1]")
    power = int(math.floor(r)) + 1

    pieces: list[Piece] = []
    for pc in fmap.pieces:
        if not isinstance(pc.branch, PolynomialBranch):
            raise GeometryError("bump perturbations need polynomial pieces")
        base = PolynomialBranch(tuple(float(x) for x in pc.branch.coeffs))
        cuts = [float(pc.lo)] + [x for x in (lo, hi) if float(pc.lo) < x < float(pc.hi)] + [float(pc.hi)]
        for a, b in zip(cuts, cuts[1:]):
            if lo <= a and b <= hi:
                pieces.append(Piece(a, b, BumpBranch(base, center, half_width, amplitude, power)))
            else:
                pieces.append(Piece(a, b, base))
    return PiecewiseMonotoneMap(pieces=tuple(pieces), smoothness_order=r, name=f"{fmap.name}+bump")


def cr_distance(f: PiecewiseMonotoneMap, g: PiecewiseMonotoneMap, r: float, grid_density: int = 2000) -> float:
    """Largest grid-sampled |f^(j) - g^(j)|, j = 0..⌊r⌋, over cells where the branches differ."""

    k = int(math.floor(r))
    cuts = sorted({float(x) for x in (0, 1, *f.breakpoints(), *g.breakpoints())})
    worst = 0.0
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        bf = f.pieces[f.piece_index(mid)].branch
        bg = g.pieces[g.piece_index(mid)].branch
        if bf == bg:
            continue
        for x in np.linspace(a, b, grid_density):
            t = float(x)
            worst = max(worst, abs(float(bf(t)) - float(bg(t))))
            for j in range(1, k + 1):
                worst = max(worst, abs(float(bf.derivative(t, j)) - float(bg.derivative(t, j))))
    return worst


# Certification.


def _value_error(branch: Branch) -> Fraction:
    err = getattr(branch, "value_error", None)
    if err is not None:
        return Fraction(2 * err())
    if isinstance(branch, PolynomialBranch) and branch.exact:
        return Fraction(0)
    scale = sum(abs(float(c)) for c in branch.coeffs)  # type: ignore[attr-defined]
    return Fraction(4e-16 * (len(branch.coeffs) + 1) * max(scale, 1.0))  # type: ignore[attr-defined]


def _as_fraction(v: Real) -> Fraction:
    return Fraction(v) if is_exact(v) else Fraction(float(v))


def inner_image(g: PiecewiseMonotoneMap, lo: Real, hi: Real) -> Interval | None:
    """An interval contained in g([lo, hi]); None when nothing can be certified.

    g([lo, hi]) contains the hull of g at any points of [lo, hi]; computed
    values are moved inward by their error bounds.
    """

    lo_f, hi_f = _as_fraction(lo), _as_fraction(hi)
    i0 = g.piece_index(lo_f)
    i1 = g.piece_index(hi_f)
    low: Fraction | None = None
    high: Fraction | None = None
    for i in range(i0, i1 + 1):
        pc = g.pieces[i]
        a, b = max(lo_f, _as_fraction(pc.lo)), min(hi_f, _as_fraction(pc.hi))
        if a > b:
            continue
        err = _value_error(pc.branch)
        samples: list[Real] = [a, b]
        if not pc.branch.is_constant and not (isinstance(pc.branch, PolynomialBranch) and pc.branch.degree <= 1):
            samples.extend(pc.branch.critical_points(a, b))
        for x in samples:
            v = _as_fraction(pc.branch(_as_fraction(x)))
            lo_v, hi_v = v + err, v - err
            low = lo_v if low is None else min(low, lo_v)
            high = hi_v if high is None else max(high, hi_v)
    if low is None or high is None or low > high:
        return None
    return Interval(low, high)


def push_inner(g: PiecewiseMonotoneMap, interval: Interval, steps: int) -> Interval | None:
    cur: Interval | None = interval
    for _ in range(steps):
        if cur is None:
            return None
        cur = inner_image(g, cur.lo, cur.hi)
    return cur


@dataclass(frozen=True)
class HorseshoeCertificate:
    l: int
    intervals: tuple[Interval, ...]
    rows: tuple[tuple[int, int] | None, ...]  # covered index range per source interval
    spectral_lower_bound: float
    entropy_bound: float

    @property
    def full_branches(self) -> int:
        m = len(self.intervals)
        return sum(1 for row in self.rows if row == (0, m - 1))

    def covers(self, i: int, j: int) -> bool:
        row = self.rows[i]
        return row is not None and row[0] <= j <= row[1]


def _spectral_lower_bound(rows: Sequence[tuple[int, int] | None], m: int, iters: int = 300) -> float:
    """Collatz-Wielandt bound min_i (M_S v)_i / v_i on the support S of a Perron-like v."""

    if m == 0:
        return 0.0
    active = np.array([row is not None for row in rows])
    j0 = np.array([row[0] if row else 0 for row in rows])
    j1 = np.array([row[1] if row else -1 for row in rows])

    def _apply(v: np.ndarray) -> np.ndarray:
        prefix = np.concatenate([[0.0], np.cumsum(v)])
        return np.where(active, prefix[j1 + 1] - prefix[j0], 0.0)

    v = np.ones(m)
    for _ in range(iters):
        w = _apply(v) + v
        v = w / w.max()
    support = v > 1e-9 * v.max()
    if not support.any():
        return 0.0
    mv = _apply(np.where(support, v, 0.0))
    ratios = mv[support] / v[support]
    return float(max(ratios.min(), 0.0))


def certify_horseshoe(
    g: PiecewiseMonotoneMap,
    l: int,
    window: tuple[Real, Real],
    branch_hint: Sequence[tuple[Real, Real]] | None = None,
) -> HorseshoeCertificate:
    """Covering relations g^l(J_i) ⊇ closure(J_j) among the laps J of g in `window`.

    Images are inner approximations, so every claimed covering holds for the
    true map. The entropy bound is log ρ / l for a certified lower bound ρ of
    the spectral radius of the covering matrix.
    """

    if l < 1:
        raise ValueError("l must be >= 1")
    w_lo, w_hi = _as_fraction(window[0]), _as_fraction(window[1])
    if not _exact_valued(g):
        sup = max(pc.branch.deriv_sup(pc.lo, pc.hi) for pc in g.pieces)
        if sup > 1 and l * math.log(sup) > math.log(HORIZON_LIMIT):
            raise HorizonError(
                f"sup|g'|^l = {sup:.3g}^{l} exceeds float-safe expansion",
                max_safe_l=int(math.log(HORIZON_LIMIT) / math.log(sup)),
            )

    if branch_hint is not None:
        intervals = [Interval(_as_fraction(a), _as_fraction(b)) for a, b in branch_hint]
    else:
        cuts = [w_lo]
        for pc in g.pieces:
            a, b = max(w_lo, _as_fraction(pc.lo)), min(w_hi, _as_fraction(pc.hi))
            if a >= b:
                continue
            if a > cuts[-1]:
                cuts.append(a)
            if pc.branch.is_constant:
                continue
            cuts.extend(x for x in map(_as_fraction, pc.branch.critical_points(a, b)) if a < x < b)
        if w_hi > cuts[-1]:
            cuts.append(w_hi)
        intervals = [Interval(a, b) for a, b in zip(cuts, cuts[1:]) if a < b]
    intervals.sort(key=lambda iv: iv.lo)

    los = [iv.lo for iv in intervals]
    his = [iv.hi for iv in intervals]
    rows: list[tuple[int, int] | None] = []
    for iv in intervals:
        image = push_inner(g, iv, l)
        if image is None:
            rows.append(None)
            continue
        j0 = bisect.bisect_left(los, image.lo)
        j1 = bisect.bisect_right(his, image.hi) - 1
        rows.append((j0, j1) if j0 <= j1 else None)

    rho = _spectral_lower_bound(rows, len(intervals))
    bound = math.log(rho) / l if rho > 1 else 0.0
    logger.info("horseshoe: %d laps, %d covering rows, rho >= %.6g", len(intervals), sum(r is not None for r in rows), rho)
    return HorseshoeCertificate(
        l=l,
        intervals=tuple(intervals),
        rows=tuple(rows),
        spectral_lower_bound=rho,
        entropy_bound=bound,
    )


def _exact_valued(g: PiecewiseMonotoneMap) -> bool:
    for pc in g.pieces:
        br = pc.branch
        if isinstance(br, PolynomialBranch):
            if not br.exact:
                return False
        elif not getattr(br, "exact_values", False):
            return False
    return True


def verify_certificate(g: PiecewiseMonotoneMap, cert: HorseshoeCertificate) -> bool:
    """Recheck every covering claim with each source interval split in two."""

    for iv, row in zip(cert.intervals, cert.rows):
        if row is None:
            continue
        mid = (iv.lo + iv.hi) / 2
        halves = [push_inner(g, Interval(iv.lo, mid), cert.l), push_inner(g, Interval(mid, iv.hi), cert.l)]
        parts = [h for h in halves if h is not None]
        if not parts:
            return False
        # Images of the halves share g^l(mid), so their hull is still inside g^l(iv).
        lo = min(h.lo for h in parts)
        hi = max(h.hi for h in parts)
        if not (lo <= cert.intervals[row[0]].lo and cert.intervals[row[1]].hi <= hi):
            return False
    return True


# Experiments.


def jump_experiment(
    fmap: PiecewiseMonotoneMap,
    tangency: TangencyData,
    r: float,
    l_list: Sequence[int],
    delta: float,
    *,
    C: float = 1.0,
    grid_density: int = 2000,
    concurrency: int = 1,
    progress: bool = False,
) -> list[JumpRecord]:
    """One row per l: parameters, C^r distance, certified and theoretical entropy."""

    if not l_list:
        raise ValueError("l_list must not be empty")
    if list(l_list) != sorted(l_list):
        raise ValueError("l_list must be increasing")
    tang = replace(tangency, r=r)
    lam = tang.rate
    lambda_over_r = tang.lyapunov / r

    def _row(l: int) -> JumpRecord:
        params = perturbation_params(delta, l, lam, r, C)
        chain = theoretical_chain(float(delta), l, float(lam), r, float(C))
        if not params.horseshoe_possible:
            logger.info("l=%d skipped: N=%d < 2", l, params.N)
            return JumpRecord(
                l=l, delta=float(delta), a=float(params.a), N=params.N, cr_distance=None, certified_entropy=None,
                theoretical_chain=chain, lambda_over_r=lambda_over_r, status="skipped", error="N < 2: no horseshoe",
            )
        g = construct_perturbation(fmap, tang, params)
        dist = cr_distance(fmap, g, r, grid_density)
        window = (tang.c - params.delta, tang.c + params.delta)
        cert = certify_horseshoe(g, l, window)
        return JumpRecord(
            l=l, delta=float(delta), a=float(params.a), N=params.N, cr_distance=dist,
            certified_entropy=cert.entropy_bound, theoretical_chain=chain, lambda_over_r=lambda_over_r, status="ok",
        )

    def _failed(l: int, exc: Exception) -> JumpRecord:
        return JumpRecord(
            l=l, delta=float(delta), a=None, N=None, cr_distance=None, certified_entropy=None,
            theoretical_chain=None, lambda_over_r=lambda_over_r, status="error", error=error_text(exc),
        )

    return run_sweep(list(l_list), _row, on_error=_failed, concurrency=concurrency, desc="Jump rows", progress=progress)


def no_jump_experiment(
    fmap: PiecewiseMonotoneMap,
    r: float,
    samples: int,
    seed: int,
    max_cr: float,
    *,
    n_max: int = 14,
    grid_density: int = 400,
    concurrency: int = 1,
    progress: bool = False,
) -> list[NoJumpRecord]:
    """Random C^r-small bumps of f and the lap entropy of each perturbed map."""

    rng = np.random.default_rng(seed)
    h_ref = entropy_lap(fmap, n_max).value
    draws = []
    for i in range(samples):
        half_width = float(rng.uniform(0.02, 0.2))
        center = float(rng.uniform(half_width, 1.0 - half_width))
        draws.append((i, center, half_width, float(rng.uniform(0.5, 1.0)), bool(rng.integers(0, 2))))

    def _row(draw: tuple[int, float, float, float, bool]) -> NoJumpRecord:
        i, center, half_width, fraction, positive = draw
        amplitude = fraction * max_cr / _unit_bump_cr_norm(half_width, r)
        g = None
        for sign in ((1.0, -1.0) if positive else (-1.0, 1.0)):
            try:
                candidate = bump_perturbation(fmap, center, half_width, sign * amplitude, r)
            except RepresentationError:
                continue
            if _maps_into_unit(candidate):
                g = candidate
                amplitude *= sign
                break
        if g is None:
            raise GeometryError("bump leaves [0, 1] with either sign")
        return NoJumpRecord(
            sample=i, center=center, half_width=half_width, amplitude=amplitude,
            cr_distance=cr_distance(fmap, g, r, grid_density), entropy_lap=entropy_lap(g, n_max).value,
            h_reference=h_ref, status="ok",
        )

    def _failed(draw: tuple[int, float, float, float, bool], exc: Exception) -> NoJumpRecord:
        i, center, half_width, _, _ = draw
        return NoJumpRecord(
            sample=i, center=center, half_width=half_width, amplitude=0.0, cr_distance=None, entropy_lap=None,
            h_reference=h_ref, status="error", error=error_text(exc),
        )

    return run_sweep(draws, _row, on_error=_failed, concurrency=concurrency, desc="No-jump samples", progress=progress)


def _unit_bump_cr_norm(half_width: float, r: float) -> float:
    """max over j ≤ ⌊r⌋ of sup |d^j/dx^j (1 - ((x - x0)/h)^2)^(⌊r⌋+1)|."""

    k = int(math.floor(r))
    q = Polynomial([1.0, 0.0, -1.0]) ** (k + 1)
    worst = 0.0
    for j in range(k + 1):
        qj = q.deriv(j) if j else q
        stationary = [float(z.real) for z in np.atleast_1d(qj.deriv().roots()) if abs(z.imag) < 1e-9 and -1 <= z.real <= 1]
        sup = max(abs(float(qj(s))) for s in (-1.0, 1.0, *stationary))
        worst = max(worst, sup / half_width**j)
    return worst


def _maps_into_unit(g: PiecewiseMonotoneMap) -> bool:
    for pc in g.pieces:
        low, high = pc.branch.value_range(pc.lo, pc.hi)  # type: ignore[attr-defined]
        if low < 0 or high > 1:
            return False
    return True
